#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "senti/autodiff.hpp"
#include "senti/params.hpp"
#include "senti/tokenizer.hpp"

namespace senti {

// A batch of equal-length sequences in row-major (sequence, position) order.
struct TokenBatch {
  std::size_t batch = 0;
  std::size_t length = 0;
  std::vector<std::size_t> ids;
  std::vector<double> mask;  // 1 for real tokens, 0 for padding
  std::vector<std::size_t> labels;

  static TokenBatch from(std::span<const EncodedSequence> sequences);
  static TokenBatch from(std::span<const EncodedSequence> sequences, std::span<const std::size_t> order);

  std::span<const double> sequence_mask(std::size_t b) const { return std::span(mask).subspan(b * length, length); }
};

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 64;
  std::size_t num_layers = 2;
  std::size_t num_heads = 4;
  std::size_t ffn_dim = 128;
  std::size_t max_len = 64;
  double dropout_rate = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

// Registers "encoder.*" parameters with Xavier-uniform weights, zero biases
// and unit layer-norm gains.
void init_encoder_params(const EncoderConfig& config, ParamStore& params);

// Token embedding plus learned position embedding; (batch * length) x d_model.
Var embed(Tape& tape, ParamStore& params, const EncoderConfig& config, const TokenBatch& tokens);

// One attention head for one sequence: softmax(q k^T / sqrt(d_head)) v with
// padded keys (key_mask == 0) excluded.
Var scaled_dot_product_attention(Var q, Var k, Var v, std::span<const double> key_mask);

// Multi-head self-attention of layer `layer` over x ((batch * length) x d).
Var self_attention(Tape& tape, ParamStore& params, const EncoderConfig& config, std::size_t layer, Var x,
                   const TokenBatch& tokens);

// embed -> num_layers x [attention + residual + layer-norm, feed-forward +
// residual + layer-norm] (post-norm). Dropout inside the blocks is active only
// when training. Returns (batch * length) x d_model.
Var encoder_forward(Tape& tape, ParamStore& params, const EncoderConfig& config, const TokenBatch& tokens,
                    bool training, std::uint64_t seed);

}  // namespace senti
