#pragma once

#include <cstdint>
#include <span>

#include "senti/encoder.hpp"
#include "senti/head.hpp"
#include "senti/params.hpp"

namespace senti {

struct ModelConfig {
  EncoderConfig encoder;
  HeadConfig head;

  // Ties the head's input width and sequence length to the encoder.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// Transformer encoder feeding a recurrent classification head. Owns all
// learnable parameters; forward passes record onto a caller-provided tape.
class SentimentModel {
 public:
  explicit SentimentModel(ModelConfig config);

  // batch x M class probabilities.
  Var forward(Tape& tape, const TokenBatch& tokens, bool training, std::uint64_t seed);

  // Inference-mode probabilities, one row per sequence.
  Tensor predict_proba(const TokenBatch& tokens);

  const ModelConfig& config() const noexcept { return config_; }
  ParamStore& params() noexcept { return params_; }
  const ParamStore& params() const noexcept { return params_; }

 private:
  ModelConfig config_;
  ParamStore params_;
};

}  // namespace senti
