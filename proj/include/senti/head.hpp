#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "senti/autodiff.hpp"
#include "senti/encoder.hpp"
#include "senti/params.hpp"

namespace senti {

enum class HeadVariant { None, Lstm, BiLstm, Gru };

std::string to_string(HeadVariant variant);
HeadVariant parse_head_variant(const std::string& name);

struct HeadConfig {
  HeadVariant variant = HeadVariant::BiLstm;
  std::size_t input_dim = 64;     // d_model of the encoder
  std::size_t hidden_units = 128;
  std::size_t dense1_units = 64;
  std::size_t num_classes = 3;
  double dropout_rate = 0.1;
  std::size_t max_len = 64;
  bool peephole = false;
  std::uint64_t seed = 0;

  // Width of one recurrent output row: 2h for BiLSTM, h for LSTM/GRU, d for none.
  std::size_t recurrent_width() const;
  void validate() const;
  bool operator==(const HeadConfig&) const = default;
};

// Gate parameters of one LSTM direction, bound to a tape. Input maps are
// d x h, recurrent maps h x h, biases [h]. Peephole vectors are bound only
// when the cell is configured with peepholes.
struct LstmDirectionParams {
  Var w_ix, w_ih, b_i;
  Var w_fx, w_fh, b_f;
  Var w_cx, w_ch, b_c;
  Var w_ox, w_oh, b_o;
  Var p_i, p_f, p_o;

  static LstmDirectionParams bind(Tape& tape, ParamStore& params, const std::string& prefix, bool peephole);
  bool peephole() const noexcept { return p_i.valid(); }
};

struct GruParams {
  Var w_rx, w_rh, b_r;
  Var w_zx, w_zh, b_z;
  Var w_nx, w_nh, b_n;

  static GruParams bind(Tape& tape, ParamStore& params, const std::string& prefix);
};

struct LstmState {
  Var h;
  Var c;
};

// i = s(x Wix + h Wih + bi), f = s(x Wfx + h Wfh + bf),
// c~ = tanh(x Wcx + h Wch + bc), c = f*c_prev + i*c~,
// o = s(x Wox + h Woh + bo), h = o*tanh(c). Rows of x are independent
// sequences. With peepholes, i and f also see p*c_prev and o sees p*c.
LstmState lstm_cell_step(Var x, Var h_prev, Var c_prev, const LstmDirectionParams& p);

// r = s(x Wrx + h Wrh + br), z = s(x Wzx + h Wzh + bz),
// n = tanh(x Wnx + bn + r*(h Wnh)), h = (1 - z)*n + z*h_prev.
Var gru_cell_step(Var x, Var h_prev, const GruParams& p);

// Runs one LSTM direction over `length` steps of a batch laid out as
// (batch * length) x d. Returns one batch x h state per position, in
// position order regardless of direction.
std::vector<Var> lstm_sequence(Var inputs, std::size_t batch, std::size_t length, const LstmDirectionParams& p,
                               bool reverse);
std::vector<Var> gru_sequence(Var inputs, std::size_t batch, std::size_t length, const GruParams& p);

// Forward and backward LSTMs over one document's l x d embedding matrix,
// concatenated per position into l x 2h.
Var bilstm_forward(Var embeddings, const LstmDirectionParams& forward, const LstmDirectionParams& backward);

void init_head_params(const HeadConfig& config, ParamStore& params);

// Per-position recurrent outputs (batch x width each) for the configured
// variant; the `none` variant passes encoder rows through.
std::vector<Var> recurrent_layer(Tape& tape, ParamStore& params, const HeadConfig& config, Var inputs,
                                 std::size_t batch, std::size_t length);

// dropout -> recurrent layer -> zero padded rows -> flatten -> dense + tanh ->
// dense -> softmax. `encoded` is (batch * length) x d; returns batch x M
// class probabilities.
Var head_forward(Tape& tape, ParamStore& params, const HeadConfig& config, Var encoded, const TokenBatch& tokens,
                 bool training, std::uint64_t seed);

// argmax; ties go to the lowest index.
std::size_t predict_class(std::span<const double> probs);

}  // namespace senti
