#include "senti/head.hpp"

#include <algorithm>

#include "senti/rng.hpp"

namespace senti {

namespace {

const char* variant_prefix(HeadVariant v) {
  switch (v) {
    case HeadVariant::Lstm: return "head.lstm.";
    case HeadVariant::BiLstm: return "head.bilstm.";
    case HeadVariant::Gru: return "head.gru.";
    case HeadVariant::None: return "head.";
  }
  return "head.";
}

std::vector<std::size_t> step_rows(std::size_t batch, std::size_t length, std::size_t t) {
  std::vector<std::size_t> rows(batch);
  for (std::size_t b = 0; b < batch; ++b) rows[b] = b * length + t;
  return rows;
}

// Fused projections: [W_ix W_fx W_cx W_ox] and friends, so one matmul per
// step serves all four gates.
struct FusedLstm {
  Var wx, wh, bias;
  std::size_t hidden;
};

FusedLstm fuse(const LstmDirectionParams& p) {
  const Var wx[] = {p.w_ix, p.w_fx, p.w_cx, p.w_ox};
  const Var wh[] = {p.w_ih, p.w_fh, p.w_ch, p.w_oh};
  const Var b[] = {p.b_i, p.b_f, p.b_c, p.b_o};
  return {concat(wx, 1), concat(wh, 1), concat(b, 0), p.w_ih.value().rows()};
}

LstmState fused_step(Var x_proj, Var h_prev, Var c_prev, const FusedLstm& f, const LstmDirectionParams& p) {
  const std::size_t h = f.hidden;
  Var gates = x_proj + matmul(h_prev, f.wh);
  Var pre_i = slice_cols(gates, 0, h);
  Var pre_f = slice_cols(gates, h, h);
  Var pre_c = slice_cols(gates, 2 * h, h);
  Var pre_o = slice_cols(gates, 3 * h, h);
  if (p.peephole()) {
    pre_i = pre_i + mul_row(c_prev, p.p_i);
    pre_f = pre_f + mul_row(c_prev, p.p_f);
  }
  Var i = sigmoid(pre_i);
  Var fg = sigmoid(pre_f);
  Var c = fg * c_prev + i * tanh_act(pre_c);
  if (p.peephole()) pre_o = pre_o + mul_row(c, p.p_o);
  Var o = sigmoid(pre_o);
  return {o * tanh_act(c), c};
}

Var zeros_state(Tape& tape, std::size_t rows, std::size_t hidden) { return tape.constant(Tensor({rows, hidden})); }

}  // namespace

std::string to_string(HeadVariant variant) {
  switch (variant) {
    case HeadVariant::None: return "none";
    case HeadVariant::Lstm: return "lstm";
    case HeadVariant::BiLstm: return "bilstm";
    case HeadVariant::Gru: return "gru";
  }
  return "unknown";
}

HeadVariant parse_head_variant(const std::string& name) {
  if (name == "none") return HeadVariant::None;
  if (name == "lstm") return HeadVariant::Lstm;
  if (name == "bilstm") return HeadVariant::BiLstm;
  if (name == "gru") return HeadVariant::Gru;
  throw ConfigError("unknown head variant '" + name + "' (expected none, lstm, bilstm or gru)");
}

std::size_t HeadConfig::recurrent_width() const {
  switch (variant) {
    case HeadVariant::None: return input_dim;
    case HeadVariant::BiLstm: return 2 * hidden_units;
    default: return hidden_units;
  }
}

void HeadConfig::validate() const {
  if (input_dim == 0 || dense1_units == 0 || max_len == 0) throw ConfigError("head dimensions must be positive");
  if (variant != HeadVariant::None && hidden_units == 0) throw ConfigError("hidden_units must be positive");
  if (num_classes < 2) throw ConfigError("a classifier needs at least 2 classes");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("head dropout_rate must lie in [0, 1)");
}

LstmDirectionParams LstmDirectionParams::bind(Tape& tape, ParamStore& params, const std::string& prefix,
                                              bool peephole) {
  auto b = [&](const char* name) { return params.bind(tape, prefix + name); };
  LstmDirectionParams p{b("w_ix"), b("w_ih"), b("b_i"), b("w_fx"), b("w_fh"), b("b_f"),
                        b("w_cx"), b("w_ch"), b("b_c"), b("w_ox"), b("w_oh"), b("b_o"),
                        {},        {},        {}};
  if (peephole) {
    p.p_i = b("p_i");
    p.p_f = b("p_f");
    p.p_o = b("p_o");
  }
  return p;
}

GruParams GruParams::bind(Tape& tape, ParamStore& params, const std::string& prefix) {
  auto b = [&](const char* name) { return params.bind(tape, prefix + name); };
  return {b("w_rx"), b("w_rh"), b("b_r"), b("w_zx"), b("w_zh"), b("b_z"), b("w_nx"), b("w_nh"), b("b_n")};
}

LstmState lstm_cell_step(Var x, Var h_prev, Var c_prev, const LstmDirectionParams& p) {
  const std::size_t h = p.w_ih.value().rows();
  if (x.value().cols() != p.w_ix.value().rows() || h_prev.value().cols() != h || c_prev.shape() != h_prev.shape()) {
    throw DimensionError("lstm_cell_step: input " + shape_string(x.shape()) + ", state " +
                         shape_string(h_prev.shape()) + "/" + shape_string(c_prev.shape()) + " do not fit the cell");
  }
  const FusedLstm f = fuse(p);
  return fused_step(dense(x, f.wx, f.bias), h_prev, c_prev, f, p);
}

Var gru_cell_step(Var x, Var h_prev, const GruParams& p) {
  const std::size_t h = p.w_rh.value().rows();
  if (x.value().cols() != p.w_rx.value().rows() || h_prev.value().cols() != h) {
    throw DimensionError("gru_cell_step: input " + shape_string(x.shape()) + " or state " +
                         shape_string(h_prev.shape()) + " do not fit the cell");
  }
  Var r = sigmoid(dense(x, p.w_rx, p.b_r) + matmul(h_prev, p.w_rh));
  Var z = sigmoid(dense(x, p.w_zx, p.b_z) + matmul(h_prev, p.w_zh));
  Var n = tanh_act(dense(x, p.w_nx, p.b_n) + r * matmul(h_prev, p.w_nh));
  Tape& tape = x.tape();
  Var one = tape.constant(Tensor(z.shape(), 1.0));
  return (one - z) * n + z * h_prev;
}

std::vector<Var> lstm_sequence(Var inputs, std::size_t batch, std::size_t length, const LstmDirectionParams& p,
                               bool reverse) {
  if (inputs.value().rows() != batch * length) {
    throw DimensionError("lstm_sequence: " + shape_string(inputs.shape()) + " is not " + std::to_string(batch) +
                         " sequences of length " + std::to_string(length));
  }
  const FusedLstm f = fuse(p);
  Var projected = dense(inputs, f.wx, f.bias);
  LstmState state{zeros_state(inputs.tape(), batch, f.hidden), zeros_state(inputs.tape(), batch, f.hidden)};
  std::vector<Var> outputs(length);
  for (std::size_t k = 0; k < length; ++k) {
    const std::size_t t = reverse ? length - 1 - k : k;
    const auto rows = step_rows(batch, length, t);
    Var x_t = batch == 1 ? slice_rows(projected, t, 1) : take_rows(projected, rows);
    state = fused_step(x_t, state.h, state.c, f, p);
    outputs[t] = state.h;
  }
  return outputs;
}

std::vector<Var> gru_sequence(Var inputs, std::size_t batch, std::size_t length, const GruParams& p) {
  if (inputs.value().rows() != batch * length) {
    throw DimensionError("gru_sequence: " + shape_string(inputs.shape()) + " is not " + std::to_string(batch) +
                         " sequences of length " + std::to_string(length));
  }
  const std::size_t hidden = p.w_rh.value().rows();
  Var h = zeros_state(inputs.tape(), batch, hidden);
  std::vector<Var> outputs(length);
  for (std::size_t t = 0; t < length; ++t) {
    const auto rows = step_rows(batch, length, t);
    h = gru_cell_step(take_rows(inputs, rows), h, p);
    outputs[t] = h;
  }
  return outputs;
}

Var bilstm_forward(Var embeddings, const LstmDirectionParams& forward, const LstmDirectionParams& backward) {
  const std::size_t length = embeddings.value().rows();
  const auto fwd = lstm_sequence(embeddings, 1, length, forward, false);
  const auto bwd = lstm_sequence(embeddings, 1, length, backward, true);
  std::vector<Var> rows(length);
  for (std::size_t t = 0; t < length; ++t) rows[t] = concat(fwd[t], bwd[t], 1);
  return length == 1 ? rows[0] : concat(rows, 0);
}

void init_head_params(const HeadConfig& config, ParamStore& params) {
  config.validate();
  std::uint64_t counter = 0;
  auto weight = [&](const std::string& name, Shape shape) {
    params.add(name, xavier_init(shape, mix_seed(config.seed, ++counter)));
  };
  auto zeros = [&](const std::string& name, std::size_t n) { params.add(name, Tensor({n})); };
  const std::size_t d = config.input_dim, h = config.hidden_units;

  auto lstm_direction = [&](const std::string& prefix) {
    for (const char gate : {'i', 'f', 'c', 'o'}) {
      weight(prefix + "w_" + gate + "x", {d, h});
      weight(prefix + "w_" + gate + "h", {h, h});
      zeros(prefix + "b_" + gate, h);
    }
    if (config.peephole) {
      for (const char* peep : {"p_i", "p_f", "p_o"}) zeros(prefix + peep, h);
    }
  };

  switch (config.variant) {
    case HeadVariant::BiLstm:
      lstm_direction("head.bilstm.fwd.");
      lstm_direction("head.bilstm.bwd.");
      break;
    case HeadVariant::Lstm:
      lstm_direction("head.lstm.fwd.");
      break;
    case HeadVariant::Gru:
      for (const char gate : {'r', 'z', 'n'}) {
        weight(std::string("head.gru.w_") + gate + "x", {d, h});
        weight(std::string("head.gru.w_") + gate + "h", {h, h});
        zeros(std::string("head.gru.b_") + gate, h);
      }
      break;
    case HeadVariant::None:
      break;
  }
  const std::size_t flat = config.max_len * config.recurrent_width();
  weight("head.dense1.w", {flat, config.dense1_units});
  zeros("head.dense1.b", config.dense1_units);
  weight("head.dense2.w", {config.dense1_units, config.num_classes});
  zeros("head.dense2.b", config.num_classes);
}

std::vector<Var> recurrent_layer(Tape& tape, ParamStore& params, const HeadConfig& config, Var inputs,
                                 std::size_t batch, std::size_t length) {
  const std::string prefix = variant_prefix(config.variant);
  switch (config.variant) {
    case HeadVariant::BiLstm: {
      const auto fwd = lstm_sequence(inputs, batch, length,
                                     LstmDirectionParams::bind(tape, params, prefix + "fwd.", config.peephole), false);
      const auto bwd = lstm_sequence(inputs, batch, length,
                                     LstmDirectionParams::bind(tape, params, prefix + "bwd.", config.peephole), true);
      std::vector<Var> out(length);
      for (std::size_t t = 0; t < length; ++t) out[t] = concat(fwd[t], bwd[t], 1);
      return out;
    }
    case HeadVariant::Lstm:
      return lstm_sequence(inputs, batch, length,
                           LstmDirectionParams::bind(tape, params, prefix + "fwd.", config.peephole), false);
    case HeadVariant::Gru:
      return gru_sequence(inputs, batch, length, GruParams::bind(tape, params, prefix));
    case HeadVariant::None: {
      std::vector<Var> out(length);
      for (std::size_t t = 0; t < length; ++t) out[t] = take_rows(inputs, step_rows(batch, length, t));
      return out;
    }
  }
  throw ConfigError("unhandled head variant");
}

Var head_forward(Tape& tape, ParamStore& params, const HeadConfig& config, Var encoded, const TokenBatch& tokens,
                 bool training, std::uint64_t seed) {
  if (tokens.length != config.max_len) {
    throw DimensionError("head expects sequences of length " + std::to_string(config.max_len) + ", got " +
                         std::to_string(tokens.length));
  }
  if (encoded.value().cols() != config.input_dim || encoded.value().rows() != tokens.batch * tokens.length) {
    throw DimensionError("head input " + shape_string(encoded.shape()) + " does not match batch " +
                         std::to_string(tokens.batch) + " x " + std::to_string(tokens.length) + " x " +
                         std::to_string(config.input_dim));
  }
  Var x = dropout(encoded, config.dropout_rate, training, mix_seed(seed, 0x4eadULL));
  std::vector<Var> steps = recurrent_layer(tape, params, config, x, tokens.batch, tokens.length);

  // Zeroing padded rows, then laying the rows of each sequence side by side,
  // is the per-sequence flatten of the l x width matrix.
  std::vector<double> keep(tokens.batch);
  for (std::size_t t = 0; t < tokens.length; ++t) {
    for (std::size_t b = 0; b < tokens.batch; ++b) keep[b] = tokens.mask[b * tokens.length + t];
    steps[t] = scale_rows(steps[t], keep);
  }
  Var flat = steps.size() == 1 ? steps[0] : concat(steps, 1);

  Var hidden = tanh_act(dense(flat, params.bind(tape, "head.dense1.w"), params.bind(tape, "head.dense1.b")));
  Var logits = dense(hidden, params.bind(tape, "head.dense2.w"), params.bind(tape, "head.dense2.b"));
  return softmax_rows(logits);
}

std::size_t predict_class(std::span<const double> probs) {
  if (probs.empty()) throw ContractError("predict_class on an empty probability vector");
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

}  // namespace senti
