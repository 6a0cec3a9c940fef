#include "senti/encoder.hpp"

#include <cmath>

#include "senti/rng.hpp"

namespace senti {

namespace {

std::string layer_prefix(std::size_t layer) { return "encoder.layer" + std::to_string(layer) + "."; }

}  // namespace

TokenBatch TokenBatch::from(std::span<const EncodedSequence> sequences) {
  std::vector<std::size_t> order(sequences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  return from(sequences, order);
}

TokenBatch TokenBatch::from(std::span<const EncodedSequence> sequences, std::span<const std::size_t> order) {
  if (order.empty()) throw DimensionError("empty token batch");
  TokenBatch tb;
  tb.batch = order.size();
  tb.length = sequences[order[0]].input_ids.size();
  tb.ids.reserve(tb.batch * tb.length);
  tb.mask.reserve(tb.batch * tb.length);
  for (std::size_t i : order) {
    const EncodedSequence& s = sequences[i];
    if (s.input_ids.size() != tb.length || s.attention_mask.size() != tb.length) {
      throw DimensionError("sequences in a batch must share one length");
    }
    tb.ids.insert(tb.ids.end(), s.input_ids.begin(), s.input_ids.end());
    for (int m : s.attention_mask) tb.mask.push_back(m ? 1.0 : 0.0);
    tb.labels.push_back(s.label);
  }
  return tb;
}

void EncoderConfig::validate() const {
  if (vocab_size == 0 || d_model == 0 || num_layers == 0 || num_heads == 0 || ffn_dim == 0 || max_len == 0) {
    throw ConfigError("encoder dimensions must be positive");
  }
  if (d_model % num_heads != 0) {
    throw ConfigError("d_model " + std::to_string(d_model) + " is not divisible by num_heads " +
                      std::to_string(num_heads));
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("encoder dropout_rate must lie in [0, 1)");
}

void init_encoder_params(const EncoderConfig& config, ParamStore& params) {
  config.validate();
  const std::size_t d = config.d_model;
  std::uint64_t counter = 0;
  auto weight = [&](const std::string& name, Shape shape) {
    params.add(name, xavier_init(shape, mix_seed(config.seed, ++counter)));
  };
  auto zeros = [&](const std::string& name, std::size_t n) { params.add(name, Tensor({n})); };
  auto ones = [&](const std::string& name, std::size_t n) { params.add(name, Tensor({n}, 1.0)); };

  weight("encoder.tok_embed", {config.vocab_size, d});
  weight("encoder.pos_embed", {config.max_len, d});
  for (std::size_t layer = 0; layer < config.num_layers; ++layer) {
    const std::string p = layer_prefix(layer);
    for (const char* proj : {"wq", "wk", "wv", "wo"}) {
      weight(p + "attn." + proj, {d, d});
      zeros(p + "attn.b" + std::string(proj).substr(1), d);
    }
    ones(p + "ln1.gamma", d);
    zeros(p + "ln1.beta", d);
    weight(p + "ffn.w1", {d, config.ffn_dim});
    zeros(p + "ffn.b1", config.ffn_dim);
    weight(p + "ffn.w2", {config.ffn_dim, d});
    zeros(p + "ffn.b2", d);
    ones(p + "ln2.gamma", d);
    zeros(p + "ln2.beta", d);
  }
}

Var embed(Tape& tape, ParamStore& params, const EncoderConfig& config, const TokenBatch& tokens) {
  if (tokens.length > config.max_len) {
    throw DimensionError("sequence length " + std::to_string(tokens.length) + " exceeds max_len " +
                         std::to_string(config.max_len));
  }
  for (std::size_t id : tokens.ids) {
    if (id >= config.vocab_size) {
      throw LookupError("token id " + std::to_string(id) + " outside vocabulary of size " +
                        std::to_string(config.vocab_size));
    }
  }
  std::vector<std::size_t> positions(tokens.ids.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i % tokens.length;
  Var tok = take_rows(params.bind(tape, "encoder.tok_embed"), tokens.ids);
  Var pos = take_rows(params.bind(tape, "encoder.pos_embed"), positions);
  return tok + pos;
}

Var scaled_dot_product_attention(Var q, Var k, Var v, std::span<const double> key_mask) {
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(q.value().cols()));
  Var scores = scale(matmul(q, transpose(k)), inv_sqrt);
  return matmul(masked_softmax_rows(scores, key_mask), v);
}

Var self_attention(Tape& tape, ParamStore& params, const EncoderConfig& config, std::size_t layer, Var x,
                   const TokenBatch& tokens) {
  const std::string p = layer_prefix(layer) + "attn.";
  const std::size_t d_head = config.d_model / config.num_heads;
  Var q = dense(x, params.bind(tape, p + "wq"), params.bind(tape, p + "bq"));
  Var k = dense(x, params.bind(tape, p + "wk"), params.bind(tape, p + "bk"));
  Var v = dense(x, params.bind(tape, p + "wv"), params.bind(tape, p + "bv"));

  std::vector<Var> sequences;
  sequences.reserve(tokens.batch);
  std::vector<Var> heads(config.num_heads);
  for (std::size_t b = 0; b < tokens.batch; ++b) {
    Var qb = slice_rows(q, b * tokens.length, tokens.length);
    Var kb = slice_rows(k, b * tokens.length, tokens.length);
    Var vb = slice_rows(v, b * tokens.length, tokens.length);
    for (std::size_t h = 0; h < config.num_heads; ++h) {
      heads[h] = scaled_dot_product_attention(slice_cols(qb, h * d_head, d_head), slice_cols(kb, h * d_head, d_head),
                                              slice_cols(vb, h * d_head, d_head), tokens.sequence_mask(b));
    }
    sequences.push_back(heads.size() == 1 ? heads[0] : concat(heads, 1));
  }
  Var merged = sequences.size() == 1 ? sequences[0] : concat(sequences, 0);
  return dense(merged, params.bind(tape, p + "wo"), params.bind(tape, p + "bo"));
}

Var encoder_forward(Tape& tape, ParamStore& params, const EncoderConfig& config, const TokenBatch& tokens,
                    bool training, std::uint64_t seed) {
  Var x = embed(tape, params, config, tokens);
  for (std::size_t layer = 0; layer < config.num_layers; ++layer) {
    const std::string p = layer_prefix(layer);
    Var attn = dropout(self_attention(tape, params, config, layer, x, tokens), config.dropout_rate, training,
                       mix_seed(seed, 2 * layer));
    x = layer_norm(x + attn, params.bind(tape, p + "ln1.gamma"), params.bind(tape, p + "ln1.beta"));
    Var hidden = gelu(dense(x, params.bind(tape, p + "ffn.w1"), params.bind(tape, p + "ffn.b1")));
    Var ffn = dropout(dense(hidden, params.bind(tape, p + "ffn.w2"), params.bind(tape, p + "ffn.b2")),
                      config.dropout_rate, training, mix_seed(seed, 2 * layer + 1));
    x = layer_norm(x + ffn, params.bind(tape, p + "ln2.gamma"), params.bind(tape, p + "ln2.beta"));
  }
  return x;
}

}  // namespace senti
