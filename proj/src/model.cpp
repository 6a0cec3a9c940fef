#include "senti/model.hpp"

#include "senti/rng.hpp"

namespace senti {

void ModelConfig::validate() const {
  encoder.validate();
  head.validate();
  if (head.input_dim != encoder.d_model) {
    throw ConfigError("head input_dim " + std::to_string(head.input_dim) + " differs from encoder d_model " +
                      std::to_string(encoder.d_model));
  }
  if (head.max_len != encoder.max_len) {
    throw ConfigError("head max_len " + std::to_string(head.max_len) + " differs from encoder max_len " +
                      std::to_string(encoder.max_len));
  }
}

SentimentModel::SentimentModel(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  init_encoder_params(config_.encoder, params_);
  init_head_params(config_.head, params_);
}

Var SentimentModel::forward(Tape& tape, const TokenBatch& tokens, bool training, std::uint64_t seed) {
  Var encoded = encoder_forward(tape, params_, config_.encoder, tokens, training, mix_seed(seed, 1));
  return head_forward(tape, params_, config_.head, encoded, tokens, training, mix_seed(seed, 2));
}

Tensor SentimentModel::predict_proba(const TokenBatch& tokens) {
  Tape tape;
  return forward(tape, tokens, false, 0).value();
}

}  // namespace senti
