#pragma once

#include <string>
#include <vector>

#include "senti/model.hpp"
#include "senti/preprocess.hpp"
#include "senti/synthetic.hpp"
#include "senti/tokenizer.hpp"
#include "senti/training.hpp"

namespace senti::testing {

struct SmallTask {
  EncodedSplits data;
  Vocabulary vocab;
  ModelConfig base;
};

struct SmallTaskOptions {
  std::size_t size = 200;
  std::size_t classes = 2;
  double signal = 1.0;
  std::size_t max_len = 12;
  std::size_t d_model = 16;
  std::size_t num_layers = 1;
  std::size_t num_heads = 2;
  std::size_t hidden = 8;
  std::uint64_t seed = 1;
};

// Keyword-labelled synthetic corpus, cleaned, split, and encoded, plus a
// small model configuration sized for it.
inline SmallTask small_task(const SmallTaskOptions& o = {}) {
  SyntheticOptions syn;
  syn.size = o.size;
  syn.class_weights.assign(o.classes, 1.0);
  syn.signal = o.signal;
  syn.seed = o.seed;
  const auto names = synthetic_class_names(o.classes);
  const Preprocessor pre;
  std::vector<CleanDocument> docs;
  for (const auto& raw : synthetic_corpus(syn)) {
    auto r = pre.run(raw, names);
    if (auto* d = std::get_if<CleanDocument>(&r)) docs.push_back(std::move(*d));
  }
  const auto splits = split_dataset(std::move(docs), o.classes, SplitSpec{});

  SmallTask task;
  task.vocab = Vocabulary::build(splits.train);
  task.data.class_names = names;
  for (const auto& d : splits.train.docs) task.data.train.push_back(encode(d, task.vocab, o.max_len));
  for (const auto& d : splits.validation.docs) task.data.validation.push_back(encode(d, task.vocab, o.max_len));
  for (const auto& d : splits.test.docs) task.data.test.push_back(encode(d, task.vocab, o.max_len));

  auto& enc = task.base.encoder;
  enc.vocab_size = task.vocab.size();
  enc.d_model = o.d_model;
  enc.num_layers = o.num_layers;
  enc.num_heads = o.num_heads;
  enc.ffn_dim = 2 * o.d_model;
  enc.max_len = o.max_len;
  auto& head = task.base.head;
  head.input_dim = o.d_model;
  head.hidden_units = o.hidden;
  head.dense1_units = 16;
  head.num_classes = o.classes;
  head.max_len = o.max_len;
  return task;
}

inline Hyperparameters small_hp(std::size_t hidden = 8, std::size_t epochs = 3) {
  Hyperparameters hp;
  hp.learning_rate = 3e-3;
  hp.hidden_units = hidden;
  hp.epochs = epochs;
  hp.batch_size = 16;
  return hp;
}

}  // namespace senti::testing
