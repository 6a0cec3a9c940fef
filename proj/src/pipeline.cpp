#include "senti/pipeline.hpp"

#include "senti/encoder.hpp"
#include "senti/error.hpp"

namespace senti {

Preprocessor make_preprocessor(const PreprocessConfig& config) {
  PreprocessOptions options;
  if (!config.stopwords_file.empty()) options.stopwords = load_stopwords(config.stopwords_file);
  options.keep_hashtag_words = config.keep_hashtag_words;
  Lemmatizer lemmatizer;
  if (!config.lemma_exceptions.empty()) lemmatizer.load_exceptions(config.lemma_exceptions);
  return Preprocessor(std::move(options), std::move(lemmatizer));
}

std::vector<CleanDocument> clean_documents(const Preprocessor& pre, const std::vector<RawDocument>& docs,
                                           const std::vector<std::string>& class_names, CleanStats* stats) {
  std::vector<CleanDocument> out;
  out.reserve(docs.size());
  CleanStats local;
  for (const auto& d : docs) {
    ++local.documents_in;
    auto result = pre.run(d, class_names);
    if (auto* clean = std::get_if<CleanDocument>(&result)) {
      out.push_back(std::move(*clean));
      ++local.kept;
    } else {
      ++local.dropped_empty;
    }
  }
  if (stats != nullptr) *stats = local;
  return out;
}

std::vector<EncodedSequence> encode_all(const std::vector<CleanDocument>& docs, const Vocabulary& vocab,
                                        std::size_t max_len) {
  std::vector<EncodedSequence> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(encode(d, vocab, max_len));
  return out;
}

PreparedData prepare(const RunConfig& config, std::vector<CleanDocument> docs) {
  PreparedData data;
  data.class_names = config.dataset.class_names;
  data.splits = split_dataset(std::move(docs), data.class_names.size(), config.split);
  data.train_counts_before = class_counts(data.splits.train.docs, data.class_names.size());
  if (config.augment) {
    data.plan = make_balance_plan(data.splits.train, data.class_names, mix_seed(config.hp.seed, 0xa06));
    data.splits.train = apply_plan(data.splits.train, *data.plan);
  }
  data.vocab = Vocabulary::build(data.splits.train, config.preprocess.min_freq, config.preprocess.max_vocab);
  const std::size_t max_len = config.preprocess.max_len;
  data.encoded.class_names = data.class_names;
  data.encoded.train = encode_all(data.splits.train.docs, data.vocab, max_len);
  data.encoded.validation = encode_all(data.splits.validation.docs, data.vocab, max_len);
  data.encoded.test = encode_all(data.splits.test.docs, data.vocab, max_len);
  return data;
}

TrainOutcome train_model(const RunConfig& config, const PreparedData& data, const nlohmann::json& manifest,
                         const EpochCallback& on_epoch) {
  const ModelConfig model_config = config.model_config(data.vocab.size());
  SentimentModel model(model_config);
  TrainOutcome out;
  out.report = train(model, data.encoded, config.hp, on_epoch);
  out.checkpoint.config = model_config;
  out.checkpoint.vocab = data.vocab;
  out.checkpoint.class_names = data.class_names;
  out.checkpoint.params = model.params();
  out.checkpoint.manifest = manifest;
  return out;
}

std::vector<Prediction> predict(SentimentModel& model, const Vocabulary& vocab, const Preprocessor& pre,
                                const std::vector<std::string>& texts) {
  std::vector<Prediction> out;
  const std::size_t max_len = model.config().encoder.max_len;
  for (const auto& text : texts) {
    CleanDocument doc{pre.clean_words(text), 0};
    const EncodedSequence seq = encode(doc, vocab, max_len);
    const TokenBatch tokens = TokenBatch::from(std::span<const EncodedSequence>(&seq, 1));
    const Tensor probs = model.predict_proba(tokens);
    Prediction p;
    p.probabilities.assign(probs.data().begin(), probs.data().end());
    p.label = predict_class(p.probabilities);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace senti
