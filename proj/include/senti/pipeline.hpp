#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "senti/augment.hpp"
#include "senti/checkpoint.hpp"
#include "senti/config.hpp"
#include "senti/preprocess.hpp"
#include "senti/tokenizer.hpp"
#include "senti/training.hpp"

namespace senti {

Preprocessor make_preprocessor(const PreprocessConfig& config);

struct CleanStats {
  std::size_t documents_in = 0;
  std::size_t kept = 0;
  std::size_t dropped_empty = 0;
};

// Runs the preprocessor over raw documents; dropped documents are counted.
std::vector<CleanDocument> clean_documents(const Preprocessor& pre, const std::vector<RawDocument>& docs,
                                           const std::vector<std::string>& class_names, CleanStats* stats = nullptr);

std::vector<EncodedSequence> encode_all(const std::vector<CleanDocument>& docs, const Vocabulary& vocab,
                                        std::size_t max_len);

struct PreparedData {
  std::vector<std::string> class_names;
  DatasetSplits splits;  // train already augmented when a plan is present
  std::optional<AugmentPlan> plan;
  std::vector<std::size_t> train_counts_before;
  Vocabulary vocab;
  EncodedSplits encoded;
};

// split -> optional train-split augmentation -> vocabulary from the train
// split -> encoding.
PreparedData prepare(const RunConfig& config, std::vector<CleanDocument> docs);

struct TrainOutcome {
  TrainReport report;
  Checkpoint checkpoint;
};

TrainOutcome train_model(const RunConfig& config, const PreparedData& data, const nlohmann::json& manifest,
                         const EpochCallback& on_epoch = {});

struct Prediction {
  std::size_t label = 0;
  std::vector<double> probabilities;
};

std::vector<Prediction> predict(SentimentModel& model, const Vocabulary& vocab, const Preprocessor& pre,
                                const std::vector<std::string>& texts);

}  // namespace senti
