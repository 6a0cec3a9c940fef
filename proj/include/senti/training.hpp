#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "senti/head.hpp"
#include "senti/metrics.hpp"
#include "senti/model.hpp"
#include "senti/optim.hpp"
#include "senti/rng.hpp"
#include "senti/tokenizer.hpp"

namespace senti {

// The reference fine-tuning grid.
inline const std::vector<double> kGridLearningRates = {1e-4, 1e-5, 1e-6};
inline const std::vector<std::size_t> kGridHiddenUnits = {128, 256, 512};

struct Hyperparameters {
  double learning_rate = 1e-4;
  std::size_t hidden_units = 128;
  std::size_t epochs = 5;
  double dropout = 0.1;
  OptimizerKind optimizer = OptimizerKind::AdamW;
  HeadVariant variant = HeadVariant::BiLstm;
  std::uint64_t seed = 42;
  std::size_t batch_size = 32;

  void validate() const;
  // True when learning rate and hidden units both come from the reference grid.
  bool on_reference_grid() const;
  bool operator==(const Hyperparameters&) const = default;
};

// Copies base with the head variant, hidden units, dropout and seeds taken
// from hp.
ModelConfig configure_model(const ModelConfig& base, const Hyperparameters& hp);

struct SplitSpec {
  double train = 0.90;
  double validation = 0.05;
  double test = 0.05;
  bool stratified = true;
  std::uint64_t seed = 7;

  void validate() const;
};

struct DatasetSplits {
  TaggedSplit train{Split::Train, {}};
  TaggedSplit validation{Split::Validation, {}};
  TaggedSplit test{Split::Test, {}};
  std::vector<std::string> warnings;
};

// Stratified by label: each class is shuffled with its own seed and split by
// largest-remainder rounding of its exact shares, so every per-class count is
// within one item of n * fraction. Classes of three or more members get at
// least one validation and one test item; smaller classes go entirely to
// train with a warning. Needs >= 20 docs.
DatasetSplits split_dataset(std::vector<CleanDocument> docs, std::size_t num_classes, const SplitSpec& spec);

// Picks `limit` items keeping class proportions (largest-remainder rounding),
// returned in their original order. label_of maps an item to its class key.
template <typename T, typename LabelFn>
std::vector<T> stratified_sample(const std::vector<T>& items, std::size_t limit, std::uint64_t seed, LabelFn label_of) {
  if (limit == 0 || limit >= items.size()) return items;
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < items.size(); ++i) by_class[label_of(items[i])].push_back(i);

  struct Quota {
    std::size_t take;
    double remainder;
    std::vector<std::size_t>* members;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (auto& [label, members] : by_class) {
    const double exact = static_cast<double>(limit) * static_cast<double>(members.size()) / static_cast<double>(items.size());
    const auto take = static_cast<std::size_t>(std::floor(exact));
    quotas.push_back({take, exact - static_cast<double>(take), &members});
    assigned += take;
  }
  std::vector<std::size_t> by_remainder(quotas.size());
  for (std::size_t i = 0; i < by_remainder.size(); ++i) by_remainder[i] = i;
  std::stable_sort(by_remainder.begin(), by_remainder.end(),
                   [&](std::size_t a, std::size_t b) { return quotas[a].remainder > quotas[b].remainder; });
  for (std::size_t k = 0; assigned < limit && k < by_remainder.size(); ++k, ++assigned) ++quotas[by_remainder[k]].take;

  std::vector<std::size_t> chosen;
  std::uint64_t cls = 0;
  for (auto& q : quotas) {
    std::vector<std::size_t> members = *q.members;
    Rng(mix_seed(seed, cls++)).shuffle(members.begin(), members.end());
    chosen.insert(chosen.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(std::min(q.take, members.size())));
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<T> out;
  out.reserve(chosen.size());
  for (std::size_t i : chosen) out.push_back(items[i]);
  return out;
}

struct EncodedSplits {
  std::vector<EncodedSequence> train;
  std::vector<EncodedSequence> validation;
  std::vector<EncodedSequence> test;
  std::vector<std::string> class_names;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  MetricsReport train;
  std::optional<MetricsReport> validation;
  double seconds = 0.0;  // wall clock; not part of the serialized report
};

struct TrainReport {
  Hyperparameters hyperparameters;
  std::vector<EpochRecord> history;
  std::optional<MetricsReport> test;

  std::vector<double> epoch_losses() const;
};

// Inference over a split in batches; returns the metrics report.
MetricsReport evaluate(SentimentModel& model, std::span<const EncodedSequence> data,
                       const std::vector<std::string>& class_names, std::size_t batch_size = 64);

// Called after every epoch; lets callers log progress.
using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch training for hp.epochs epochs: the train split is reshuffled per
// epoch from (seed, epoch), each batch runs forward, cross-entropy, backward
// and one optimizer step. After every epoch the train and validation splits
// are evaluated; the test split once at the end. A non-finite loss or
// parameter aborts with DivergenceError.
TrainReport train(SentimentModel& model, const EncodedSplits& data, const Hyperparameters& hp,
                  const EpochCallback& on_epoch = {});

// --- sweeps ------------------------------------------------------------------

struct GridSpec {
  Hyperparameters base;
  std::vector<HeadVariant> variants = {HeadVariant::BiLstm};
  std::vector<double> learning_rates = kGridLearningRates;
  std::vector<std::size_t> hidden_units = kGridHiddenUnits;
  std::vector<OptimizerKind> optimizers = {OptimizerKind::AdamW};

  std::vector<Hyperparameters> expand() const;
};

struct SweepRow {
  HeadVariant variant = HeadVariant::BiLstm;
  double learning_rate = 0.0;
  std::size_t hidden_units = 0;
  OptimizerKind optimizer = OptimizerKind::AdamW;
  Split split = Split::Train;
  double f1_w = 0.0;
  double precision_w = 0.0;
  double recall_w = 0.0;
  double accuracy = 0.0;
  bool zero_denominator = false;
  std::vector<double> epoch_losses;
  std::string error;  // empty when the run succeeded

  bool ok() const noexcept { return error.empty(); }
};

struct BestRun {
  HeadVariant variant = HeadVariant::BiLstm;
  OptimizerKind optimizer = OptimizerKind::AdamW;
  double learning_rate = 0.0;
  std::size_t hidden_units = 0;
  double accuracy = 0.0;
  double f1_w = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // sorted by key, three splits per run
  std::vector<BestRun> best;   // highest test accuracy per variant
};

// Row ordering used by reports: variant, optimizer, learning rate
// (descending), split, hidden units.
bool sweep_row_before(const SweepRow& a, const SweepRow& b);

// Rows for one finished (or failed) run.
std::vector<SweepRow> rows_for_run(const Hyperparameters& hp, const TrainReport* report, const std::string& error);

// Trains one model per grid point. A failed run is recorded with its error and
// the sweep carries on. jobs > 1 trains grid points on worker threads; the
// merged report does not depend on completion order.
SweepReport sweep(const EncodedSplits& data, const ModelConfig& base, std::span<const Hyperparameters> grid,
                  std::size_t jobs = 1, const std::function<void(const Hyperparameters&, const std::string&)>& on_run = {});

void finalize_sweep(SweepReport& report);

}  // namespace senti
