#include "senti/training.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "senti/error.hpp"

namespace senti {

void Hyperparameters::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ParameterError("learning rate must be positive and finite, got " + std::to_string(learning_rate));
  }
  if (hidden_units == 0) throw ParameterError("hidden units must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw ParameterError("dropout must lie in [0, 1)");
  if (batch_size == 0) throw ParameterError("batch size must be positive");
}

bool Hyperparameters::on_reference_grid() const {
  const bool lr_ok = std::find(kGridLearningRates.begin(), kGridLearningRates.end(), learning_rate) != kGridLearningRates.end();
  const bool h_ok = std::find(kGridHiddenUnits.begin(), kGridHiddenUnits.end(), hidden_units) != kGridHiddenUnits.end();
  return lr_ok && h_ok;
}

ModelConfig configure_model(const ModelConfig& base, const Hyperparameters& hp) {
  ModelConfig cfg = base;
  cfg.head.variant = hp.variant;
  cfg.head.hidden_units = hp.hidden_units;
  cfg.head.dropout_rate = hp.dropout;
  cfg.encoder.dropout_rate = hp.dropout;
  cfg.encoder.seed = mix_seed(hp.seed, 0xe7c0);
  cfg.head.seed = mix_seed(hp.seed, 0x4ead);
  return cfg;
}

void SplitSpec::validate() const {
  if (train < 0.0 || validation < 0.0 || test < 0.0) throw ParameterError("split fractions must be non-negative");
  if (std::abs(train + validation + test - 1.0) > 1e-9) throw ParameterError("split fractions must sum to 1");
}

namespace {

// Largest-remainder allocation of n items over train/validation/test, so
// each count is the floor or the ceiling of its exact share. Remainder ties
// go to train first.
std::array<std::size_t, 3> apportion(std::size_t n, const SplitSpec& spec) {
  const std::array<double, 3> fractions{spec.train, spec.validation, spec.test};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    const double exact = static_cast<double>(n) * fractions[s];
    counts[s] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainders[s] = exact - static_cast<double>(counts[s]);
    assigned += counts[s];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[order[k % 3]];
  return counts;
}

void allocate_group(std::vector<CleanDocument>& group, const SplitSpec& spec, std::uint64_t group_seed,
                    bool min_one, DatasetSplits& out) {
  Rng(group_seed).shuffle(group.begin(), group.end());
  const std::size_t n = group.size();
  auto [n_train, n_val, n_test] = apportion(n, spec);
  if (min_one) {
    if (spec.validation > 0.0 && n_val == 0 && n_train > 1) --n_train, ++n_val;
    if (spec.test > 0.0 && n_test == 0 && n_train > 1) --n_train, ++n_test;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_val) {
      out.validation.docs.push_back(std::move(group[i]));
    } else if (i < n_val + n_test) {
      out.test.docs.push_back(std::move(group[i]));
    } else {
      out.train.docs.push_back(std::move(group[i]));
    }
  }
}

}  // namespace

DatasetSplits split_dataset(std::vector<CleanDocument> docs, std::size_t num_classes, const SplitSpec& spec) {
  spec.validate();
  if (docs.size() < 20) {
    throw ContractError("dataset needs at least 20 documents to split, got " + std::to_string(docs.size()));
  }
  DatasetSplits out;
  if (!spec.stratified) {
    allocate_group(docs, spec, mix_seed(spec.seed, 0), false, out);
  } else {
    std::vector<std::vector<CleanDocument>> by_class(num_classes);
    for (auto& d : docs) {
      if (d.label >= num_classes) {
        throw ContractError("label " + std::to_string(d.label) + " out of range for " + std::to_string(num_classes) +
                            " classes");
      }
      by_class[d.label].push_back(std::move(d));
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      auto& group = by_class[c];
      if (group.empty()) continue;
      if (group.size() < 3) {
        out.warnings.push_back("class " + std::to_string(c) + " has only " + std::to_string(group.size()) +
                               " member(s); all assigned to train");
        for (auto& d : group) out.train.docs.push_back(std::move(d));
        continue;
      }
      allocate_group(group, spec, mix_seed(spec.seed, c + 1), true, out);
    }
  }
  // Interleave classes so split order carries no label structure.
  Rng(mix_seed(spec.seed, 0x7a11)).shuffle(out.train.docs.begin(), out.train.docs.end());
  Rng(mix_seed(spec.seed, 0x7a12)).shuffle(out.validation.docs.begin(), out.validation.docs.end());
  Rng(mix_seed(spec.seed, 0x7a13)).shuffle(out.test.docs.begin(), out.test.docs.end());
  return out;
}

std::vector<double> TrainReport::epoch_losses() const {
  std::vector<double> out;
  out.reserve(history.size());
  for (const auto& e : history) out.push_back(e.train_loss);
  return out;
}

MetricsReport evaluate(SentimentModel& model, std::span<const EncodedSequence> data,
                       const std::vector<std::string>& class_names, std::size_t batch_size) {
  ConfusionMatrix cm(class_names);
  for (std::size_t first = 0; first < data.size(); first += batch_size) {
    const std::size_t count = std::min(batch_size, data.size() - first);
    const TokenBatch tokens = TokenBatch::from(data.subspan(first, count));
    const Tensor probs = model.predict_proba(tokens);
    for (std::size_t b = 0; b < count; ++b) {
      const std::span<const double> row(probs.data().data() + b * probs.cols(), probs.cols());
      cm.accumulate(tokens.labels[b], predict_class(row));
    }
  }
  return make_report(cm);
}

namespace {

bool params_finite(const ParamStore& params) {
  for (const auto& [name, p] : params.items()) {
    if (!all_finite(p.value)) return false;
  }
  return true;
}

std::string lr_text(double lr) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", lr);
  return buf;
}

}  // namespace

TrainReport train(SentimentModel& model, const EncodedSplits& data, const Hyperparameters& hp,
                  const EpochCallback& on_epoch) {
  hp.validate();
  if (data.train.empty()) throw ContractError("train split is empty");
  TrainReport report;
  report.hyperparameters = hp;

  auto optimizer = make_optimizer(hp.optimizer, hp.learning_rate);
  std::vector<std::size_t> order(data.train.size());
  std::uint64_t step = 0;

  for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng(mix_seed(hp.seed, epoch)).shuffle(order.begin(), order.end());

    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t first = 0; first < order.size(); first += hp.batch_size, ++batch_index) {
      const std::size_t count = std::min(hp.batch_size, order.size() - first);
      const TokenBatch tokens =
          TokenBatch::from(data.train, std::span<const std::size_t>(order).subspan(first, count));

      Tape tape;
      const Var probs = model.forward(tape, tokens, true, mix_seed(hp.seed ^ 0xba7c4ULL, step++));
      const Var loss = cross_entropy(probs, tokens.labels);
      const double loss_value = loss.value().data()[0];
      if (!std::isfinite(loss_value)) {
        throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                              std::to_string(batch_index) + " (lr=" + lr_text(hp.learning_rate) + ")");
      }
      model.params().zero_grad();
      tape.backward(loss);
      optimizer->step(model.params());
      if (!params_finite(model.params())) {
        throw DivergenceError("non-finite parameters after epoch " + std::to_string(epoch) + " batch " +
                              std::to_string(batch_index) + " (lr=" + lr_text(hp.learning_rate) + ")");
      }
      loss_sum += loss_value * static_cast<double>(count);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(order.size());
    record.train = evaluate(model, data.train, data.class_names);
    if (!data.validation.empty()) record.validation = evaluate(model, data.validation, data.class_names);
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (on_epoch) on_epoch(record);
    report.history.push_back(std::move(record));
  }

  if (!data.test.empty()) report.test = evaluate(model, data.test, data.class_names);
  return report;
}

// --- sweeps ------------------------------------------------------------------

std::vector<Hyperparameters> GridSpec::expand() const {
  std::vector<Hyperparameters> out;
  for (HeadVariant v : variants) {
    for (OptimizerKind o : optimizers) {
      for (double lr : learning_rates) {
        for (std::size_t h : hidden_units) {
          Hyperparameters hp = base;
          hp.variant = v;
          hp.optimizer = o;
          hp.learning_rate = lr;
          hp.hidden_units = h;
          out.push_back(hp);
        }
      }
    }
  }
  return out;
}

bool sweep_row_before(const SweepRow& a, const SweepRow& b) {
  if (a.variant != b.variant) return a.variant < b.variant;
  if (a.optimizer != b.optimizer) return a.optimizer < b.optimizer;
  if (a.learning_rate != b.learning_rate) return a.learning_rate > b.learning_rate;
  if (a.split != b.split) return a.split < b.split;
  return a.hidden_units < b.hidden_units;
}

std::vector<SweepRow> rows_for_run(const Hyperparameters& hp, const TrainReport* report, const std::string& error) {
  std::vector<SweepRow> rows;
  for (Split split : {Split::Train, Split::Validation, Split::Test}) {
    SweepRow row;
    row.variant = hp.variant;
    row.learning_rate = hp.learning_rate;
    row.hidden_units = hp.hidden_units;
    row.optimizer = hp.optimizer;
    row.split = split;
    row.error = error;
    const MetricsReport* m = nullptr;
    if (report != nullptr) {
      row.epoch_losses = report->epoch_losses();
      if (!report->history.empty()) {
        if (split == Split::Train) m = &report->history.back().train;
        if (split == Split::Validation && report->history.back().validation) m = &*report->history.back().validation;
      }
      if (split == Split::Test && report->test) m = &*report->test;
    }
    if (m != nullptr) {
      row.f1_w = m->f1_w;
      row.precision_w = m->precision_w;
      row.recall_w = m->recall_w;
      row.accuracy = m->accuracy;
      row.zero_denominator = m->zero_denominator;
    } else if (row.error.empty()) {
      row.error = std::string("no ") + split_name(split) + " metrics";
    }
    if (!row.ok()) row.f1_w = row.precision_w = row.recall_w = row.accuracy = std::nan("");
    rows.push_back(std::move(row));
  }
  return rows;
}

void finalize_sweep(SweepReport& report) {
  std::stable_sort(report.rows.begin(), report.rows.end(), sweep_row_before);
  report.best.clear();
  for (const auto& row : report.rows) {
    if (row.split != Split::Test || !row.ok()) continue;
    auto it = std::find_if(report.best.begin(), report.best.end(),
                           [&](const BestRun& b) { return b.variant == row.variant; });
    if (it == report.best.end()) {
      report.best.push_back({row.variant, row.optimizer, row.learning_rate, row.hidden_units, row.accuracy, row.f1_w});
    } else if (row.accuracy > it->accuracy) {
      *it = {row.variant, row.optimizer, row.learning_rate, row.hidden_units, row.accuracy, row.f1_w};
    }
  }
}

SweepReport sweep(const EncodedSplits& data, const ModelConfig& base, std::span<const Hyperparameters> grid,
                  std::size_t jobs, const std::function<void(const Hyperparameters&, const std::string&)>& on_run) {
  if (grid.empty()) throw ContractError("sweep grid is empty");
  std::vector<std::vector<SweepRow>> results(grid.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      const Hyperparameters& hp = grid[i];
      std::string error;
      std::optional<TrainReport> report;
      try {
        SentimentModel model(configure_model(base, hp));
        report = train(model, data, hp);
      } catch (const Error& e) {
        error = std::string(e.kind()) + ": " + e.what();
      } catch (const std::exception& e) {
        error = e.what();
      }
      results[i] = rows_for_run(hp, report ? &*report : nullptr, error);
      if (on_run) {
        std::lock_guard lock(callback_mutex);
        on_run(hp, error);
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, grid.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepReport report;
  for (auto& rows : results) report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  finalize_sweep(report);
  return report;
}

}  // namespace senti
