#include <algorithm>
#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "senti/error.hpp"
#include "senti/reports.hpp"
#include "senti/training.hpp"
#include "support/fixtures.hpp"
#include "support/gradcheck.hpp"

using namespace senti;
using senti::testing::random_tensor;
using senti::testing::small_hp;
using senti::testing::small_task;

namespace {

double loss_of(const Tensor& probs, const std::vector<std::size_t>& labels) {
  Tape tape;
  return cross_entropy(tape.constant(probs), labels).value()[0];
}

std::vector<CleanDocument> labelled_docs(const std::vector<std::size_t>& per_class) {
  std::vector<CleanDocument> docs;
  std::size_t id = 0;
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    for (std::size_t i = 0; i < per_class[c]; ++i) docs.push_back({{"doc" + std::to_string(id++)}, c});
  }
  return docs;
}

std::map<std::size_t, std::size_t> label_counts(const TaggedSplit& s) {
  std::map<std::size_t, std::size_t> out;
  for (const auto& d : s.docs) ++out[d.label];
  return out;
}

ParamStore scalar_store(double value, double grad) {
  ParamStore ps;
  ps.add("w", Tensor({1}, value));
  ps.at("w").grad = Tensor({1}, grad);
  return ps;
}

void expect_same_metrics(const SweepRow& a, const SweepRow& b) {
  EXPECT_EQ(a.variant, b.variant);
  EXPECT_EQ(a.learning_rate, b.learning_rate);
  EXPECT_EQ(a.hidden_units, b.hidden_units);
  EXPECT_EQ(a.optimizer, b.optimizer);
  EXPECT_EQ(a.split, b.split);
  EXPECT_EQ(a.error, b.error);
  EXPECT_EQ(a.zero_denominator, b.zero_denominator);
  for (auto [x, y] : {std::pair{a.f1_w, b.f1_w}, {a.precision_w, b.precision_w}, {a.recall_w, b.recall_w},
                      {a.accuracy, b.accuracy}}) {
    if (std::isnan(x)) {
      EXPECT_TRUE(std::isnan(y));
    } else {
      EXPECT_EQ(x, y);
    }
  }
}

}  // namespace

// --- loss -------------------------------------------------------------------

TEST(CrossEntropy, Examples) {
  EXPECT_EQ(loss_of(Tensor({1, 3}, {0.0, 1.0, 0.0}), {1}), 0.0);
  EXPECT_NEAR(loss_of(Tensor({1, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}), {2}), std::log(3.0), 1e-15);
  EXPECT_NEAR(loss_of(Tensor({1, 2}, {1.0, 0.0}), {1}), -std::log(1e-12), 1e-9);
  EXPECT_THROW(loss_of(Tensor({1, 2}, {0.5, 0.5}), {2}), LookupError);
  EXPECT_THROW(loss_of(Tensor({2, 2}, {0.5, 0.5, 0.5, 0.5}), {0}), DimensionError);
}

TEST(CrossEntropy, PropertyMatchesScalarSum) {
  Rng gen(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t b = 1 + gen.below(10), m = 2 + gen.below(4);
    Tape tape;
    const Tensor probs = softmax_rows(tape.constant(random_tensor({b, m}, 50 + trial, -5, 5))).value();
    std::vector<std::size_t> labels(b);
    for (auto& l : labels) l = gen.below(m);
    double oracle = 0;
    for (std::size_t i = 0; i < b; ++i) oracle += -std::log(probs.at(i, labels[i]));
    EXPECT_NEAR(loss_of(probs, labels), oracle / static_cast<double>(b), 1e-12);
  }
}

// --- optimizers -------------------------------------------------------------

TEST(Optimizers, ZeroGradientSgdIsAFixedPoint) {
  auto ps = scalar_store(1.7, 0.0);
  Sgd sgd(0.1);
  sgd.step(ps);
  EXPECT_EQ(ps.at("w").value[0], 1.7);
}

TEST(Optimizers, SgdOnQuadraticDecaysGeometrically) {
  // loss = w^2 / 2, gradient w, so w_k = w_0 (1 - lr)^k.
  auto ps = scalar_store(2.0, 0.0);
  Sgd sgd(0.1);
  for (int k = 1; k <= 30; ++k) {
    ps.at("w").grad[0] = ps.at("w").value[0];
    sgd.step(ps);
    EXPECT_NEAR(ps.at("w").value[0], 2.0 * std::pow(0.9, k), 1e-14);
  }
}

TEST(Optimizers, AdamWMatchesHandEvaluatedSteps) {
  const double lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-8, wd = 0.01;
  auto ps = scalar_store(0.5, 0.2);
  AdamW opt(lr);
  double w = 0.5, m = 0, v = 0;
  const double grads[] = {0.2, -0.4, 0.05};
  for (int t = 1; t <= 3; ++t) {
    const double g = grads[t - 1];
    ps.at("w").grad[0] = g;
    opt.step(ps);
    w -= lr * wd * w;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t)), vh = v / (1 - std::pow(b2, t));
    w -= lr * mh / (std::sqrt(vh) + eps);
    EXPECT_NEAR(ps.at("w").value[0], w, 1e-15) << t;
  }
  // The first bias-corrected step moves by almost exactly lr.
  EXPECT_NEAR(0.5 * (1 - lr * wd) - lr * 0.2 / (0.2 + eps), 0.5 - 0.000005 - 0.001, 1e-9);
}

TEST(Optimizers, RmsPropAndRpropHandSteps) {
  {
    auto ps = scalar_store(1.0, 0.3);
    RmsProp opt(0.01);
    opt.step(ps);
    const double v = 0.01 * 0.09;
    EXPECT_NEAR(ps.at("w").value[0], 1.0 - 0.01 * 0.3 / (std::sqrt(v) + 1e-8), 1e-15);
  }
  {
    auto ps = scalar_store(1.0, 0.3);
    Rprop opt(0.1);
    opt.step(ps);  // first step: size lr
    EXPECT_NEAR(ps.at("w").value[0], 0.9, 1e-15);
    opt.step(ps);  // same sign: size * 1.2
    EXPECT_NEAR(ps.at("w").value[0], 0.9 - 0.12, 1e-15);
    ps.at("w").grad[0] = -0.5;
    opt.step(ps);  // sign flip: shrink, skip update
    EXPECT_NEAR(ps.at("w").value[0], 0.78, 1e-15);
    opt.step(ps);  // resumes with 0.06
    EXPECT_NEAR(ps.at("w").value[0], 0.78 + 0.06, 1e-15);
  }
}

TEST(Optimizers, PropertyDeterministicAndRequireGradients) {
  for (OptimizerKind kind : {OptimizerKind::AdamW, OptimizerKind::Sgd, OptimizerKind::RmsProp, OptimizerKind::Rprop}) {
    ParamStore a, b;
    for (auto* ps : {&a, &b}) {
      ps->add("x", random_tensor({3, 4}, 1));
      ps->add("y", random_tensor({5}, 2));
    }
    auto oa = make_optimizer(kind, 0.01), ob = make_optimizer(kind, 0.01);
    for (int step = 0; step < 5; ++step) {
      for (auto* ps : {&a, &b}) {
        ps->at("x").grad = random_tensor({3, 4}, 10 + step);
        ps->at("y").grad = random_tensor({5}, 20 + step);
      }
      oa->step(a);
      ob->step(b);
    }
    EXPECT_EQ(a.at("x").value, b.at("x").value) << to_string(kind);
    EXPECT_EQ(a.at("y").value, b.at("y").value) << to_string(kind);
    EXPECT_NE(a.at("x").value, random_tensor({3, 4}, 1));

    ParamStore missing;
    missing.add("z", Tensor({2}));
    missing.at("z").grad = Tensor();
    EXPECT_THROW(make_optimizer(kind, 0.1)->step(missing), ContractError);
    EXPECT_EQ(parse_optimizer(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_optimizer("adam"), ConfigError);
}

// --- hyperparameters ----------------------------------------------------------

TEST(Hyperparameters, ReferenceDefaultsAndGrid) {
  const Hyperparameters hp;
  EXPECT_EQ(hp.learning_rate, 1e-4);
  EXPECT_EQ(hp.hidden_units, 128u);
  EXPECT_EQ(hp.epochs, 5u);
  EXPECT_EQ(hp.dropout, 0.1);
  EXPECT_EQ(hp.optimizer, OptimizerKind::AdamW);
  EXPECT_TRUE(hp.on_reference_grid());
  EXPECT_EQ(kGridLearningRates, (std::vector<double>{1e-4, 1e-5, 1e-6}));
  EXPECT_EQ(kGridHiddenUnits, (std::vector<std::size_t>{128, 256, 512}));
  Hyperparameters off = hp;
  off.hidden_units = 32;
  EXPECT_FALSE(off.on_reference_grid());
  off.learning_rate = 0;
  EXPECT_THROW(off.validate(), ParameterError);
  const SplitSpec split;
  EXPECT_EQ(split.train, 0.90);
  EXPECT_EQ(split.validation, 0.05);
  EXPECT_EQ(split.test, 0.05);
}

TEST(Hyperparameters, JsonRoundTrip) {
  Hyperparameters hp;
  hp.variant = HeadVariant::Gru;
  hp.optimizer = OptimizerKind::Rprop;
  hp.learning_rate = 1e-6;
  hp.seed = 99;
  const nlohmann::json j = hp;
  EXPECT_EQ(j.at("variant"), "gru");
  EXPECT_EQ(j.get<Hyperparameters>(), hp);
}

// --- splitting ----------------------------------------------------------------

TEST(Split, BalancedThousand) {
  const auto s = split_dataset(labelled_docs({500, 500}), 2, SplitSpec{});
  EXPECT_EQ(s.train.docs.size(), 900u);
  EXPECT_EQ(s.validation.docs.size(), 50u);
  EXPECT_EQ(s.test.docs.size(), 50u);
  EXPECT_EQ(label_counts(s.train), (std::map<std::size_t, std::size_t>{{0, 450}, {1, 450}}));
  EXPECT_EQ(label_counts(s.validation), (std::map<std::size_t, std::size_t>{{0, 25}, {1, 25}}));
  EXPECT_EQ(label_counts(s.test), (std::map<std::size_t, std::size_t>{{0, 25}, {1, 25}}));
  EXPECT_EQ(s.train.split, Split::Train);
  EXPECT_EQ(s.validation.split, Split::Validation);
  EXPECT_EQ(s.test.split, Split::Test);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(Split, DeterministicForASeed) {
  const auto a = split_dataset(labelled_docs({60, 40, 30}), 3, SplitSpec{});
  const auto b = split_dataset(labelled_docs({60, 40, 30}), 3, SplitSpec{});
  EXPECT_EQ(a.train.docs, b.train.docs);
  EXPECT_EQ(a.validation.docs, b.validation.docs);
  EXPECT_EQ(a.test.docs, b.test.docs);
  SplitSpec other;
  other.seed = 8;
  EXPECT_NE(split_dataset(labelled_docs({60, 40, 30}), 3, other).test.docs, a.test.docs);
}

TEST(Split, PropertyPartitionAndStratification) {
  Rng gen(12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + gen.below(3);
    std::vector<std::size_t> sizes(m);
    std::size_t total = 0;
    for (auto& n : sizes) total += (n = gen.below(400));
    if (total < 20) continue;
    SplitSpec spec;
    spec.seed = trial;
    const auto docs = labelled_docs(sizes);
    const auto s = split_dataset(docs, m, spec);

    std::vector<CleanDocument> all;
    for (const auto* part : {&s.train, &s.validation, &s.test}) all.insert(all.end(), part->docs.begin(), part->docs.end());
    auto key = [](const CleanDocument& a, const CleanDocument& b) { return a.words < b.words; };
    std::sort(all.begin(), all.end(), key);
    auto expected = docs;
    std::sort(expected.begin(), expected.end(), key);
    ASSERT_EQ(all, expected);

    const auto tr = label_counts(s.train), va = label_counts(s.validation), te = label_counts(s.test);
    for (std::size_t c = 0; c < m; ++c) {
      const double n = static_cast<double>(sizes[c]);
      auto got = [&](const std::map<std::size_t, std::size_t>& counts) {
        auto it = counts.find(c);
        return it == counts.end() ? 0.0 : static_cast<double>(it->second);
      };
      if (sizes[c] < 3) {
        EXPECT_EQ(got(tr), n);
        continue;
      }
      EXPECT_GE(got(va), 1.0);
      EXPECT_GE(got(te), 1.0);
      if (sizes[c] >= 20) {
        EXPECT_LE(std::abs(got(tr) - 0.90 * n), 1.0 + 1e-9) << n;
        EXPECT_LE(std::abs(got(va) - 0.05 * n), 1.0 + 1e-9) << n;
        EXPECT_LE(std::abs(got(te) - 0.05 * n), 1.0 + 1e-9) << n;
      }
    }
  }
}

TEST(Split, TinyClassesAndErrors) {
  const auto s = split_dataset(labelled_docs({30, 2}), 2, SplitSpec{});
  EXPECT_EQ(s.warnings.size(), 1u);
  EXPECT_EQ(label_counts(s.train).at(1), 2u);
  EXPECT_THROW(split_dataset(labelled_docs({10, 9}), 2, SplitSpec{}), ContractError);
  SplitSpec bad;
  bad.train = 0.8;
  EXPECT_THROW(split_dataset(labelled_docs({30, 30}), 2, bad), ParameterError);
}

TEST(StratifiedSample, KeepsProportionsAndOrder) {
  std::vector<std::pair<int, std::string>> items;
  for (int i = 0; i < 100; ++i) items.push_back({i, i < 70 ? "a" : (i < 90 ? "b" : "c")});
  const auto picked = stratified_sample(items, 10, 3, [](const auto& p) { return p.second; });
  ASSERT_EQ(picked.size(), 10u);
  std::map<std::string, int> counts;
  for (const auto& p : picked) ++counts[p.second];
  EXPECT_EQ(counts, (std::map<std::string, int>{{"a", 7}, {"b", 2}, {"c", 1}}));
  EXPECT_TRUE(std::is_sorted(picked.begin(), picked.end()));
  EXPECT_EQ(stratified_sample(items, 0, 3, [](const auto& p) { return p.second; }).size(), 100u);
}

// --- training loop ------------------------------------------------------------

TEST(Train, LearnsSeparableCorpusWithDecreasingLoss) {
  const auto task = small_task({.size = 400});
  const auto hp = small_hp(8, 5);
  SentimentModel model(configure_model(task.base, hp));
  const auto report = train(model, task.data, hp);
  ASSERT_EQ(report.history.size(), 5u);
  const auto losses = report.epoch_losses();
  for (std::size_t e = 1; e < losses.size(); ++e) EXPECT_LE(losses[e], losses[e - 1] + 1e-3) << e;
  EXPECT_GE(report.history.back().train.accuracy, 0.95);
  ASSERT_TRUE(report.test.has_value());
  EXPECT_GE(report.test->accuracy, 0.9);
  ASSERT_TRUE(report.history.back().validation.has_value());
  EXPECT_EQ(report.history.back().train.n, static_cast<std::int64_t>(task.data.train.size()));
  EXPECT_EQ(report.hyperparameters, hp);
}

TEST(Train, ZeroEpochsGivesEmptyHistory) {
  const auto task = small_task();
  auto hp = small_hp(8, 0);
  SentimentModel model(configure_model(task.base, hp));
  const ParamStore before = model.params();
  const auto report = train(model, task.data, hp);
  EXPECT_TRUE(report.history.empty());
  ASSERT_TRUE(report.test.has_value());
  for (const auto& [name, p] : before.items()) EXPECT_EQ(model.params().at(name).value, p.value);
}

TEST(Train, BitIdenticalForSameSeed) {
  const auto task = small_task();
  const auto hp = small_hp(8, 2);
  SentimentModel a(configure_model(task.base, hp)), b(configure_model(task.base, hp));
  const auto ra = train(a, task.data, hp), rb = train(b, task.data, hp);
  EXPECT_EQ(report_json(ra).dump(), report_json(rb).dump());
  for (const auto& [name, p] : a.params().items()) EXPECT_EQ(b.params().at(name).value, p.value) << name;

  auto other = hp;
  other.seed = 43;
  SentimentModel c(configure_model(task.base, other));
  EXPECT_NE(report_json(train(c, task.data, other)).dump(), report_json(ra).dump());
}

TEST(Train, DivergenceNamesBatchAndLearningRate) {
  const auto task = small_task();
  auto hp = small_hp(8, 1);
  hp.optimizer = OptimizerKind::Sgd;
  hp.learning_rate = 1e308;
  SentimentModel model(configure_model(task.base, hp));
  try {
    train(model, task.data, hp);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("epoch 1 batch 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("lr=1e+308"), std::string::npos) << msg;
  }
}

TEST(Train, EpochCallbackAndReportJson) {
  const auto task = small_task();
  const auto hp = small_hp(8, 2);
  SentimentModel model(configure_model(task.base, hp));
  std::vector<std::size_t> seen;
  const auto report = train(model, task.data, hp, [&](const EpochRecord& r) { seen.push_back(r.epoch); });
  EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2}));
  const auto j = report_json(report);
  for (const char* key : {"variant", "lr", "hidden", "optimizer", "epoch_losses", "history", "test"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_FALSE(j.dump().find("seconds") != std::string::npos);
  const auto back = train_report_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(report_json(back).dump(), j.dump());
  EXPECT_EQ(timings_json(report).at("epochs").size(), 2u);
}

// --- sweeps -------------------------------------------------------------------

TEST(Sweep, SingletonMatchesTrainReport) {
  const auto task = small_task();
  const auto hp = small_hp(8, 2);
  const std::vector<Hyperparameters> grid{hp};
  const auto sweep_report = sweep(task.data, task.base, grid);
  ASSERT_EQ(sweep_report.rows.size(), 3u);

  SentimentModel model(configure_model(task.base, hp));
  const auto report = train(model, task.data, hp);
  const auto expected = rows_for_run(hp, &report, "");
  for (std::size_t i = 0; i < 3; ++i) expect_same_metrics(sweep_report.rows[i], expected[i]);
  EXPECT_EQ(sweep_report.rows[0].split, Split::Train);
  EXPECT_EQ(sweep_report.rows[2].accuracy, report.test->accuracy);
  EXPECT_EQ(sweep_report.rows[0].epoch_losses, report.epoch_losses());
  ASSERT_EQ(sweep_report.best.size(), 1u);
  EXPECT_EQ(sweep_report.best[0].accuracy, report.test->accuracy);
}

TEST(Sweep, TwoLearningRatesGiveTwoRowBlocks) {
  const auto task = small_task({.size = 120});
  GridSpec grid;
  grid.base = small_hp(128, 1);
  grid.learning_rates = {1e-4, 1e-5};
  grid.hidden_units = {128};
  const auto points = grid.expand();
  ASSERT_EQ(points.size(), 2u);
  const auto report = sweep(task.data, task.base, points);
  ASSERT_EQ(report.rows.size(), 6u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(report.rows[i].learning_rate, 1e-4);
  for (std::size_t i = 3; i < 6; ++i) EXPECT_EQ(report.rows[i].learning_rate, 1e-5);
  EXPECT_TRUE(std::is_sorted(report.rows.begin(), report.rows.end(), sweep_row_before));
}

TEST(Sweep, FailedRunIsRecordedAndParallelMatchesSerial) {
  const auto task = small_task({.size = 120});
  auto good = small_hp(8, 1);
  auto bad = good;
  bad.optimizer = OptimizerKind::Sgd;
  bad.learning_rate = 1e308;
  auto gru = good;
  gru.variant = HeadVariant::Gru;
  const std::vector<Hyperparameters> grid{good, bad, gru};

  std::vector<std::string> errors;
  const auto serial = sweep(task.data, task.base, grid, 1,
                            [&](const Hyperparameters&, const std::string& err) { errors.push_back(err); });
  const auto parallel = sweep(task.data, task.base, grid, 3);
  ASSERT_EQ(serial.rows.size(), 9u);
  ASSERT_EQ(parallel.rows.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) expect_same_metrics(serial.rows[i], parallel.rows[i]);
  EXPECT_EQ(std::count_if(errors.begin(), errors.end(), [](const auto& e) { return !e.empty(); }), 1);

  std::size_t failed = 0;
  for (const auto& row : serial.rows) {
    if (row.ok()) continue;
    ++failed;
    EXPECT_EQ(row.optimizer, OptimizerKind::Sgd);
    EXPECT_TRUE(std::isnan(row.accuracy));
    EXPECT_NE(row.error.find("non-finite"), std::string::npos);
  }
  EXPECT_EQ(failed, 3u);
  EXPECT_EQ(serial.best.size(), 2u);  // bilstm and gru
}

TEST(SweepTables, RenderParseRoundTrip) {
  SweepReport report;
  Hyperparameters hp = small_hp(128, 2);
  TrainReport fake;
  fake.hyperparameters = hp;
  ConfusionMatrix cm(std::vector<std::string>{"negative", "neutral", "positive"});
  Rng gen(2);
  for (int i = 0; i < 57; ++i) cm.accumulate(gen.below(3), gen.below(3));
  for (std::size_t e = 1; e <= 2; ++e) fake.history.push_back({e, 1.0 / static_cast<double>(e), make_report(cm), make_report(cm), 0.0});
  fake.test = make_report(cm);
  for (double lr : {1e-4, 1e-5, 1e-6}) {
    for (std::size_t h : {128u, 256u, 512u}) {
      hp.learning_rate = lr;
      hp.hidden_units = h;
      fake.hyperparameters = hp;
      const auto rows = rows_for_run(hp, &fake, "");
      report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    }
  }
  hp.variant = HeadVariant::Lstm;
  hp.optimizer = OptimizerKind::RmsProp;
  const auto failed = rows_for_run(hp, nullptr, "non-finite loss at epoch 1 batch 3 (lr=1e-06) | boom");
  report.rows.insert(report.rows.end(), failed.begin(), failed.end());
  finalize_sweep(report);

  const std::string text = render_sweep_tables(report);
  EXPECT_NE(text.find("== bilstm / adamw =="), std::string::npos);
  EXPECT_NE(text.find("Learning Rate"), std::string::npos);
  EXPECT_NE(text.find("F1_w"), std::string::npos);
  const auto parsed = parse_sweep_tables(text);
  ASSERT_EQ(parsed.rows.size(), report.rows.size());
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    auto expected = report.rows[i];
    std::replace(expected.error.begin(), expected.error.end(), '|', '/');
    expect_same_metrics(parsed.rows[i], expected);
  }
  ASSERT_EQ(parsed.best.size(), report.best.size());
  EXPECT_EQ(parsed.best[0].accuracy, report.best[0].accuracy);
  EXPECT_EQ(render_sweep_tables(parsed), text);

  const auto j = sweep_json(report);
  std::size_t nulls = 0;
  for (const auto& row : j.at("rows")) nulls += row.at("acc").is_null() ? 1 : 0;
  EXPECT_EQ(nulls, 3u);
  const auto back = sweep_from_json(nlohmann::json::parse(j.dump()));
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    expect_same_metrics(back.rows[i], report.rows[i]);
    EXPECT_EQ(back.rows[i].epoch_losses, report.rows[i].epoch_losses);
  }
  EXPECT_THROW(parse_sweep_tables("== bilstm / adamw ==\nnot a table\n"), ParseError);
}
