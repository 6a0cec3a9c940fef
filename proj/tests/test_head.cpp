#include <cmath>

#include <gtest/gtest.h>

#include "senti/error.hpp"
#include "senti/head.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

using namespace senti;
using senti::testing::affine;
using senti::testing::check_inputs;
using senti::testing::check_params;
using senti::testing::random_tensor;
using senti::testing::randomize;
using senti::testing::row;
using senti::testing::rows_of;
using senti::testing::ScalarLstm;
using senti::testing::sig;
using senti::testing::Vec;

namespace {

Vec scalar_gru_step(const ParamStore& ps, const Vec& x, const Vec& h) {
  auto p = [&](const std::string& n) -> const Tensor& { return ps.at("head.gru." + n).value; };
  const Vec zero_h(h.size(), 0.0);
  const Tensor zero_b({h.size()});
  Vec ar = affine(x, p("w_rx"), h, p("w_rh"), p("b_r"));
  Vec az = affine(x, p("w_zx"), h, p("w_zh"), p("b_z"));
  Vec anx = affine(x, p("w_nx"), zero_h, p("w_nh"), p("b_n"));
  Vec anh = affine(Vec(x.size(), 0.0), p("w_nx"), h, p("w_nh"), zero_b);
  Vec out(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    const double r = sig(ar[j]), z = sig(az[j]);
    const double n = std::tanh(anx[j] + r * anh[j]);
    out[j] = (1 - z) * n + z * h[j];
  }
  return out;
}

HeadConfig config(HeadVariant v, std::size_t d, std::size_t h, std::size_t len, std::size_t classes = 3) {
  HeadConfig c;
  c.variant = v;
  c.input_dim = d;
  c.hidden_units = h;
  c.dense1_units = 5;
  c.num_classes = classes;
  c.max_len = len;
  c.seed = 3;
  return c;
}

TokenBatch mask_batch(std::vector<std::vector<double>> masks) {
  TokenBatch tb;
  tb.batch = masks.size();
  tb.length = masks[0].size();
  for (const auto& m : masks) {
    for (double v : m) {
      tb.ids.push_back(v > 0 ? 4 : kPadId);
      tb.mask.push_back(v);
    }
    tb.labels.push_back(0);
  }
  return tb;
}

}  // namespace

TEST(LstmCell, ZeroParametersHalveTheCell) {
  auto cfg = config(HeadVariant::Lstm, 3, 2, 1);
  ParamStore ps;
  init_head_params(cfg, ps);
  for (auto& [n, p] : ps.items()) p.value.fill(0.0);
  Tape tape;
  const auto p = LstmDirectionParams::bind(tape, ps, "head.lstm.fwd.", false);
  const Tensor c_prev({1, 2}, {0.8, -2.0});
  const auto s = lstm_cell_step(tape.constant(random_tensor({1, 3}, 1)), tape.constant(random_tensor({1, 2}, 2)),
                                tape.constant(c_prev), p);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_DOUBLE_EQ(s.c.value()[j], 0.5 * c_prev[j]);
    EXPECT_DOUBLE_EQ(s.h.value()[j], 0.5 * std::tanh(0.5 * c_prev[j]));
  }
  const auto z = lstm_cell_step(tape.constant(Tensor({1, 3})), tape.constant(Tensor({1, 2})), tape.constant(Tensor({1, 2})), p);
  EXPECT_EQ(z.h.value(), Tensor({1, 2}));
  EXPECT_EQ(z.c.value(), Tensor({1, 2}));
}

TEST(LstmCell, PropertyMatchesScalarOracle) {
  for (bool peephole : {false, true}) {
    for (int trial = 0; trial < 30; ++trial) {
      auto cfg = config(HeadVariant::Lstm, 2, 2, 1);
      cfg.peephole = peephole;
      ParamStore ps;
      init_head_params(cfg, ps);
      randomize(ps, 1000 + trial);
      Tape tape;
      const auto p = LstmDirectionParams::bind(tape, ps, "head.lstm.fwd.", peephole);
      const Tensor x = random_tensor({1, 2}, 2 * trial), h = random_tensor({1, 2}, 2 * trial + 1),
                   c = random_tensor({1, 2}, 7 * trial, -2, 2);
      const auto s = lstm_cell_step(tape.constant(x), tape.constant(h), tape.constant(c), p);
      const auto [ho, co] = ScalarLstm{ps, "head.lstm.fwd.", peephole}.step(row(x, 0), row(h, 0), row(c, 0));
      for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_NEAR(s.h.value()[j], ho[j], 1e-12);
        EXPECT_NEAR(s.c.value()[j], co[j], 1e-12);
        EXPECT_GT(s.h.value()[j], -1.0);
        EXPECT_LT(s.h.value()[j], 1.0);
      }
    }
  }
}

TEST(LstmCell, DimensionMismatch) {
  auto cfg = config(HeadVariant::Lstm, 3, 2, 1);
  ParamStore ps;
  init_head_params(cfg, ps);
  Tape tape;
  const auto p = LstmDirectionParams::bind(tape, ps, "head.lstm.fwd.", false);
  EXPECT_THROW(lstm_cell_step(tape.constant(Tensor({1, 4})), tape.constant(Tensor({1, 2})), tape.constant(Tensor({1, 2})), p),
               DimensionError);
  EXPECT_THROW(lstm_cell_step(tape.constant(Tensor({1, 3})), tape.constant(Tensor({1, 3})), tape.constant(Tensor({1, 3})), p),
               DimensionError);
}

TEST(GruCell, ZeroFixedPointAndOracle) {
  auto cfg = config(HeadVariant::Gru, 2, 2, 1);
  ParamStore ps;
  init_head_params(cfg, ps);
  {
    ParamStore zero = ps;
    for (auto& [n, p] : zero.items()) p.value.fill(0.0);
    Tape tape;
    const auto h = gru_cell_step(tape.constant(Tensor({1, 2})), tape.constant(Tensor({1, 2})), GruParams::bind(tape, zero, "head.gru."));
    EXPECT_EQ(h.value(), Tensor({1, 2}));
  }
  for (int trial = 0; trial < 30; ++trial) {
    randomize(ps, 500 + trial);
    Tape tape;
    const Tensor x = random_tensor({1, 2}, 3 * trial), h = random_tensor({1, 2}, 3 * trial + 1);
    const Tensor out = gru_cell_step(tape.constant(x), tape.constant(h), GruParams::bind(tape, ps, "head.gru.")).value();
    const Vec oracle = scalar_gru_step(ps, row(x, 0), row(h, 0));
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_NEAR(out[j], oracle[j], 1e-12);
      EXPECT_GT(out[j], -1.0);
      EXPECT_LT(out[j], 1.0);
    }
  }
}

TEST(GruCell, SaturatedUpdateGateCopiesState) {
  auto cfg = config(HeadVariant::Gru, 2, 2, 1);
  ParamStore ps;
  init_head_params(cfg, ps);
  randomize(ps, 8);
  ps.at("head.gru.b_z").value.fill(40.0);
  Tape tape;
  const Tensor x = random_tensor({1, 2}, 1), h = random_tensor({1, 2}, 2);
  const Tensor out = gru_cell_step(tape.constant(x), tape.constant(h), GruParams::bind(tape, ps, "head.gru.")).value();
  const Vec oracle = scalar_gru_step(ps, row(x, 0), row(h, 0));
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(out[j], h[j], 1e-15);
    EXPECT_NEAR(out[j], oracle[j], 1e-12);
  }
}

TEST(BiLstm, PropertyMatchesScalarOracle) {
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t l = 1 + trial % 3, h = 1 + trial % 2, d = 2 + trial % 2;
    auto cfg = config(HeadVariant::BiLstm, d, h, l);
    ParamStore ps;
    init_head_params(cfg, ps);
    randomize(ps, 77 * trial);
    Tape tape;
    const Tensor e = random_tensor({l, d}, 9 * trial, -2, 2);
    const Tensor out = bilstm_forward(tape.constant(e), LstmDirectionParams::bind(tape, ps, "head.bilstm.fwd.", false),
                                      LstmDirectionParams::bind(tape, ps, "head.bilstm.bwd.", false))
                           .value();
    ASSERT_EQ(out.shape(), (Shape{l, 2 * h}));
    const auto fwd = ScalarLstm{ps, "head.bilstm.fwd."}.run(rows_of(e), h, false);
    const auto bwd = ScalarLstm{ps, "head.bilstm.bwd."}.run(rows_of(e), h, true);
    for (std::size_t t = 0; t < l; ++t) {
      for (std::size_t j = 0; j < h; ++j) {
        EXPECT_NEAR(out.at(t, j), fwd[t][j], 1e-12);
        EXPECT_NEAR(out.at(t, h + j), bwd[t][j], 1e-12);
      }
    }
  }
}

TEST(BiLstm, TwoStepToyComposesCellSteps) {
  auto cfg = config(HeadVariant::BiLstm, 2, 1, 2);
  ParamStore ps;
  init_head_params(cfg, ps);
  randomize(ps, 5);
  Tape tape;
  const Tensor e = random_tensor({2, 2}, 6);
  const auto fp = LstmDirectionParams::bind(tape, ps, "head.bilstm.fwd.", false);
  const auto bp = LstmDirectionParams::bind(tape, ps, "head.bilstm.bwd.", false);
  const Tensor out = bilstm_forward(tape.constant(e), fp, bp).value();

  Var zero = tape.constant(Tensor({1, 1}));
  Var x0 = tape.constant(Tensor({1, 2}, {e[0], e[1]}));
  Var x1 = tape.constant(Tensor({1, 2}, {e[2], e[3]}));
  const auto f0 = lstm_cell_step(x0, zero, zero, fp);
  const auto f1 = lstm_cell_step(x1, f0.h, f0.c, fp);
  const auto b1 = lstm_cell_step(x1, zero, zero, bp);
  const auto b0 = lstm_cell_step(x0, b1.h, b1.c, bp);
  EXPECT_EQ(out.at(0, 0), f0.h.value()[0]);
  EXPECT_EQ(out.at(1, 0), f1.h.value()[0]);
  EXPECT_EQ(out.at(0, 1), b0.h.value()[0]);
  EXPECT_EQ(out.at(1, 1), b1.h.value()[0]);
}

TEST(BiLstm, PalindromeWithTiedDirections) {
  auto cfg = config(HeadVariant::BiLstm, 3, 2, 5);
  ParamStore ps;
  init_head_params(cfg, ps);
  randomize(ps, 31);
  for (auto& [name, p] : ps.items()) {
    if (name.starts_with("head.bilstm.bwd.")) p.value = ps.at("head.bilstm.fwd." + name.substr(16)).value;
  }
  const Tensor half = random_tensor({3, 3}, 4);
  Tensor e({5, 3});
  for (std::size_t t = 0; t < 5; ++t) {
    const std::size_t src = t < 3 ? t : 4 - t;
    for (std::size_t c = 0; c < 3; ++c) e.at(t, c) = half.at(src, c);
  }
  Tape tape;
  const Tensor out = bilstm_forward(tape.constant(e), LstmDirectionParams::bind(tape, ps, "head.bilstm.fwd.", false),
                                    LstmDirectionParams::bind(tape, ps, "head.bilstm.bwd.", false))
                         .value();
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(out.at(t, j), out.at(4 - t, 2 + j), 1e-14);
  }
}

TEST(BiLstm, OutputWidthForGridHiddenUnits) {
  for (std::size_t h : {128u, 256u, 512u}) {
    auto cfg = config(HeadVariant::BiLstm, 4, h, 3);
    ParamStore ps;
    init_head_params(cfg, ps);
    Tape tape;
    const Tensor out = bilstm_forward(tape.constant(random_tensor({3, 4}, h)),
                                      LstmDirectionParams::bind(tape, ps, "head.bilstm.fwd.", false),
                                      LstmDirectionParams::bind(tape, ps, "head.bilstm.bwd.", false))
                           .value();
    EXPECT_EQ(out.shape(), (Shape{3, 2 * h}));
    EXPECT_EQ(cfg.recurrent_width(), 2 * h);
  }
}

TEST(BiLstm, ZeroedBackwardDirectionIsTheZeroTrajectory) {
  auto cfg = config(HeadVariant::BiLstm, 3, 2, 4);
  ParamStore ps;
  init_head_params(cfg, ps);
  randomize(ps, 12);
  const Tensor e = random_tensor({4, 3}, 13);
  auto run = [&] {
    Tape tape;
    return bilstm_forward(tape.constant(e), LstmDirectionParams::bind(tape, ps, "head.bilstm.fwd.", false),
                          LstmDirectionParams::bind(tape, ps, "head.bilstm.bwd.", false))
        .value();
  };
  const Tensor before = run();
  for (auto& [name, p] : ps.items())
    if (name.starts_with("head.bilstm.bwd.")) p.value.fill(0.0);
  const Tensor after = run();
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(after.at(t, j), before.at(t, j));
      EXPECT_EQ(after.at(t, 2 + j), 0.0);
    }
  }
}

TEST(Sequences, BatchedRowsMatchSingleSequences) {
  for (HeadVariant v : {HeadVariant::Lstm, HeadVariant::Gru, HeadVariant::BiLstm}) {
    auto cfg = config(v, 3, 2, 4);
    ParamStore ps;
    init_head_params(cfg, ps);
    randomize(ps, 40);
    const Tensor a = random_tensor({4, 3}, 41), b = random_tensor({4, 3}, 42);
    Tensor ab({8, 3});
    for (std::size_t i = 0; i < 12; ++i) {
      ab[i] = a[i];
      ab[12 + i] = b[i];
    }
    Tape tape;
    const auto single = recurrent_layer(tape, ps, cfg, tape.constant(b), 1, 4);
    const auto both = recurrent_layer(tape, ps, cfg, tape.constant(ab), 2, 4);
    for (std::size_t t = 0; t < 4; ++t) {
      const std::size_t w = cfg.recurrent_width();
      for (std::size_t j = 0; j < w; ++j) EXPECT_NEAR(both[t].value().at(1, j), single[t].value().at(0, j), 1e-14);
    }
  }
}

TEST(HeadForward, ProbabilitiesForEveryVariant) {
  for (HeadVariant v : {HeadVariant::None, HeadVariant::Lstm, HeadVariant::BiLstm, HeadVariant::Gru}) {
    for (std::size_t classes : {2u, 3u}) {
      auto cfg = config(v, 4, 3, 5, classes);
      ParamStore ps;
      init_head_params(cfg, ps);
      const auto tb = mask_batch({{1, 1, 1, 0, 0}, {1, 1, 1, 1, 1}, {1, 1, 0, 0, 0}});
      Tape tape;
      const Tensor probs = head_forward(tape, ps, cfg, tape.constant(random_tensor({15, 4}, classes, -3, 3)), tb, false, 1).value();
      ASSERT_EQ(probs.shape(), (Shape{3, classes})) << to_string(v);
      for (std::size_t r = 0; r < 3; ++r) {
        double total = 0;
        for (std::size_t c = 0; c < classes; ++c) total += probs.at(r, c);
        EXPECT_NEAR(total, 1.0, 1e-9);
      }
    }
  }
}

TEST(HeadForward, NoneVariantFlattensEncoderRows) {
  auto cfg = config(HeadVariant::None, 2, 1, 3, 2);
  ParamStore ps;
  init_head_params(cfg, ps);
  EXPECT_EQ(ps.at("head.dense1.w").value.shape(), (Shape{6, 5}));
  EXPECT_FALSE(ps.contains("head.bilstm.fwd.w_ix"));
  const Tensor e = random_tensor({3, 2}, 2);
  Tape tape;
  const Tensor probs = head_forward(tape, ps, cfg, tape.constant(e), mask_batch({{1, 1, 0}}), false, 0).value();

  // Oracle: flat = [e0, e1, 0], then tanh dense, dense and softmax.
  const Vec flat{e[0], e[1], e[2], e[3], 0.0, 0.0};
  const auto& w1 = ps.at("head.dense1.w").value;
  const auto& w2 = ps.at("head.dense2.w").value;
  Vec hidden(5);
  for (std::size_t j = 0; j < 5; ++j) {
    double s = 0;
    for (std::size_t k = 0; k < 6; ++k) s += flat[k] * w1.at(k, j);
    hidden[j] = std::tanh(s);
  }
  double z[2];
  for (std::size_t c = 0; c < 2; ++c) {
    z[c] = 0;
    for (std::size_t j = 0; j < 5; ++j) z[c] += hidden[j] * w2.at(j, c);
  }
  const double p0 = 1.0 / (1.0 + std::exp(z[1] - z[0]));
  EXPECT_NEAR(probs[0], p0, 1e-12);
  EXPECT_NEAR(probs[1], 1.0 - p0, 1e-12);
}

TEST(HeadForward, PaddedRowsDoNotReachTheClassifier) {
  auto cfg = config(HeadVariant::Gru, 3, 2, 4);
  ParamStore ps;
  init_head_params(cfg, ps);
  const auto tb = mask_batch({{1, 1, 0, 0}});
  Tensor e = random_tensor({4, 3}, 5);
  Tape tape;
  const Tensor a = head_forward(tape, ps, cfg, tape.constant(e), tb, false, 0).value();
  for (std::size_t c = 0; c < 3; ++c) e.at(3, c) = 9.0;
  const Tensor b = head_forward(tape, ps, cfg, tape.constant(e), tb, false, 0).value();
  EXPECT_EQ(a, b);
}

TEST(HeadForward, DeterminismAndDropout) {
  auto cfg = config(HeadVariant::BiLstm, 4, 3, 5);
  cfg.dropout_rate = 0.5;
  ParamStore ps;
  init_head_params(cfg, ps);
  const auto tb = mask_batch({{1, 1, 1, 1, 0}});
  const Tensor e = random_tensor({5, 4}, 3);
  auto run = [&](bool training, std::uint64_t seed) {
    Tape tape;
    return head_forward(tape, ps, cfg, tape.constant(e), tb, training, seed).value();
  };
  EXPECT_EQ(run(false, 1), run(false, 2));
  EXPECT_EQ(run(true, 1), run(true, 1));
  EXPECT_NE(run(true, 1), run(false, 1));
}

TEST(HeadForward, ShapeErrors) {
  auto cfg = config(HeadVariant::Lstm, 4, 3, 5);
  ParamStore ps;
  init_head_params(cfg, ps);
  Tape tape;
  EXPECT_THROW(head_forward(tape, ps, cfg, tape.constant(Tensor({5, 3})), mask_batch({{1, 1, 1, 1, 1}}), false, 0),
               DimensionError);
  EXPECT_THROW(head_forward(tape, ps, cfg, tape.constant(Tensor({4, 4})), mask_batch({{1, 1, 1, 1}}), false, 0),
               DimensionError);
  cfg.num_classes = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(parse_head_variant("transformer"), ConfigError);
  EXPECT_EQ(parse_head_variant(to_string(HeadVariant::Gru)), HeadVariant::Gru);
}

TEST(HeadGradient, EndToEndWithLossMatchesFiniteDifferences) {
  for (HeadVariant v : {HeadVariant::BiLstm, HeadVariant::Lstm, HeadVariant::Gru, HeadVariant::None}) {
    for (bool peephole : {false, true}) {
      if (peephole && v != HeadVariant::BiLstm && v != HeadVariant::Lstm) continue;
      auto cfg = config(v, 3, 2, 4);
      cfg.peephole = peephole;
      ParamStore ps;
      init_head_params(cfg, ps);
      randomize(ps, 90, 0.6);
      const auto tb = mask_batch({{1, 1, 1, 0}, {1, 1, 1, 1}});
      const std::vector<std::size_t> labels{2, 0};
      const Tensor e = random_tensor({8, 3}, 91);
      auto loss = [&](Tape& tape) {
        return cross_entropy(head_forward(tape, ps, cfg, tape.constant(e), tb, true, 4), labels);
      };
      const auto rp = check_params(ps, loss);
      EXPECT_LT(rp.max_error, 1e-4) << to_string(v) << " " << rp.worst;

      auto build = [&](Tape& tape, const std::vector<Var>& in) {
        return cross_entropy(head_forward(tape, ps, cfg, in[0], tb, true, 4), labels);
      };
      const auto ri = check_inputs(build, {e});
      EXPECT_LT(ri.max_error, 1e-4) << to_string(v) << " " << ri.worst;
    }
  }
}

TEST(PredictClass, ArgmaxWithLowestIndexTies) {
  EXPECT_EQ(predict_class(std::vector<double>{0.1, 0.7, 0.2}), 1u);
  EXPECT_EQ(predict_class(std::vector<double>{0.5, 0.5}), 0u);
  EXPECT_EQ(predict_class(std::vector<double>{0.2, 0.4, 0.4}), 1u);
  EXPECT_THROW(predict_class(std::vector<double>{}), ContractError);
}

TEST(PredictClass, PropertyArgmaxOfProbsEqualsArgmaxOfLogits) {
  Rng gen(6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + gen.below(5);
    const Tensor logits = random_tensor({1, m}, 300 + trial, -4, 4);
    Tape tape;
    const Tensor probs = softmax_rows(tape.constant(logits)).value();
    EXPECT_EQ(predict_class(probs.data()), predict_class(logits.data()));
  }
}
