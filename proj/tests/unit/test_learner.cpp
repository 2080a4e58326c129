#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "timepoint/builtin.hpp"
#include "timepoint/learner.hpp"

using namespace timepoint;

namespace {

std::vector<double> random_features(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(dim);
  for (auto& v : x) v = n(rng);
  return x;
}

}  // namespace

TEST(Forward, ZeroParametersGiveOneHalf) {
  const SorterParams zero(5, 3);
  const auto p = forward(std::vector<double>{1, -2, 3, 0.5, 7}, zero, 10.0);
  for (double v : p.values()) EXPECT_EQ(v, 0.5);
}

TEST(Forward, LargeTemperatureFlattens) {
  std::mt19937_64 rng(1);
  const auto params = SorterParams::random(6, 4, 2);
  const auto x = random_features(6, rng);
  const auto cold = forward(x, params, 1.0);
  const auto hot = forward(x, params, 1e6);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_LE(std::abs(hot.values()[i] - 0.5), std::abs(cold.values()[i] - 0.5) + 1e-12);
    EXPECT_NEAR(hot.values()[i], 0.5, 1e-5);
  }
}

TEST(Forward, TemperatureScaleInvariance) {
  std::mt19937_64 rng(3);
  auto params = SorterParams::random(6, 4, 4);
  const auto x = random_features(6, rng);
  const auto before = forward(x, params, 2.0);
  for (auto tp : kPointPairs) {
    for (std::size_t q = 0; q < 2; ++q) {
      params.b2(tp, q) *= 2;
      for (std::size_t h = 0; h < 4; ++h) params.w2(tp, q, h) *= 2;
    }
  }
  const auto after = forward(x, params, 4.0);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(after.values()[i], before.values()[i], 1e-14);
}

TEST(Forward, DimensionMismatch) {
  const SorterParams p(4, 2);
  EXPECT_THROW((void)forward(std::vector<double>{1, 2, 3}, p, 1.0), DimensionMismatch);
}

TEST(HardAnswers, StrictThreshold) {
  SorterParams p(1, 1);
  p.b2(PointPair::SS, 0) = 0.0;
  p.b2(PointPair::SS, 1) = std::log(0.7 / 0.3);
  const auto q = hard_answers(std::vector<double>{0.0}, p, 1.0);
  EXPECT_FALSE(q[(QAtom{PointPair::SS, 1})]);
  EXPECT_TRUE(q[(QAtom{PointPair::SS, 2})]);
}

TEST(HardAnswers, EqualsThresholdedForward) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto params = SorterParams::random(6, 4, static_cast<std::uint64_t>(t));
    const auto x = random_features(6, rng);
    EXPECT_EQ(hard_answers(x, params, 0.3), forward(x, params, 0.3).threshold());
  }
}

TEST(Loss, ExactGoldIsNearZero) {
  const auto& s = builtin_schema("tbdense");
  const auto c = configuration_from_intervals(1, 2, 3, 4);
  EXPECT_NEAR(loss(QVector(encode(c)), "Before", s), -std::log(1 + 1e-8), 1e-15);
}

TEST(Loss, MatresHalfHalf) {
  std::array<double, 8> v{};
  v.fill(0.5);
  EXPECT_NEAR(loss(QVector(v), "Before", builtin_schema("matres")), -std::log(0.25 + 1e-8), 1e-14);
  EXPECT_THROW((void)loss(QVector(v), "Includes", builtin_schema("matres")), UnknownRelation);
}

TEST(Loss, DecreasesTowardMatresBefore) {
  const auto& s = builtin_schema("matres");
  std::array<double, 8> v{};
  v.fill(0.5);
  for (int i = 1; i < 20; ++i) {
    for (int j = 1; j < 20; ++j) {
      v[0] = i / 20.0;
      v[1] = j / 20.0;
      const double here = loss(QVector(v), "Before", s);
      if (i < 19) {
        v[0] = (i + 1) / 20.0;
        EXPECT_LT(loss(QVector(v), "Before", s), here);
        v[0] = i / 20.0;
      }
      if (j > 1) {
        v[1] = (j - 1) / 20.0;
        EXPECT_LT(loss(QVector(v), "Before", s), here);
      }
    }
  }
}

TEST(Backward, MatchesFiniteDifferences) {
  const auto& s = builtin_schema("tbdense");
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> label(0, s.labels().size() - 1);
  const std::vector<LossOptions> variants{{}, {Semantics::ProbSum, 1e-8, false}, {Semantics::PaperSoft, 1e-8, true}};
  for (int t = 0; t < 20; ++t) {
    const auto& options = variants[static_cast<std::size_t>(t) % variants.size()];
    const auto activation = t % 2 == 0 ? Activation::Tanh : Activation::Sigmoid;
    const auto params = SorterParams::random(6, 4, 100 + static_cast<std::uint64_t>(t), activation);
    const auto x = random_features(6, rng);
    const auto& gold = s.labels()[label(rng)];
    const double tau = t % 3 == 0 ? 1.0 : 2.5;
    const auto g = backward(x, params, tau, gold, s, options);
    EXPECT_NEAR(g.loss, loss(forward(x, params, tau), gold, s, options), 1e-12);
    const std::vector<double> theta(params.values().begin(), params.values().end());
    const auto f = [&](const std::vector<double>& th) {
      auto p = params;
      std::copy(th.begin(), th.end(), p.values().begin());
      return loss(forward(x, p, tau), gold, s, options);
    };
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double numeric = oracle::central_difference(f, theta, i, 1e-5);
      EXPECT_LE(oracle::relative_error(g.gradient[i], numeric), 1e-4) << "trial " << t << " param " << i;
    }
  }
}

TEST(Backward, BiasGradientSignAtZeroParameters) {
  const auto& s = builtin_schema("matres");
  const SorterParams zero(3, 2);
  const std::vector<double> x{0.3, -0.1, 0.2};
  const auto g = backward(x, zero, 1.0, "Before", s);
  // Before is Q1_ss & !Q2_ss: descent raises the Q1 logit and lowers the Q2 logit.
  const auto q1 = zero.offset(PointPair::SS) + zero.head_size() - 2;
  EXPECT_LT(g.gradient[q1], 0.0);
  EXPECT_GT(g.gradient[q1 + 1], 0.0);
  for (auto tp : {PointPair::EE, PointPair::SE, PointPair::ES}) {
    EXPECT_EQ(g.gradient[zero.offset(tp) + zero.head_size() - 2], 0.0);
  }
}

TEST(Backward, FlatAtSaturatedCorrectPrediction) {
  const auto& s = builtin_schema("matres");
  SorterParams p(2, 2);
  p.b2(PointPair::SS, 0) = 60.0;
  p.b2(PointPair::SS, 1) = -60.0;
  const auto g = backward(std::vector<double>{0.5, -0.5}, p, 1.0, "Before", s);
  EXPECT_LT(g.loss, 1e-7);
  for (double v : g.gradient) EXPECT_LT(std::abs(v), 1e-12);
}

TEST(Train, OverfitsASingleExample) {
  const auto& s = builtin_schema("tbdense");
  std::mt19937_64 rng(9);
  const auto c = configuration_from_intervals(0, 4, 1, 2);
  const std::vector<LabeledPair> data{{"only", random_features(16, rng), project(c, s), c}};
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.hidden = 8;
  cfg.batch_size = 1;
  cfg.epochs = 500;
  const auto r = train(data, s, cfg);
  EXPECT_LT(r.history.back().loss, 1e-3);
}

TEST(Train, SeedDeterministic) {
  const auto& s = builtin_schema("tbdense");
  const auto data = synth_generate(200, 0.05, 3, s);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 42;
  const auto a = train(data, s, cfg);
  const auto b = train(data, s, cfg);
  EXPECT_EQ(a.history, b.history);
  EXPECT_TRUE(std::ranges::equal(a.params.values(), b.params.values()));
  cfg.seed = 43;
  const auto c = train(data, s, cfg);
  EXPECT_FALSE(std::ranges::equal(a.params.values(), c.params.values()));
}

TEST(Train, RejectsBadInput) {
  const auto& s = builtin_schema("matres");
  EXPECT_THROW((void)train({}, s, TrainConfig{}), EmptyDataset);
  const std::vector<LabeledPair> ragged{{"a", {1.0, 2.0}, "Before", {}}, {"b", {1.0}, "After", {}}};
  EXPECT_THROW((void)train(ragged, s, TrainConfig{}), DimensionMismatch);
  TrainConfig bad;
  bad.temperature = 0.0;
  EXPECT_THROW(bad.check(), DomainError);
  bad = TrainConfig{};
  bad.epsilon = 1e-2;
  EXPECT_THROW(bad.check(), DomainError);
}

TEST(Synth, ZeroNoiseReproducesAnchors) {
  const auto& s = builtin_schema("tbdense");
  const auto data = synth_generate(500, 0.0, 7, s);
  std::map<std::size_t, std::vector<double>> anchor;
  for (const auto& ex : data) {
    ASSERT_TRUE(ex.gold_config.has_value());
    const auto [it, inserted] = anchor.emplace(ex.gold_config->index(), ex.features);
    if (!inserted) EXPECT_EQ(it->second, ex.features);
  }
}

TEST(Synth, LabelsIgnoreNoise) {
  const auto& s = builtin_schema("tbdense");
  const auto clean = synth_generate(300, 0.0, 8, s);
  const auto noisy = synth_generate(300, 0.5, 8, s);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    EXPECT_EQ(clean[i].gold, noisy[i].gold);
    EXPECT_EQ(clean[i].gold_config, noisy[i].gold_config);
    EXPECT_EQ(clean[i].gold, project(*clean[i].gold_config, s));
  }
}

TEST(Synth, LabelMarginalsMatchEnumeratedProjection) {
  const auto& s = builtin_schema("tbdense");
  const auto configs = synth_configurations(s);
  std::map<std::string, double> expected;
  for (const auto& c : configs) expected[project(c, s)] += 1.0 / static_cast<double>(configs.size());

  const std::size_t n = 5000;
  std::map<std::string, double> observed;
  for (const auto& ex : synth_generate(n, 0.1, 13, s)) observed[ex.gold] += 1.0;
  double chi2 = 0.0;
  for (const auto& [label, p] : expected) {
    const double e = p * static_cast<double>(n);
    chi2 += (observed[label] - e) * (observed[label] - e) / e;
  }
  // 5 degrees of freedom, p = 0.001.
  EXPECT_LT(chi2, 20.52);
  EXPECT_EQ(expected.size(), 6u);
}

TEST(Checkpoint, RoundTripsExactly) {
  const auto params = SorterParams::random(5, 3, 77, Activation::Sigmoid);
  const auto text = save_checkpoint({params, 2.5});
  const auto back = load_checkpoint(text);
  EXPECT_EQ(back.temperature, 2.5);
  EXPECT_EQ(back.params.activation(), Activation::Sigmoid);
  EXPECT_TRUE(std::ranges::equal(back.params.values(), params.values()));
  EXPECT_EQ(save_checkpoint(back), text);
}

TEST(Checkpoint, RejectsWrongVersion) {
  auto text = save_checkpoint({SorterParams(2, 1), 1.0});
  const auto pos = text.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 12, "\"version\": 2");
  EXPECT_THROW((void)load_checkpoint(text), ParseError);
}
