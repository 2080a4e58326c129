#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "timepoint/builtin.hpp"
#include "timepoint/logic_expr.hpp"
#include "timepoint/schema.hpp"

using namespace timepoint;

namespace {

LogicExpr atom(PointPair tp, int question) { return LogicExpr::atom({tp, question}); }

QVector random_q(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::array<double, QAtom::kCount> v{};
  for (auto& x : v) x = u(rng);
  return QVector(v);
}

QVector with_value(QVector q, QAtom a, double v) {
  auto values = q.values();
  values[a.index()] = v;
  return QVector(values);
}

const std::vector<std::string>& schema_names() {
  static const std::vector<std::string> names{"allen13", "matres", "tbdense"};
  return names;
}

}  // namespace

TEST(EvalHard, ContradictionAndTautology) {
  const auto a = atom(PointPair::SE, 2);
  for (std::size_t m = 0; m < QAssignment::kCount; ++m) {
    const QAssignment q(static_cast<std::uint8_t>(m));
    EXPECT_FALSE(eval_hard(a & !a, q));
    EXPECT_TRUE(eval_hard(a | !a, q));
  }
}

TEST(EvalHard, AtomLookup) {
  const auto q = QAssignment().with({PointPair::SS, 1}, true);
  EXPECT_TRUE(eval_hard(atom(PointPair::SS, 1), q));
  EXPECT_FALSE(eval_hard(atom(PointPair::SS, 2), q));
}

TEST(EvalHard, RejectsNonBinaryVector) {
  std::array<double, 8> v{};
  v[3] = 0.4;
  EXPECT_THROW((void)eval_hard(atom(PointPair::SS, 1), QVector(v)), DomainError);
}

TEST(EvalSoft, ProductAlgebra) {
  std::array<double, 8> v{};
  v[0] = 0.5;
  v[1] = 0.5;
  v[2] = 0.3;
  const QVector q(v);
  const auto a = atom(PointPair::SS, 1);
  const auto b = atom(PointPair::SS, 2);
  EXPECT_DOUBLE_EQ(eval_soft(a & b, q), 0.25);
  EXPECT_DOUBLE_EQ(eval_soft(a | b, q), 0.75);
  EXPECT_DOUBLE_EQ(eval_soft(!atom(PointPair::EE, 1), q), 0.7);
}

TEST(EvalSoft, EqualsHardOnBinaryInputsForAllSchemaExpressions) {
  for (const auto& name : schema_names()) {
    for (const auto& rel : builtin_schema(name).compiled()) {
      for (std::size_t m = 0; m < QAssignment::kCount; ++m) {
        const QAssignment q(static_cast<std::uint8_t>(m));
        EXPECT_EQ(eval_soft(rel.expr, QVector(q)), eval_hard(rel.expr, q) ? 1.0 : 0.0)
            << name << " " << rel.name << " m=" << m;
      }
    }
  }
}

TEST(GradSoft, AtomAndProductRule) {
  std::array<double, 8> v{};
  v[0] = 0.5;
  v[1] = 0.25;
  const QVector q(v);
  const auto g_atom = grad_soft(atom(PointPair::SS, 1), q);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(g_atom.gradient[i], i == 0 ? 1.0 : 0.0);

  const auto g = grad_soft(atom(PointPair::SS, 1) & atom(PointPair::SS, 2), q);
  EXPECT_DOUBLE_EQ(g.value, 0.125);
  EXPECT_DOUBLE_EQ(g.gradient[0], 0.25);
  EXPECT_DOUBLE_EQ(g.gradient[1], 0.5);
}

TEST(GradSoft, MatchesFiniteDifferencesOnSchemaExpressions) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = random_q(rng);
    for (const auto& name : schema_names()) {
      for (const auto& rel : builtin_schema(name).compiled()) {
        const auto g = grad_soft(rel.expr, q);
        EXPECT_NEAR(g.value, eval_soft(rel.expr, q), 1e-15);
        for (std::size_t i = 0; i < QAtom::kCount; ++i) {
          const auto f = [&](const std::vector<double>& x) {
            return eval_soft(rel.expr, with_value(q, QAtom::from_index(i), x[0]));
          };
          const double numeric = oracle::central_difference(f, {q.values()[i]}, 0, 1e-5);
          EXPECT_LE(oracle::relative_error(g.gradient[i], numeric), 1e-5) << name << " " << rel.name << " atom " << i;
        }
      }
    }
  }
}

TEST(GradSoft, HandlesZeroFactorsInProducts) {
  std::array<double, 8> v{};
  v[1] = 0.6;
  const QVector q(v);
  const auto e = atom(PointPair::SS, 1) & atom(PointPair::SS, 2) & atom(PointPair::EE, 1);
  const auto g = grad_soft(e, q);
  EXPECT_EQ(g.value, 0.0);
  EXPECT_EQ(g.gradient[0], 0.0);
  EXPECT_EQ(g.gradient[2], 0.0);
  const auto g2 = grad_soft(atom(PointPair::SS, 1) & atom(PointPair::SS, 2), q);
  EXPECT_DOUBLE_EQ(g2.gradient[0], 0.6);
}

TEST(ExpandMinterms, CountsAndAgreement) {
  EXPECT_EQ(expand_minterms(LogicExpr::constant(true)).count(), 256u);
  EXPECT_EQ(expand_minterms(LogicExpr::constant(false)).count(), 0u);
  EXPECT_EQ(expand_minterms(atom(PointPair::SS, 1)).count(), 128u);
  for (const auto& name : schema_names()) {
    for (const auto& rel : builtin_schema(name).compiled()) {
      const auto set = expand_minterms(rel.expr);
      for (std::size_t m = 0; m < QAssignment::kCount; ++m) {
        EXPECT_EQ(set.test(m), eval_hard(rel.expr, QAssignment(static_cast<std::uint8_t>(m))));
      }
    }
  }
}

TEST(ProbSum, TautologyAndConjunction) {
  std::mt19937_64 rng(3);
  const auto q = random_q(rng);
  const auto a = atom(PointPair::ES, 1);
  EXPECT_NEAR(eval_prob_sum(a | !a, q), 1.0, 1e-12);
  std::array<double, 8> v{};
  v[0] = 0.5;
  v[1] = 0.5;
  EXPECT_NEAR(eval_prob_sum(atom(PointPair::SS, 1) & atom(PointPair::SS, 2), QVector(v)), 0.25, 1e-15);
}

TEST(ProbSum, DecisionMassesOfAValidatedSchemaSumToOne) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto q = random_q(rng);
    const auto& s = builtin_schema("matres");
    double total = 0.0;
    for (const auto& rel : s.compiled()) total += eval_prob_sum(rel.expr, q);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(ProbSum, MintermProbabilitiesAreADistribution) {
  std::mt19937_64 rng(9);
  const auto q = random_q(rng);
  double total = 0.0;
  for (std::size_t m = 0; m < QAssignment::kCount; ++m) total += minterm_probability(QAssignment(static_cast<std::uint8_t>(m)), q);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(ProbSum, MassGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  const auto& rel = builtin_schema("tbdense").compiled().front();
  for (int trial = 0; trial < 5; ++trial) {
    const auto q = random_q(rng);
    const auto g = grad_minterm_mass(rel.minterms, q);
    for (std::size_t i = 0; i < QAtom::kCount; ++i) {
      const auto f = [&](const std::vector<double>& x) {
        return minterm_mass(rel.minterms, with_value(q, QAtom::from_index(i), x[0]));
      };
      EXPECT_LE(oracle::relative_error(g.gradient[i], oracle::central_difference(f, {q.values()[i]}, 0, 1e-5)), 1e-5);
    }
  }
}

TEST(QVector, ValidatesAndThresholdsStrictly) {
  std::array<double, 8> v{};
  v[0] = 0.5;
  v[1] = 0.7;
  const QVector q(v);
  EXPECT_FALSE(q.threshold()[(QAtom{PointPair::SS, 1})]);
  EXPECT_TRUE(q.threshold()[(QAtom{PointPair::SS, 2})]);
  v[2] = 1.01;
  EXPECT_THROW(QVector{v}, DomainError);
  v[2] = std::nan("");
  EXPECT_THROW(QVector{v}, DomainError);
}

TEST(EncodeDecode, RoundTripsEveryConfiguration) {
  for (std::size_t i = 0; i < PointConfiguration::kCount; ++i) {
    const auto c = PointConfiguration::from_index(i);
    EXPECT_EQ(decode(encode(c)), c);
  }
}

TEST(Text, PrintParseRoundTrip) {
  const auto e = parse_logic_expr("(!Q2_ss & !Q1_ee & Q2_ee) | (Q1_ss & !Q2_ss & !Q1_ee)");
  EXPECT_EQ(to_string(e), "(!Q2_ss & !Q1_ee & Q2_ee) | (Q1_ss & !Q2_ss & !Q1_ee)");
  EXPECT_EQ(parse_logic_expr(to_string(e)), e);
  EXPECT_EQ(parse_logic_expr("true"), LogicExpr::constant(true));
}

TEST(Text, ParseErrorsCarryPosition) {
  try {
    (void)parse_logic_expr("Q1_ss & Q3_ee");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 9u);
  }
  EXPECT_THROW((void)parse_logic_expr("(Q1_ss"), ParseError);
  EXPECT_THROW((void)parse_logic_expr("Q1_ss Q2_ss"), ParseError);
}
