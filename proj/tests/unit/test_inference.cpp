#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "timepoint/builtin.hpp"
#include "timepoint/inference.hpp"

using namespace timepoint;

namespace {

const std::vector<std::string> kSchemas{"allen13", "matres", "tbdense"};

QVector ss_only(double p1, double p2) {
  std::array<double, 8> v{};
  v.fill(0.5);
  v[0] = p1;
  v[1] = p2;
  return QVector(v);
}

QVector uniform(double p) {
  std::array<double, 8> v{};
  v.fill(p);
  return QVector(v);
}

QVector random_q(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.02, 0.98);
  std::array<double, 8> v{};
  for (auto& x : v) x = u(rng);
  return QVector(v);
}

}  // namespace

TEST(Convert, IntervalExamples) {
  const auto c = configuration_from_intervals(1, 2, 3, 4);
  EXPECT_EQ(convert(encode(c), builtin_schema("tbdense")), (Decision{"Before", false}));
  const auto q = QAssignment().with({PointPair::SS, 1}, true).with({PointPair::SS, 2}, true);
  EXPECT_EQ(convert(q, builtin_schema("matres")).relation, "Vague");
}

TEST(Convert, MatchesProjectionOnConsistentConfigurations) {
  for (const auto& name : kSchemas) {
    const auto& s = builtin_schema(name);
    for (const auto& c : enumerate_consistent_configurations()) {
      const auto d = convert(encode(c), s);
      EXPECT_EQ(d.relation, project(c, s));
      EXPECT_FALSE(d.ambiguous);
    }
  }
}

TEST(Convert, InconsistentOverlapIsAmbiguousVague) {
  const auto& s = builtin_schema("tbdense");
  const auto r = validate(s, ValidationDomain::All);
  ASSERT_FALSE(r.overlaps.empty());
  const auto d = convert(r.overlaps.front().assignment, s);
  EXPECT_EQ(d.relation, "Vague");
  EXPECT_TRUE(d.ambiguous);
}

TEST(Convert, RejectsNonBinaryVectors) {
  EXPECT_THROW((void)convert(uniform(0.5), builtin_schema("matres")), DomainError);
}

TEST(SoftDistribution, BinaryInputsGiveIndicators) {
  for (const auto& name : kSchemas) {
    const auto& s = builtin_schema(name);
    for (std::size_t m = 0; m < QAssignment::kCount; ++m) {
      const QAssignment q(static_cast<std::uint8_t>(m));
      const auto dist = soft_distribution(QVector(q), s);
      const auto hard = matching_relations(s, q);
      for (std::size_t i = 0; i < s.labels().size(); ++i) {
        const bool on = std::find(hard.begin(), hard.end(), i) != hard.end();
        EXPECT_EQ(dist.values()[i], on ? 1.0 : 0.0) << name << " m=" << m << " " << s.labels()[i];
      }
    }
  }
}

TEST(SoftDistribution, MatresUniformQuarterUnderBothSemantics) {
  for (auto sem : {Semantics::PaperSoft, Semantics::ProbSum}) {
    const auto d = soft_distribution(uniform(0.5), builtin_schema("matres"), sem);
    for (const auto& label : d.labels()) EXPECT_NEAR(d[label], 0.25, 1e-15) << label;
  }
}

TEST(SoftDistribution, ProbSumIsNormalized) {
  std::mt19937_64 rng(17);
  for (const auto& name : kSchemas) {
    for (int t = 0; t < 20; ++t) {
      const auto d = soft_distribution(random_q(rng), builtin_schema(name), Semantics::ProbSum);
      EXPECT_NEAR(d.sum(), 1.0, 1e-12) << name;
    }
  }
}

TEST(SoftDistribution, ProbSumAgreesWithMintermEnumeration) {
  std::mt19937_64 rng(23);
  const auto& s = builtin_schema("tbdense");
  for (int t = 0; t < 10; ++t) {
    const auto q = random_q(rng);
    std::vector<double> expected(s.labels().size(), 0.0);
    for (std::size_t m = 0; m < QAssignment::kCount; ++m) {
      const QAssignment a(static_cast<std::uint8_t>(m));
      double p = 1.0;
      for (std::size_t i = 0; i < QAtom::kCount; ++i) {
        p *= a[QAtom::from_index(i)] ? q.values()[i] : 1.0 - q.values()[i];
      }
      expected[s.index_of(convert(a, s).relation)] += p;
    }
    const auto d = soft_distribution(q, s, Semantics::ProbSum);
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(d.values()[i], expected[i], 1e-12);
  }
}

TEST(SoftDistribution, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(29);
  for (const auto& name : kSchemas) {
    const auto& s = builtin_schema(name);
    for (auto sem : {Semantics::PaperSoft, Semantics::ProbSum}) {
      const auto q = random_q(rng);
      const auto grads = soft_distribution_with_gradient(q, s, sem);
      ASSERT_EQ(grads.size(), s.labels().size());
      for (std::size_t r = 0; r < grads.size(); ++r) {
        for (std::size_t i = 0; i < QAtom::kCount; ++i) {
          const auto f = [&](const std::vector<double>& x) {
            auto v = q.values();
            v[i] = x[0];
            return soft_distribution(QVector(v), s, sem).values()[r];
          };
          const double numeric = oracle::central_difference(f, {q.values()[i]}, 0, 1e-5);
          EXPECT_LE(oracle::relative_error(grads[r].gradient[i], numeric), 1e-5)
              << name << " " << to_string(sem) << " " << s.labels()[r] << " atom " << i;
        }
      }
    }
  }
}

TEST(Predict, NearIndicatorBefore) {
  const auto c = configuration_from_intervals(1, 2, 3, 4);
  const auto q = encode(c);
  std::array<double, 8> v{};
  for (std::size_t i = 0; i < 8; ++i) v[i] = q[QAtom::from_index(i)] ? 0.99 : 0.01;
  EXPECT_EQ(predict(QVector(v), builtin_schema("tbdense")).relation, "Before");
}

TEST(Predict, ExactTieBreaksBySchemaOrder) {
  const auto d = predict(ss_only(0.5, 0.5), builtin_schema("matres"));
  EXPECT_EQ(d.relation, "Before");
  EXPECT_FALSE(d.ambiguous);
}

TEST(Predict, EqualsConvertOnEveryBinaryInput) {
  for (const auto& name : kSchemas) {
    const auto& s = builtin_schema(name);
    for (std::size_t m = 0; m < QAssignment::kCount; ++m) {
      const QAssignment q(static_cast<std::uint8_t>(m));
      EXPECT_EQ(predict(QVector(q), s), convert(q, s)) << name << " m=" << m;
    }
  }
}

TEST(TransferDecode, MatresReadsOnlyTheStartPoints) {
  const auto& matres = builtin_schema("matres");
  for (std::size_t m = 0; m < QAssignment::kCount; ++m) {
    const QAssignment q(static_cast<std::uint8_t>(m));
    if (answers_to_relation(q.answers(PointPair::SS)) == PointRelation::Before) {
      EXPECT_EQ(transfer_decode(q, matres).relation, "Before");
    }
  }
  for (const auto& c : enumerate_consistent_configurations()) {
    EXPECT_EQ(transfer_decode(encode(c), matres).relation, project(c, matres));
    EXPECT_EQ(transfer_decode(QVector(encode(c)), matres).relation, project(c, matres));
  }
}

TEST(TransferDecode, IncludesWithEarlierStartIsMatresBefore) {
  const auto c = configuration_from_intervals(0, 5, 1, 3);
  ASSERT_EQ(project(c, builtin_schema("tbdense")), "Includes");
  EXPECT_EQ(transfer_decode(encode(c), builtin_schema("matres")).relation, "Before");
}

TEST(LabelMapping, BuiltinMappings) {
  const auto& m1 = builtin_label_mapping("mapping1");
  const auto& m2 = builtin_label_mapping("mapping2");
  EXPECT_EQ(map_labels("Includes", m1), "Vague");
  EXPECT_EQ(map_labels("Is_Included", m1), "Vague");
  EXPECT_EQ(map_labels("Includes", m2), "Before");
  EXPECT_EQ(map_labels("Is_Included", m2), "After");
  for (const auto* m : {&m1, &m2}) {
    EXPECT_EQ(map_labels("Simultaneous", *m), "Equal");
    EXPECT_EQ(map_labels("Before", *m), "Before");
    EXPECT_EQ(map_labels("Vague", *m), "Vague");
  }
  EXPECT_THROW((void)map_labels("Overlaps", m1), UnknownRelation);
}

TEST(LabelMapping, MustBeTotal) {
  EXPECT_THROW((void)parse_label_mapping(R"({"name":"partial","map":{"Before":"Before"}})",
                                         builtin_schema("tbdense"), builtin_schema("matres")),
               SchemaError);
}

TEST(LlmAggregation, WorkedExamples) {
  using enum LlmAnswer;
  EXPECT_EQ(aggregate_llm_answers({Event1, Event2}, {Event1, Event2}), "Before");
  EXPECT_EQ(aggregate_llm_answers({Event1, Other}, {Other, Event1}), "Includes");
  EXPECT_EQ(aggregate_llm_answers({Event1, Event1}, {Event2, Event2}), "Vague");
}

TEST(Semantics, Names) {
  EXPECT_EQ(parse_semantics("paper_soft"), Semantics::PaperSoft);
  EXPECT_EQ(parse_semantics("prob_sum"), Semantics::ProbSum);
  EXPECT_THROW((void)parse_semantics("max"), DomainError);
}
