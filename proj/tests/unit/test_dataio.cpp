#include <gtest/gtest.h>

#include <filesystem>

#include "timepoint/builtin.hpp"
#include "timepoint/dataio.hpp"

using namespace timepoint;

namespace {

std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(TIMEPOINT_FIXTURES_DIR) / name;
}

std::vector<PairRecord> numbered(std::size_t n) {
  std::vector<PairRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"r" + std::to_string(i), Split::Train, "Before", {}, {}});
  return out;
}

}  // namespace

TEST(ReadPairs, EmptyInput) {
  EXPECT_TRUE(parse_pairs("", builtin_schema("tbdense")).empty());
  EXPECT_TRUE(parse_pairs("\n  \n", builtin_schema("tbdense")).empty());
}

TEST(ReadPairs, GoldenFileRoundTrip) {
  const auto text = read_text_file(fixture("pairs_tbdense.jsonl"));
  const auto records = parse_pairs(text, builtin_schema("tbdense"));
  ASSERT_EQ(records.size(), 6u);
  EXPECT_EQ(records[1].gold, "Includes");
  EXPECT_EQ(records[1].features->size(), 4u);
  EXPECT_EQ((*records[1].gold_config)[PointPair::EE], PointRelation::After);
  EXPECT_FALSE(records[5].features.has_value());
  EXPECT_EQ(format_pairs(records), text);
}

TEST(ReadPairs, UnknownLabelNamesTheRecord) {
  try {
    (void)read_pairs(fixture("pairs_bad_label.jsonl"), builtin_schema("tbdense"));
    FAIL() << "expected UnknownRelation";
  } catch (const UnknownRelation& e) {
    EXPECT_NE(std::string(e.what()).find("bad-7"), std::string::npos);
  }
}

TEST(ReadPairs, Errors) {
  const auto& s = builtin_schema("matres");
  EXPECT_THROW((void)parse_pairs("{\"id\":\"a\",\"gold\":\"Before\"}\n{\"id\":\"a\",\"gold\":\"After\"}\n", s),
               DuplicateId);
  try {
    (void)parse_pairs("{\"id\":\"a\",\"gold\":\"Before\"}\n{not json\n", s);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW((void)parse_pairs(R"({"id":"a","gold":"Before","split":"holdout"})", s), ParseError);
  EXPECT_THROW((void)read_pairs(fixture("missing.jsonl"), s), IoError);
}

TEST(SymmetryAugment, AppendsSwappedTwins) {
  const auto& s = builtin_schema("tbdense");
  const auto records = read_pairs(fixture("pairs_tbdense.jsonl"), s);
  const auto out = symmetry_augment(records, s, [](const std::string&) {});
  ASSERT_EQ(out.size(), 2 * records.size());
  const auto& twin = out[records.size()];
  EXPECT_EQ(twin.id, "p1#sym");
  EXPECT_EQ(twin.gold, "After");
  EXPECT_EQ(*twin.features, (std::vector<double>{2.0, 0.0, 0.5, -1.25}));
  EXPECT_EQ(*twin.gold_config, swap_events(*records[0].gold_config));
  EXPECT_EQ(out[records.size() + 3].gold, "Vague");
  EXPECT_EQ(out[records.size() + 1].gold, "Is_Included");
}

TEST(SymmetryAugment, LabelsStayConsistentWithConfigurations) {
  const auto& s = builtin_schema("tbdense");
  for (const auto& r : symmetry_augment(read_pairs(fixture("pairs_tbdense.jsonl"), s), s)) {
    if (r.gold_config) EXPECT_EQ(project(*r.gold_config, s), r.gold) << r.id;
  }
}

TEST(SymmetryAugment, TwiceReturnsOriginalLabels) {
  const auto& s = builtin_schema("tbdense");
  const auto records = read_pairs(fixture("pairs_tbdense.jsonl"), s);
  const auto once = symmetry_augment(records, s);
  std::vector<PairRecord> twins(once.begin() + static_cast<std::ptrdiff_t>(records.size()), once.end());
  const auto twice = symmetry_augment(twins, s);
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(twice[records.size() + i].gold, records[i].gold);
    EXPECT_EQ(twice[records.size() + i].features, records[i].features);
  }
}

TEST(SymmetryAugment, OddFeatureLengthWarns) {
  const auto& s = builtin_schema("matres");
  const std::vector<PairRecord> records{{"odd", Split::Train, "Before", std::vector<double>{1, 2, 3}, {}}};
  std::vector<std::string> warnings;
  const auto out = symmetry_augment(records, s, [&](const std::string& w) { warnings.push_back(w); });
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_EQ(out[1].features, records[0].features);
  EXPECT_EQ(out[1].gold, "After");
}

TEST(SymmetryAugment, RefusesEvaluationSplits) {
  const auto& s = builtin_schema("tbdense");
  EXPECT_THROW((void)symmetry_augment(read_pairs(fixture("pairs_mixed_split.jsonl"), s), s), SplitViolation);
}

TEST(SplitSample, FullFractionIsIdentity) {
  const auto records = numbered(25);
  EXPECT_EQ(split_sample(records, 1.0, 3), records);
}

TEST(SplitSample, FloorAndMinimum) {
  EXPECT_EQ(split_sample(numbered(1000), 0.1, 1).size(), 100u);
  EXPECT_EQ(split_sample(numbered(5), 0.01, 1).size(), 1u);
  EXPECT_THROW((void)split_sample(numbered(5), 0.0, 1), DomainError);
  EXPECT_THROW((void)split_sample(numbered(5), 1.5, 1), DomainError);
}

TEST(SplitSample, SeededAndOrderPreserving) {
  const auto records = numbered(200);
  const auto a = split_sample(records, 0.3, 9);
  EXPECT_EQ(a, split_sample(records, 0.3, 9));
  EXPECT_NE(a, split_sample(records, 0.3, 10));
  for (std::size_t i = 1; i < a.size(); ++i) {
    EXPECT_LT(std::stoi(a[i - 1].id.substr(1)), std::stoi(a[i].id.substr(1)));
  }
}

TEST(Predictions, RoundTrip) {
  std::array<double, 8> v{};
  v.fill(0.25);
  std::vector<PredictionRecord> in(2);
  in[0].id = "a";
  in[0].q = QVector(v);
  in[1].id = "b";
  in[1].relation = "Before";
  in[1].ambiguous = true;
  const auto text = format_predictions(in);
  const auto back = parse_predictions(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].q->values(), v);
  EXPECT_EQ(*back[1].relation, "Before");
  EXPECT_TRUE(back[1].ambiguous);
  EXPECT_EQ(format_predictions(back), text);
  EXPECT_THROW((void)parse_predictions(R"({"id":"x","q":[0.5,0.5]})"), ParseError);
  EXPECT_THROW((void)parse_predictions(R"({"id":"x","q":[0.5,0.5,0.5,0.5,0.5,0.5,0.5,2.0]})"), ParseError);
  EXPECT_THROW((void)parse_predictions(R"({"id":"x"})"), ParseError);
}
