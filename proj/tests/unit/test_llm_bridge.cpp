#include <gtest/gtest.h>

#include <filesystem>

#include "timepoint/builtin.hpp"
#include "timepoint/dataio.hpp"
#include "timepoint/llm_bridge.hpp"

using namespace timepoint;

namespace {

std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(TIMEPOINT_FIXTURES_DIR) / name;
}

/// Answers the four unified prompts from a fixed list, by question.
std::unique_ptr<MockTransport> answering(const std::array<std::string, 4>& a) {
  return std::make_unique<MockTransport>(
      std::vector<MockTransport::Rule>{{{"starts first?"}, {a[0]}, {}},
                                       {{"starts later?"}, {a[1]}, {}},
                                       {{"ends first?"}, {a[2]}, {}},
                                       {{"ends later?"}, {a[3]}, {}}},
      "");
}

class TempDir {
public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("timepoint-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

const char* kSentence = "The troops attacked the city after the mayor resigned.";

}  // namespace

TEST(Render, NoPlaceholdersIsVerbatim) {
  PromptTemplate t;
  t.text = "Answer with event_1 or event_2. {not a placeholder}";
  EXPECT_EQ(render(t, kSentence, "attacked", "resigned"), t.text);
}

TEST(Render, MissingPlaceholder) {
  PromptTemplate t;
  t.text = "{TEXT} {CANDIDATES}";
  EXPECT_THROW((void)render(t, kSentence, "attacked", "resigned"), MissingPlaceholder);
}

TEST(Render, Prompt1MatchesGoldenFile) {
  const auto rendered = render(find_prompt_template("prompt1"), kSentence, "attacked", "resigned");
  EXPECT_EQ(rendered, read_text_file(fixture("prompt1_expected.txt")));
}

TEST(Render, MarkersArePlacedOnceBeforeTriggers) {
  const auto marked = mark_events(kSentence, "attacked", "resigned");
  EXPECT_EQ(marked, "The troops ###attacked the city after the mayor ***resigned.");
  EXPECT_EQ(mark_events(marked, "attacked", "resigned"), marked);
  const auto& t = find_prompt_template("prompt2");
  EXPECT_EQ(render(t, kSentence, "attacked", "resigned"), render(t, kSentence, "attacked", "resigned"));
}

TEST(Render, SharedTriggerAndOffsets) {
  EXPECT_EQ(mark_events("He said that she said no.", "said", "said"), "He ###said that she ***said no.");
  EXPECT_EQ(mark_events("He said that she said no.", EventMention("said", 17), EventMention("said", 3)),
            "He ***said that she ###said no.");
  EXPECT_THROW((void)mark_events(kSentence, "fled", "resigned"), DomainError);
  EXPECT_THROW((void)mark_events(kSentence, EventMention("attacked", 0), "resigned"), DomainError);
  EXPECT_THROW((void)mark_events("attacker attacked", "attack", "attacked"), DomainError);
}

TEST(ParseAnswer, Labels) {
  EXPECT_EQ(parse_answer("event_1"), LlmAnswer::Event1);
  EXPECT_EQ(parse_answer("The answer is EVENT_2."), LlmAnswer::Event2);
  EXPECT_EQ(parse_answer("It is impossible to tell."), LlmAnswer::Other);
  EXPECT_EQ(parse_answer("event_1, though event_2 is close"), LlmAnswer::Other);
  EXPECT_EQ(parse_answer("event_12"), LlmAnswer::Other);
}

TEST(ParseAnswer, TriggerWords) {
  EXPECT_EQ(parse_answer("Attacked, clearly.", "attacked", "resigned"), LlmAnswer::Event1);
  EXPECT_EQ(parse_answer("resigned", "attacked", "resigned"), LlmAnswer::Event2);
  EXPECT_EQ(parse_answer("event_1 (resigned)", "attacked", "resigned"), LlmAnswer::Other);
  EXPECT_EQ(parse_answer("said", "said", "said"), LlmAnswer::Other);
}

TEST(RunUnified, BeforeFromConsistentAnswers) {
  auto mock = answering({"event_1", "event_2", "event_1", "event_2"});
  const auto trace = run_unified(kSentence, "attacked", "resigned", *mock);
  EXPECT_EQ(trace.relation, "Before");
  ASSERT_EQ(trace.exchanges.size(), 4u);
  EXPECT_EQ(trace.exchanges[2].template_name, "prompt3");
  EXPECT_EQ(*trace.start, PointRelation::Before);
  EXPECT_EQ(*trace.end, PointRelation::Before);
  EXPECT_EQ(mock->calls(), 4u);
}

TEST(RunUnified, UnsureIsVague) {
  MockTransport mock({}, "unsure");
  EXPECT_EQ(run_unified(kSentence, "attacked", "resigned", mock).relation, "Vague");
}

TEST(RunUnified, RelationIsTheAggregateOfTheTrace) {
  const std::array<std::string, 3> options{"event_1", "event_2", "no idea"};
  for (std::size_t code = 0; code < 81; ++code) {
    std::array<std::string, 4> a;
    auto c = code;
    for (auto& x : a) {
      x = options[c % 3];
      c /= 3;
    }
    auto mock = answering(a);
    const auto trace = run_unified(kSentence, "attacked", "resigned", *mock);
    const auto& x = trace.exchanges;
    EXPECT_EQ(trace.relation, aggregate_llm_answers({x[0].answer, x[1].answer}, {x[2].answer, x[3].answer}));
  }
}

TEST(RunUnified, FailureKeepsPartialTrace) {
  auto mock = MockTransport::from_script_file(fixture("fail_prompt3.json"));
  try {
    (void)run_unified(kSentence, "attacked", "resigned", *mock);
    FAIL() << "expected TransportError";
  } catch (const UnifiedRunError& e) {
    EXPECT_EQ(e.name(), "TransportError");
    ASSERT_EQ(e.trace().exchanges.size(), 2u);
    EXPECT_EQ(e.trace().exchanges[0].answer, LlmAnswer::Event1);
    EXPECT_EQ(e.trace().exchanges[1].answer, LlmAnswer::Event2);
    EXPECT_NE(std::string(e.what()).find("connection reset"), std::string::npos);
  }
}

TEST(RunUnifiedBatch, ScriptedMockReproducesPinnedOutput) {
  const auto instances = read_llm_instances(fixture("llm_instances.jsonl"));
  auto mock = MockTransport::from_script_file(fixture("answers.json"));
  for (std::size_t threads : {1u, 3u}) {
    const auto outcomes = run_unified_batch(instances, *mock, {}, threads);
    std::vector<PredictionRecord> out;
    for (const auto& o : outcomes) {
      EXPECT_TRUE(o.error.empty()) << o.error;
      out.push_back({o.id, {}, o.trace.relation, false});
    }
    EXPECT_EQ(format_predictions(out), read_text_file(fixture("expected_relations.jsonl")));
  }
}

TEST(Cache, HitsAndReplaysIdentically) {
  TempDir dir;
  const auto instances = read_llm_instances(fixture("llm_instances.jsonl"));
  auto script = std::shared_ptr<MockTransport>(MockTransport::from_script_file(fixture("answers.json")));
  CachingTransport caching(dir.path(), script);
  const auto first = run_unified_batch(instances, caching, {}, 2);
  EXPECT_EQ(caching.misses(), 20u);
  EXPECT_EQ(caching.hits(), 0u);
  const auto again = run_unified_batch(instances, caching, {}, 2);
  EXPECT_EQ(caching.hits(), 20u);
  EXPECT_EQ(script->calls(), 20u);

  CachingTransport replay(dir.path(), nullptr);
  const auto replayed = run_unified_batch(instances, replay, {}, 1);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    EXPECT_EQ(replayed[i].trace.to_json(), first[i].trace.to_json());
    EXPECT_EQ(again[i].trace.to_json(), first[i].trace.to_json());
  }
  CachingTransport empty(dir.path() / "nothing", nullptr);
  EXPECT_THROW((void)run_unified(kSentence, "attacked", "resigned", empty), TransportError);
}

TEST(Transport, RequestHashIsContentAddressed) {
  TransportRequest a{"m", {{"user", "hello"}}, 0.0, 16, 0};
  auto b = a;
  EXPECT_EQ(a.content_hash(), b.content_hash());
  EXPECT_EQ(a.content_hash().size(), 64u);
  b.sample = 1;
  EXPECT_NE(a.content_hash(), b.content_hash());
  EXPECT_EQ(TransportRequest::from_json(a.to_json()), a);
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Transport, PacingRetriesThenSucceeds) {
  struct Flaky : Transport {
    int failures = 2;
    int calls = 0;
    TransportResponse complete(const TransportRequest&) override {
      ++calls;
      if (failures-- > 0) throw TransportError("busy");
      return {"event_1", "stop", {}};
    }
  };
  auto flaky = std::make_shared<Flaky>();
  PacedTransport paced(flaky, {std::chrono::milliseconds{1}, 3, std::chrono::milliseconds{1}, 2.0});
  EXPECT_EQ(paced.complete({}).text, "event_1");
  EXPECT_EQ(flaky->calls, 3);
  auto hopeless = std::make_shared<Flaky>();
  hopeless->failures = 10;
  PacedTransport limited(hopeless, {std::chrono::milliseconds{0}, 1, std::chrono::milliseconds{1}, 2.0});
  EXPECT_THROW((void)limited.complete({}), TransportError);
  EXPECT_EQ(hopeless->calls, 2);
}

TEST(Transport, HttpSettingsFromEnvironment) {
  ::setenv("TIMEPOINT_LLM_MODEL", "test-model", 1);
  ::setenv("TIMEPOINT_LLM_ENDPOINT", "http://127.0.0.1:9/v1/chat/completions", 1);
  const auto s = HttpSettings::from_environment();
  EXPECT_EQ(s.model, "test-model");
  EXPECT_EQ(s.endpoint, "http://127.0.0.1:9/v1/chat/completions");
  ::unsetenv("TIMEPOINT_LLM_MODEL");
  ::unsetenv("TIMEPOINT_LLM_ENDPOINT");
  HttpSettings unreachable = s;
  unreachable.timeout = std::chrono::seconds{1};
  HttpTransport http(unreachable);
  EXPECT_THROW((void)http.complete({"m", {{"user", "hi"}}, 0.0, 4, 0}), TransportError);
  EXPECT_THROW(HttpTransport(HttpSettings{.endpoint = "no-scheme"}), TransportError);
}

TEST(Classification, ParsesAndVotes) {
  const auto& s = builtin_schema("tbdense");
  const auto& labels = s.labels();
  EXPECT_EQ(parse_classification_answer("Is_Included", labels), "Is_Included");
  EXPECT_EQ(parse_classification_answer("Step 1: Before? no.\nAnswer: After", labels), "After");
  EXPECT_FALSE(parse_classification_answer("Before or After", labels).has_value());
  EXPECT_FALSE(parse_classification_answer("no idea", labels).has_value());

  using V = std::vector<std::optional<std::string>>;
  EXPECT_EQ(majority_vote(V{"Before", "Before", "After"}, labels, "Vague"), "Before");
  EXPECT_EQ(majority_vote(V{"Before", "After"}, labels, "Vague"), "Vague");
  EXPECT_EQ(majority_vote(V{std::nullopt, std::nullopt, "After"}, labels, "Vague"), "Vague");
  EXPECT_EQ(majority_vote(V{}, labels, "Vague"), "Vague");
}

TEST(Classification, SelfConsistencyOverSamples) {
  const auto& s = builtin_schema("tbdense");
  MockTransport mock({{{"temporal relation"}, {"Before", "After", "Before", "Answer: Before", "unclear"}, {}}}, "");
  const auto trace = classify(find_prompt_template("classification"), kSentence, "attacked", "resigned", s, mock);
  EXPECT_EQ(trace.responses.size(), 5u);
  EXPECT_EQ(trace.relation, "Before");
  EXPECT_EQ(trace.candidates.size(), s.labels().size());

  const auto fixed = classify(find_prompt_template("classification_before_last"), kSentence, "attacked", "resigned", s, mock);
  EXPECT_EQ(fixed.candidates.back(), "Before");
  EXPECT_NE(fixed.prompt.find("After, Vague, Includes, Is_Included, Simultaneous, Before"), std::string::npos);
  EXPECT_THROW((void)classify(find_prompt_template("prompt1"), kSentence, "attacked", "resigned", s, mock), DomainError);
}

TEST(Templates, BuiltinsLoad) {
  const auto& all = builtin_prompt_templates();
  for (const char* name : {"prompt1", "prompt2", "prompt3", "prompt4", "classification", "classification_before_first",
                           "classification_before_last", "classification_no_direction", "classification_cot"}) {
    EXPECT_NO_THROW((void)find_prompt_template(name, all)) << name;
  }
  EXPECT_THROW((void)find_prompt_template("prompt5"), DomainError);
  EXPECT_THROW((void)parse_prompt_templates(R"({"templates":[{"name":"x","mode":"chat","text":""}]})"), ParseError);
}
