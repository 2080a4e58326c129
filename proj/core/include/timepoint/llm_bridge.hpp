#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "timepoint/inference.hpp"
#include "timepoint/schema.hpp"
#include "timepoint/transport.hpp"

namespace timepoint {

class MissingPlaceholder : public Error {
public:
  explicit MissingPlaceholder(const std::string& message) : Error("MissingPlaceholder", message) {}
};

enum class PromptMode { Unified, Classification };
enum class CandidateOrder { Fixed, Random };

struct PromptTemplate {
  std::string name;
  PromptMode mode = PromptMode::Unified;
  /// Unified templates: which time point is asked about ("start" or "end").
  std::string point;
  CandidateOrder order = CandidateOrder::Fixed;
  std::string text;
  /// Unified: {"event_1", "event_2"}. Classification: candidate labels in
  /// the order used when `order` is Fixed.
  std::vector<std::string> answers;
};

/// {"templates": [{"name", "mode", "point"?, "order"?, "text", "answers"}]}.
/// Throws ParseError.
[[nodiscard]] std::vector<PromptTemplate> parse_prompt_templates(std::string_view json);
[[nodiscard]] const std::vector<PromptTemplate>& builtin_prompt_templates();
/// Throws DomainError if no template has that name.
[[nodiscard]] const PromptTemplate& find_prompt_template(std::string_view name,
                                                         std::span<const PromptTemplate> templates);
[[nodiscard]] const PromptTemplate& find_prompt_template(std::string_view name);

/// An event trigger word, optionally pinned to a byte offset in the text.
/// Without an offset the first whole-word occurrence is used (the second one
/// for event 2 when both events share a trigger).
struct EventMention {
  std::string trigger;
  std::optional<std::size_t> offset;

  EventMention(std::string t) : trigger(std::move(t)) {}  // NOLINT(google-explicit-constructor)
  EventMention(const char* t) : trigger(t) {}             // NOLINT(google-explicit-constructor)
  EventMention(std::string t, std::size_t at) : trigger(std::move(t)), offset(at) {}
};

/// Puts ### in front of event 1 and *** in front of event 2. Triggers that
/// already carry their marker are left alone. Throws DomainError if a
/// trigger is empty or cannot be located.
[[nodiscard]] std::string mark_events(std::string_view text, const EventMention& e1, const EventMention& e2);

/// Substitutes {NAME} placeholders. Throws MissingPlaceholder for a
/// placeholder with no value.
[[nodiscard]] std::string fill_placeholders(std::string_view text,
                                            const std::map<std::string, std::string>& values);

/// Fills {TEXT} (with markers), {EVENT_1} and {EVENT_2}.
[[nodiscard]] std::string render(const PromptTemplate& t, std::string_view text, const EventMention& e1,
                                 const EventMention& e2);
/// As above, also filling {CANDIDATES} with the comma-separated labels.
[[nodiscard]] std::string render(const PromptTemplate& t, std::string_view text, const EventMention& e1,
                                 const EventMention& e2, std::span<const std::string> candidates);

/// Case-insensitive, whole-word: event_1 when only "event_1" (or the event 1
/// trigger) occurs, event_2 likewise, Other when both or neither occur.
[[nodiscard]] LlmAnswer parse_answer(std::string_view response, std::string_view trigger1 = {},
                                     std::string_view trigger2 = {});

struct LlmOptions {
  std::string model;
  double temperature = 0.0;
  int max_tokens = 256;
};

struct PromptExchange {
  std::string template_name;
  std::string prompt;
  std::string response;
  LlmAnswer answer = LlmAnswer::Other;
};

struct UnifiedTrace {
  std::vector<PromptExchange> exchanges;
  std::optional<PointRelation> start;
  std::optional<PointRelation> end;
  std::string relation;

  [[nodiscard]] std::string to_json() const;
};

/// A TransportError raised mid-run; keeps the exchanges completed so far.
class UnifiedRunError : public TransportError {
public:
  UnifiedRunError(const std::string& message, UnifiedTrace partial)
      : TransportError(message), trace_(std::move(partial)) {}

  [[nodiscard]] const UnifiedTrace& trace() const noexcept { return trace_; }

private:
  UnifiedTrace trace_;
};

/// Asks Prompt1 to Prompt4 (start first, start later, end first, end later)
/// and aggregates the parsed answers. Throws UnifiedRunError.
[[nodiscard]] UnifiedTrace run_unified(std::string_view text, const EventMention& e1, const EventMention& e2,
                                       Transport& transport, const LlmOptions& options = {});

struct LlmInstance {
  std::string id;
  std::string text;
  std::string event1;
  std::string event2;
  std::optional<std::size_t> event1_offset;
  std::optional<std::size_t> event2_offset;
  std::optional<std::string> gold;
};

/// JSONL: {"id", "text", "event_1", "event_2", "event_1_offset"?, "event_2_offset"?, "gold"?}.
/// Throws ParseError or DuplicateId.
[[nodiscard]] std::vector<LlmInstance> parse_llm_instances(std::string_view jsonl);
[[nodiscard]] std::vector<LlmInstance> read_llm_instances(const std::filesystem::path& path);

struct UnifiedOutcome {
  std::string id;
  UnifiedTrace trace;
  /// Empty on success.
  std::string error;
};

/// Runs every instance with at most max_in_flight concurrent instances.
/// Results come back in input order; failures are reported per instance.
[[nodiscard]] std::vector<UnifiedOutcome> run_unified_batch(std::span<const LlmInstance> instances,
                                                            Transport& transport, const LlmOptions& options,
                                                            std::size_t max_in_flight);

/// The label named in a classification response, or nothing if zero or
/// several labels occur. A line starting with "Answer:" takes precedence.
[[nodiscard]] std::optional<std::string> parse_classification_answer(std::string_view response,
                                                                     std::span<const std::string> labels);

/// Majority label; ties and an empty vote go to vague_label. Unparsed votes
/// count for vague_label.
[[nodiscard]] std::string majority_vote(std::span<const std::optional<std::string>> votes,
                                        std::span<const std::string> labels, const std::string& vague_label);

struct ClassificationTrace {
  std::vector<std::string> candidates;
  std::string prompt;
  std::vector<std::string> responses;
  std::vector<std::optional<std::string>> votes;
  std::string relation;

  [[nodiscard]] std::string to_json() const;
};

struct ClassificationOptions {
  LlmOptions llm{.model = {}, .temperature = 0.7, .max_tokens = 512};
  int samples = 5;
  std::uint64_t seed = 0;
};

/// Classification prompting with self-consistency over `samples` responses.
/// Candidates are the schema labels, shuffled by seed for Random templates.
[[nodiscard]] ClassificationTrace classify(const PromptTemplate& t, std::string_view text, const EventMention& e1,
                                           const EventMention& e2, const RelationSchema& s, Transport& transport,
                                           const ClassificationOptions& options = {});

}  // namespace timepoint
