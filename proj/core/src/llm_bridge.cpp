#include "timepoint/llm_bridge.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "timepoint/builtin.hpp"

namespace timepoint {

using ordered_json = nlohmann::ordered_json;

namespace {

bool is_word_char(char c) noexcept {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool word_at(std::string_view text, std::string_view word, std::size_t pos) {
  if (pos + word.size() > text.size() || text.substr(pos, word.size()) != word) return false;
  const bool left = pos == 0 || !is_word_char(text[pos - 1]) || !is_word_char(word.front());
  const auto after = pos + word.size();
  const bool right = after == text.size() || !is_word_char(text[after]) || !is_word_char(word.back());
  return left && right;
}

std::optional<std::size_t> find_word(std::string_view text, std::string_view word, std::size_t from = 0,
                                     std::optional<std::size_t> skip = std::nullopt) {
  if (word.empty()) return std::nullopt;
  for (auto pos = text.find(word, from); pos != std::string_view::npos; pos = text.find(word, pos + 1)) {
    if (skip && pos == *skip) continue;
    if (word_at(text, word, pos)) return pos;
  }
  return std::nullopt;
}

bool contains_word(std::string_view text_lower, std::string_view word) {
  return find_word(text_lower, lower(word)).has_value();
}

std::size_t locate(std::string_view text, const EventMention& e, std::optional<std::size_t> taken,
                   const char* which) {
  if (e.trigger.empty()) throw DomainError(std::string(which) + " trigger is empty");
  if (e.offset) {
    if (text.substr(*e.offset, e.trigger.size()) != e.trigger) {
      throw DomainError(std::string(which) + " trigger '" + e.trigger + "' is not at offset " +
                        std::to_string(*e.offset));
    }
    return *e.offset;
  }
  const auto pos = find_word(text, e.trigger, 0, taken);
  if (!pos) throw DomainError(std::string(which) + " trigger '" + e.trigger + "' does not occur in the text");
  return *pos;
}

bool marked(std::string_view text, std::size_t pos, std::string_view marker) {
  return pos >= marker.size() && text.substr(pos - marker.size(), marker.size()) == marker;
}

PromptMode parse_mode(const std::string& s) {
  if (s == "unified") return PromptMode::Unified;
  if (s == "classification") return PromptMode::Classification;
  throw ParseError("unknown prompt mode '" + s + "'", 1, 1);
}

std::string_view to_string(PromptMode m) {
  return m == PromptMode::Unified ? "unified" : "classification";
}

std::string point_name(std::optional<PointRelation> z) {
  return z ? std::string(to_string(*z)) : std::string();
}

ordered_json exchange_json(const PromptExchange& e) {
  return {{"template", e.template_name},
          {"prompt", e.prompt},
          {"response", e.response},
          {"answer", std::string(to_string(e.answer))}};
}

TransportRequest make_request(const LlmOptions& o, std::string prompt, int sample = 0) {
  TransportRequest r;
  r.model = o.model;
  r.messages.push_back({"user", std::move(prompt)});
  r.temperature = o.temperature;
  r.max_tokens = o.max_tokens;
  r.sample = sample;
  return r;
}

}  // namespace

std::vector<PromptTemplate> parse_prompt_templates(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    std::vector<PromptTemplate> out;
    std::set<std::string> names;
    for (const auto& t : j.at("templates")) {
      PromptTemplate p;
      p.name = t.at("name").get<std::string>();
      p.mode = parse_mode(t.at("mode").get<std::string>());
      p.point = t.value("point", std::string());
      const auto order = t.value("order", std::string("fixed"));
      if (order != "fixed" && order != "random") throw ParseError("unknown candidate order '" + order + "'", 1, 1);
      p.order = order == "random" ? CandidateOrder::Random : CandidateOrder::Fixed;
      p.text = t.at("text").get<std::string>();
      p.answers = t.value("answers", std::vector<std::string>{});
      if (!names.insert(p.name).second) throw ParseError("duplicate template '" + p.name + "'", 1, 1);
      out.push_back(std::move(p));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("prompt templates: ") + e.what(), 1, 1);
  }
}

const std::vector<PromptTemplate>& builtin_prompt_templates() {
  static const auto templates = [] {
    const auto text = embedded_file("prompts/prompts.json");
    if (!text) throw IoError("built-in prompt templates are missing");
    return parse_prompt_templates(*text);
  }();
  return templates;
}

const PromptTemplate& find_prompt_template(std::string_view name, std::span<const PromptTemplate> templates) {
  const auto it = std::ranges::find(templates, name, &PromptTemplate::name);
  if (it == templates.end()) throw DomainError("no prompt template named '" + std::string(name) + "'");
  return *it;
}

const PromptTemplate& find_prompt_template(std::string_view name) {
  return find_prompt_template(name, builtin_prompt_templates());
}

std::string mark_events(std::string_view text, const EventMention& e1, const EventMention& e2) {
  const auto p1 = locate(text, e1, std::nullopt, "event 1");
  const auto p2 = locate(text, e2, p1, "event 2");
  if (p1 == p2) throw DomainError("both events point at the same position");
  std::string out(text);
  const auto insert = [&](std::size_t pos, std::string_view marker) {
    if (!marked(out, pos, marker)) out.insert(pos, marker);
  };
  if (p1 > p2) {
    insert(p1, "###");
    insert(p2, "***");
  } else {
    insert(p2, "***");
    insert(p1, "###");
  }
  return out;
}

std::string fill_placeholders(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      auto j = i + 1;
      while (j < text.size() && (std::isupper(static_cast<unsigned char>(text[j])) ||
                                 std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      if (j > i + 1 && j < text.size() && text[j] == '}') {
        const std::string key(text.substr(i + 1, j - i - 1));
        const auto it = values.find(key);
        if (it == values.end()) throw MissingPlaceholder("no value for placeholder {" + key + "}");
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += text[i++];
  }
  return out;
}

std::string render(const PromptTemplate& t, std::string_view text, const EventMention& e1,
                   const EventMention& e2) {
  return fill_placeholders(
      t.text, {{"TEXT", mark_events(text, e1, e2)}, {"EVENT_1", e1.trigger}, {"EVENT_2", e2.trigger}});
}

std::string render(const PromptTemplate& t, std::string_view text, const EventMention& e1, const EventMention& e2,
                   std::span<const std::string> candidates) {
  std::string joined;
  for (const auto& c : candidates) {
    if (!joined.empty()) joined += ", ";
    joined += c;
  }
  return fill_placeholders(t.text, {{"TEXT", mark_events(text, e1, e2)},
                                    {"EVENT_1", e1.trigger},
                                    {"EVENT_2", e2.trigger},
                                    {"CANDIDATES", joined}});
}

LlmAnswer parse_answer(std::string_view response, std::string_view trigger1, std::string_view trigger2) {
  const auto text = lower(response);
  const bool distinct = lower(trigger1) != lower(trigger2);
  const bool one = contains_word(text, "event_1") || (distinct && contains_word(text, trigger1));
  const bool two = contains_word(text, "event_2") || (distinct && contains_word(text, trigger2));
  if (one == two) return LlmAnswer::Other;
  return one ? LlmAnswer::Event1 : LlmAnswer::Event2;
}

std::string UnifiedTrace::to_json() const {
  ordered_json j{{"exchanges", ordered_json::array()}};
  for (const auto& e : exchanges) j["exchanges"].push_back(exchange_json(e));
  j["start"] = point_name(start);
  j["end"] = point_name(end);
  j["relation"] = relation;
  return j.dump();
}

UnifiedTrace run_unified(std::string_view text, const EventMention& e1, const EventMention& e2,
                         Transport& transport, const LlmOptions& options) {
  static constexpr std::string_view kPrompts[] = {"prompt1", "prompt2", "prompt3", "prompt4"};
  UnifiedTrace trace;
  for (auto name : kPrompts) {
    PromptExchange ex;
    ex.template_name = name;
    ex.prompt = render(find_prompt_template(name), text, e1, e2);
    try {
      ex.response = transport.complete(make_request(options, ex.prompt)).text;
    } catch (const TransportError& e) {
      throw UnifiedRunError(std::string(name) + ": " + e.what(), std::move(trace));
    }
    ex.answer = parse_answer(ex.response, e1.trigger, e2.trigger);
    trace.exchanges.push_back(std::move(ex));
  }
  const auto& x = trace.exchanges;
  trace.start = answers_to_point_relation(x[0].answer, x[1].answer);
  trace.end = answers_to_point_relation(x[2].answer, x[3].answer);
  trace.relation = aggregate_llm_answers({x[0].answer, x[1].answer}, {x[2].answer, x[3].answer});
  return trace;
}

std::vector<LlmInstance> parse_llm_instances(std::string_view jsonl) {
  std::vector<LlmInstance> out;
  std::set<std::string> ids;
  std::size_t number = 0;
  std::istringstream in{std::string(jsonl)};
  for (std::string line; std::getline(in, line);) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    LlmInstance r;
    try {
      const auto j = nlohmann::json::parse(line);
      r.id = j.at("id").get<std::string>();
      r.text = j.at("text").get<std::string>();
      r.event1 = j.at("event_1").get<std::string>();
      r.event2 = j.at("event_2").get<std::string>();
      if (j.contains("event_1_offset")) r.event1_offset = j.at("event_1_offset").get<std::size_t>();
      if (j.contains("event_2_offset")) r.event2_offset = j.at("event_2_offset").get<std::size_t>();
      if (j.contains("gold")) r.gold = j.at("gold").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), number, 1);
    }
    if (!ids.insert(r.id).second) throw DuplicateId(r.id);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<LlmInstance> read_llm_instances(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_llm_instances(buffer.str());
}

namespace {

EventMention mention(const std::string& trigger, std::optional<std::size_t> offset) {
  return offset ? EventMention(trigger, *offset) : EventMention(trigger);
}

}  // namespace

std::vector<UnifiedOutcome> run_unified_batch(std::span<const LlmInstance> instances, Transport& transport,
                                              const LlmOptions& options, std::size_t max_in_flight) {
  std::vector<UnifiedOutcome> out(instances.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (auto i = next++; i < instances.size(); i = next++) {
      const auto& in = instances[i];
      auto& result = out[i];
      result.id = in.id;
      try {
        result.trace = run_unified(in.text, mention(in.event1, in.event1_offset),
                                   mention(in.event2, in.event2_offset), transport, options);
      } catch (const UnifiedRunError& e) {
        result.trace = e.trace();
        result.error = e.what();
      } catch (const Error& e) {
        result.error = e.what();
      }
    }
  };
  const auto threads = std::min(std::max<std::size_t>(max_in_flight, 1), instances.size());
  if (threads <= 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  return out;
}

std::optional<std::string> parse_classification_answer(std::string_view response,
                                                       std::span<const std::string> labels) {
  auto text = lower(response);
  std::istringstream lines{text};
  std::optional<std::string> answer_line;
  for (std::string line; std::getline(lines, line);) {
    const auto start = line.find_first_not_of(" \t*");
    if (start != std::string::npos && line.compare(start, 7, "answer:") == 0) answer_line = line.substr(start + 7);
  }
  if (answer_line) text = *answer_line;
  std::optional<std::string> found;
  for (const auto& label : labels) {
    if (!contains_word(text, label)) continue;
    if (found) return std::nullopt;
    found = label;
  }
  return found;
}

std::string majority_vote(std::span<const std::optional<std::string>> votes, std::span<const std::string> labels,
                          const std::string& vague_label) {
  std::map<std::string, int> counts;
  for (const auto& v : votes) ++counts[v ? *v : vague_label];
  std::string best = vague_label;
  int best_count = 0;
  bool tie = false;
  for (const auto& label : labels) {
    const auto it = counts.find(label);
    const int c = it == counts.end() ? 0 : it->second;
    if (c > best_count) {
      best = label;
      best_count = c;
      tie = false;
    } else if (c == best_count && c > 0) {
      tie = true;
    }
  }
  return tie || best_count == 0 ? vague_label : best;
}

std::string ClassificationTrace::to_json() const {
  ordered_json j{{"candidates", candidates}, {"prompt", prompt}, {"responses", responses}};
  auto v = ordered_json::array();
  for (const auto& vote : votes) v.push_back(vote ? ordered_json(*vote) : ordered_json(nullptr));
  j["votes"] = std::move(v);
  j["relation"] = relation;
  return j.dump();
}

ClassificationTrace classify(const PromptTemplate& t, std::string_view text, const EventMention& e1,
                             const EventMention& e2, const RelationSchema& s, Transport& transport,
                             const ClassificationOptions& options) {
  if (t.mode != PromptMode::Classification) {
    throw DomainError("template '" + t.name + "' is " + std::string(to_string(t.mode)) + ", not classification");
  }
  if (options.samples < 1) throw DomainError("self-consistency needs at least one sample");
  const auto labels = s.labels();
  ClassificationTrace trace;
  if (t.order == CandidateOrder::Fixed) {
    for (const auto& a : t.answers) {
      if (s.contains(a)) trace.candidates.push_back(a);
    }
    for (const auto& l : labels) {
      if (std::ranges::find(trace.candidates, l) == trace.candidates.end()) trace.candidates.push_back(l);
    }
  } else {
    trace.candidates = labels;
    std::mt19937_64 rng(options.seed);
    std::shuffle(trace.candidates.begin(), trace.candidates.end(), rng);
  }
  trace.prompt = render(t, text, e1, e2, trace.candidates);
  for (int k = 0; k < options.samples; ++k) {
    auto response = transport.complete(make_request(options.llm, trace.prompt, k)).text;
    trace.votes.push_back(parse_classification_answer(response, labels));
    trace.responses.push_back(std::move(response));
  }
  trace.relation = majority_vote(trace.votes, labels, s.vague_name());
  return trace;
}

}  // namespace timepoint
