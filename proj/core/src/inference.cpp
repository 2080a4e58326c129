#include "timepoint/inference.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <numeric>

#include <nlohmann/json.hpp>

#include "timepoint/builtin.hpp"

namespace timepoint {

std::string_view to_string(Semantics s) noexcept {
  return s == Semantics::PaperSoft ? "paper_soft" : "prob_sum";
}

Semantics parse_semantics(std::string_view text) {
  if (text == "paper_soft") return Semantics::PaperSoft;
  if (text == "prob_sum") return Semantics::ProbSum;
  throw DomainError("unknown semantics '" + std::string(text) + "'");
}

Decision convert(QAssignment q, const RelationSchema& s) {
  const auto matches = matching_relations(s, q);
  if (matches.size() == 1) return {s.labels()[matches.front()], false};
  return {s.vague_name(), true};
}

Decision convert(const QVector& q, const RelationSchema& s) {
  if (!q.is_binary()) throw DomainError("convert requires binary answers; threshold first");
  return convert(q.threshold(), s);
}

RelationDistribution::RelationDistribution(std::string schema, std::vector<std::string> labels,
                                           std::vector<double> values, Semantics semantics)
    : schema_(std::move(schema)),
      labels_(std::move(labels)),
      values_(std::move(values)),
      semantics_(semantics) {
  if (labels_.size() != values_.size()) throw DimensionMismatch("one value per label expected");
}

double RelationDistribution::operator[](std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return values_[i];
  }
  throw UnknownRelation("'" + std::string(label) + "' is not in the distribution");
}

double RelationDistribution::sum() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

std::string RelationDistribution::to_json() const {
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < labels_.size(); ++i) values[labels_[i]] = values_[i];
  nlohmann::ordered_json j{{"schema", schema_},
                           {"semantics", std::string(to_string(semantics_))},
                           {"values", values}};
  return j.dump();
}

std::vector<MintermSet> decision_minterms(const RelationSchema& s) {
  std::vector<MintermSet> out(s.labels().size());
  for (std::size_t m = 0; m < QAssignment::kCount; ++m) {
    const auto d = convert(QAssignment(static_cast<std::uint8_t>(m)), s);
    out[s.index_of(d.relation)][m] = true;
  }
  return out;
}

std::vector<SoftValue> soft_distribution_with_gradient(const QVector& p, const RelationSchema& s,
                                                       Semantics semantics) {
  std::vector<SoftValue> out;
  out.reserve(s.labels().size());
  if (semantics == Semantics::PaperSoft) {
    for (const auto& r : s.compiled()) out.push_back(grad_soft(r.expr, p));
  } else {
    for (const auto& minterms : decision_minterms(s)) out.push_back(grad_minterm_mass(minterms, p));
  }
  return out;
}

RelationDistribution soft_distribution(const QVector& p, const RelationSchema& s, Semantics semantics) {
  std::vector<double> values;
  values.reserve(s.labels().size());
  if (semantics == Semantics::PaperSoft) {
    for (const auto& r : s.compiled()) values.push_back(eval_soft(r.expr, p));
  } else {
    for (const auto& minterms : decision_minterms(s)) values.push_back(minterm_mass(minterms, p));
  }
  return {s.name(), s.labels(), std::move(values), semantics};
}

Decision predict(const QVector& p, const RelationSchema& s, Semantics semantics) {
  const auto dist = soft_distribution(p, s, semantics);
  const auto& v = dist.values();
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  if (v[best] == 1.0 && std::count(v.begin(), v.end(), 1.0) > 1) return {s.vague_name(), true};
  return {s.labels()[best], false};
}

Decision transfer_decode(const QVector& p, const RelationSchema& target, Semantics semantics) {
  return p.is_binary() ? convert(p.threshold(), target) : predict(p, target, semantics);
}

Decision transfer_decode(QAssignment q, const RelationSchema& target) { return convert(q, target); }

LabelMapping::LabelMapping(std::string name, const RelationSchema& source,
                           const RelationSchema& target, std::map<std::string, std::string> map)
    : name_(std::move(name)), source_(source.name()), target_(target.name()), map_(std::move(map)) {
  for (const auto& label : source.labels()) {
    const auto it = map_.find(label);
    if (it == map_.end()) {
      throw SchemaError("IncompleteMapping", "mapping '" + name_ + "' has no entry for '" + label + "'");
    }
    if (!target.contains(it->second)) {
      throw SchemaError("IncompleteMapping", "mapping '" + name_ + "' targets unknown relation '" +
                                                 it->second + "'");
    }
  }
  for (const auto& [from, to] : map_) {
    if (!source.contains(from)) {
      throw SchemaError("IncompleteMapping", "mapping '" + name_ + "' maps unknown relation '" + from + "'");
    }
  }
}

LabelMapping parse_label_mapping(std::string_view json, const RelationSchema& source,
                                 const RelationSchema& target) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
    return LabelMapping(j.at("name").get<std::string>(), source, target,
                        j.at("map").get<std::map<std::string, std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("label mapping: ") + e.what(), 1, 1);
  }
}

const LabelMapping& builtin_label_mapping(std::string_view name) {
  static std::mutex mutex;
  static std::map<std::string, std::unique_ptr<const LabelMapping>, std::less<>> cache;
  std::lock_guard lock(mutex);
  if (const auto it = cache.find(name); it != cache.end()) return *it->second;
  const auto text = embedded_file("mappings/" + std::string(name) + ".json");
  if (!text) throw SchemaError("UnknownMapping", "no built-in label mapping named '" + std::string(name) + "'");
  const auto j = nlohmann::json::parse(*text);
  auto mapping = std::make_unique<const LabelMapping>(
      parse_label_mapping(*text, builtin_schema(j.at("source").get<std::string>()),
                          builtin_schema(j.at("target").get<std::string>())));
  const auto& ref = *mapping;
  cache.emplace(std::string(name), std::move(mapping));
  return ref;
}

const std::string& map_labels(std::string_view r, const LabelMapping& m) {
  const auto it = m.table().find(std::string(r));
  if (it == m.table().end()) {
    throw UnknownRelation("'" + std::string(r) + "' is not a source relation of mapping '" + m.name() + "'");
  }
  return it->second;
}

std::string_view to_string(LlmAnswer a) noexcept {
  switch (a) {
    case LlmAnswer::Event1: return "event_1";
    case LlmAnswer::Event2: return "event_2";
    case LlmAnswer::Other: return "other";
  }
  return "other";
}

PointRelation answers_to_point_relation(LlmAnswer first, LlmAnswer later) noexcept {
  using enum LlmAnswer;
  if ((first == Event1 && later == Event2) || (first == Event1 && later == Other) ||
      (first == Other && later == Event2)) {
    return PointRelation::Before;
  }
  if ((first == Event2 && later == Event1) || (first == Other && later == Event1) ||
      (first == Event2 && later == Other)) {
    return PointRelation::After;
  }
  return PointRelation::Vague;
}

std::string relation_from_points(PointRelation start, PointRelation end) {
  using enum PointRelation;
  if (start == Before && end == Before) return "Before";
  if (start == After && end == After) return "After";
  if (start == Before && end == After) return "Includes";
  if (start == After && end == Before) return "Is_Included";
  return "Vague";
}

std::string aggregate_llm_answers(std::pair<LlmAnswer, LlmAnswer> start,
                                  std::pair<LlmAnswer, LlmAnswer> end) {
  return relation_from_points(answers_to_point_relation(start.first, start.second),
                              answers_to_point_relation(end.first, end.second));
}

}  // namespace timepoint
