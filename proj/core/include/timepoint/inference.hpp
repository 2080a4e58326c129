#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "timepoint/logic_expr.hpp"
#include "timepoint/schema.hpp"

namespace timepoint {

/// How compiled expressions turn question probabilities into relation scores.
enum class Semantics {
  /// Product t-norm evaluation of each expression (the default).
  PaperSoft,
  /// Probability, under independent atoms, that the hard converter outputs
  /// the relation. Always a normalized distribution.
  ProbSum,
};

[[nodiscard]] std::string_view to_string(Semantics s) noexcept;
/// "paper_soft" or "prob_sum"; throws DomainError otherwise.
[[nodiscard]] Semantics parse_semantics(std::string_view text);

/// A decoded relation. `ambiguous` is set when the converter fell back to
/// Vague because zero or several relations matched.
struct Decision {
  std::string relation;
  bool ambiguous = false;

  friend bool operator==(const Decision&, const Decision&) = default;
};

[[nodiscard]] Decision convert(QAssignment q, const RelationSchema& s);
/// Throws DomainError if q is not binary.
[[nodiscard]] Decision convert(const QVector& q, const RelationSchema& s);

class RelationDistribution {
public:
  RelationDistribution(std::string schema, std::vector<std::string> labels,
                       std::vector<double> values, Semantics semantics);

  [[nodiscard]] const std::string& schema() const noexcept { return schema_; }
  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] Semantics semantics() const noexcept { return semantics_; }
  /// Throws UnknownRelation.
  [[nodiscard]] double operator[](std::string_view label) const;
  [[nodiscard]] double sum() const noexcept;

  /// {"schema": ..., "semantics": ..., "values": {label: value, ...}}
  [[nodiscard]] std::string to_json() const;

private:
  std::string schema_;
  std::vector<std::string> labels_;
  std::vector<double> values_;
  Semantics semantics_;
};

/// Per-minterm decision partition: entry i holds the minterms the converter
/// maps to labels()[i].
[[nodiscard]] std::vector<MintermSet> decision_minterms(const RelationSchema& s);

[[nodiscard]] RelationDistribution soft_distribution(const QVector& p, const RelationSchema& s,
                                                     Semantics semantics = Semantics::PaperSoft);

/// Scores and their gradients with respect to the eight atom probabilities,
/// aligned with s.labels().
[[nodiscard]] std::vector<SoftValue> soft_distribution_with_gradient(
    const QVector& p, const RelationSchema& s, Semantics semantics = Semantics::PaperSoft);

/// Argmax of soft_distribution, ties going to the earlier label (Vague is
/// last). When several relations score exactly 1 their expressions all hold,
/// and the converter's Vague fallback applies.
[[nodiscard]] Decision predict(const QVector& p, const RelationSchema& s,
                               Semantics semantics = Semantics::PaperSoft);

/// Decodes question answers against a schema other than the one the model
/// was trained on. Binary inputs go through convert, others through predict.
[[nodiscard]] Decision transfer_decode(const QVector& p, const RelationSchema& target,
                                       Semantics semantics = Semantics::PaperSoft);
[[nodiscard]] Decision transfer_decode(QAssignment q, const RelationSchema& target);

/// Total function from the labels of one schema to those of another.
class LabelMapping {
public:
  /// Throws SchemaError "IncompleteMapping" unless `map` covers every label
  /// of `source` with a label of `target`.
  LabelMapping(std::string name, const RelationSchema& source, const RelationSchema& target,
               std::map<std::string, std::string> map);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::string& source() const noexcept { return source_; }
  [[nodiscard]] const std::string& target() const noexcept { return target_; }
  [[nodiscard]] const std::map<std::string, std::string>& table() const noexcept { return map_; }

private:
  std::string name_;
  std::string source_;
  std::string target_;
  std::map<std::string, std::string> map_;
};

/// Parses {"name", "source", "target", "map"} against the given schemas.
[[nodiscard]] LabelMapping parse_label_mapping(std::string_view json, const RelationSchema& source,
                                               const RelationSchema& target);
/// "mapping1" (Includes/Is_Included -> Vague) or "mapping2" (-> Before/After),
/// both from tbdense to matres.
[[nodiscard]] const LabelMapping& builtin_label_mapping(std::string_view name);

/// Throws UnknownRelation if r is not a source label.
[[nodiscard]] const std::string& map_labels(std::string_view r, const LabelMapping& m);

/// Parsed answer of a language model to a "which event ..." prompt.
enum class LlmAnswer { Event1, Event2, Other };

[[nodiscard]] std::string_view to_string(LlmAnswer a) noexcept;

/// Point relation from the answers to the "first" and "later" prompts of one
/// time point; one unparseable answer defers to the other.
[[nodiscard]] PointRelation answers_to_point_relation(LlmAnswer first, LlmAnswer later) noexcept;

/// TB-Dense relation from the start and end point relations.
[[nodiscard]] std::string relation_from_points(PointRelation start, PointRelation end);

[[nodiscard]] std::string aggregate_llm_answers(std::pair<LlmAnswer, LlmAnswer> start,
                                                std::pair<LlmAnswer, LlmAnswer> end);

}  // namespace timepoint
