#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "timepoint/logic_expr.hpp"
#include "timepoint/point_algebra.hpp"

namespace timepoint {

/// A set of point relations, e.g. `<=` is {Before, Equal}.
class RelationSet {
public:
  constexpr RelationSet() noexcept = default;
  constexpr RelationSet(std::initializer_list<PointRelation> rels) noexcept {
    for (auto z : rels) mask_ |= bit(z);
  }
  [[nodiscard]] static constexpr RelationSet all() noexcept {
    return {PointRelation::Before, PointRelation::After, PointRelation::Equal, PointRelation::Vague};
  }

  [[nodiscard]] constexpr RelationSet with(PointRelation z) const noexcept {
    RelationSet out = *this;
    out.mask_ = static_cast<std::uint8_t>(out.mask_ | bit(z));
    return out;
  }
  [[nodiscard]] constexpr bool contains(PointRelation z) const noexcept { return (mask_ & bit(z)) != 0; }
  [[nodiscard]] constexpr bool empty() const noexcept { return mask_ == 0; }
  [[nodiscard]] constexpr std::size_t size() const noexcept {
    return static_cast<std::size_t>(((mask_ >> 0) & 1) + ((mask_ >> 1) & 1) + ((mask_ >> 2) & 1) +
                                    ((mask_ >> 3) & 1));
  }
  [[nodiscard]] constexpr std::uint8_t mask() const noexcept { return mask_; }

  friend constexpr bool operator==(RelationSet, RelationSet) = default;

private:
  static constexpr std::uint8_t bit(PointRelation z) noexcept {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(z));
  }
  std::uint8_t mask_ = 0;
};

/// "the relation of `pair` is one of `allowed`"
struct PointPredicate {
  PointPair pair = PointPair::SS;
  RelationSet allowed = RelationSet::all();

  [[nodiscard]] bool vacuous() const noexcept { return allowed == RelationSet::all(); }
  [[nodiscard]] bool holds(const PointConfiguration& c) const noexcept { return allowed.contains(c[pair]); }

  friend bool operator==(const PointPredicate&, const PointPredicate&) = default;
};

using PointExpr = Expr<PointPredicate>;

/// "ss <=", "ee ~", "se in {before,vague}"
[[nodiscard]] std::string to_string(const PointPredicate& p);
[[nodiscard]] std::string to_string(const PointExpr& e);

/// Hard evaluation of a point-level expression on a configuration.
[[nodiscard]] bool holds(const PointExpr& e, const PointConfiguration& c);

/// Q-level form of one predicate: the disjunction of the Q minterms of its
/// allowed relations, reduced to a single literal where possible
/// (`<=` becomes !Q2, `>=` becomes !Q1).
[[nodiscard]] LogicExpr compile_predicate(const PointPredicate& p);
[[nodiscard]] LogicExpr compile_point_expr(const PointExpr& e);

struct RelationDef {
  std::string name;
  PointExpr expr;
};

enum class VaguePolicy { Complement, Explicit };

struct CompiledRelation {
  std::string name;
  LogicExpr expr;
  MintermSet minterms;
};

/// A named set of relations over one event pair, plus the Vague relation.
/// Immutable; compiled expressions are computed once at construction.
class RelationSchema {
public:
  /// Throws SchemaError "EmptySchema" or "DuplicateRelationName".
  /// `vague_expr` empty means complement-of-union.
  RelationSchema(std::string name, std::vector<RelationDef> relations, std::string vague_name,
                 std::optional<PointExpr> vague_expr = std::nullopt,
                 std::vector<std::pair<std::string, std::string>> inverses = {});

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::vector<RelationDef>& relations() const noexcept { return relations_; }
  [[nodiscard]] const std::string& vague_name() const noexcept { return vague_name_; }
  [[nodiscard]] VaguePolicy vague_policy() const noexcept {
    return vague_expr_ ? VaguePolicy::Explicit : VaguePolicy::Complement;
  }
  [[nodiscard]] const std::optional<PointExpr>& vague_expr() const noexcept { return vague_expr_; }
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& declared_inverses() const noexcept {
    return inverses_;
  }

  /// Relation names in declaration order followed by the Vague name.
  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
  [[nodiscard]] bool contains(std::string_view label) const noexcept;
  /// Position in labels(); throws UnknownRelation.
  [[nodiscard]] std::size_t index_of(std::string_view label) const;
  [[nodiscard]] std::size_t vague_index() const noexcept { return labels_.size() - 1; }

  /// Compiled Q-level expressions, aligned with labels().
  [[nodiscard]] const std::vector<CompiledRelation>& compiled() const noexcept { return compiled_; }

  /// Label obtained by swapping the two events. Declared inverses win; other
  /// labels are derived from projections of swapped consistent configurations.
  /// Throws SchemaError "NoSymmetricRelation" when neither is available.
  [[nodiscard]] const std::string& symmetric(std::string_view label) const;

private:
  std::string name_;
  std::vector<RelationDef> relations_;
  std::string vague_name_;
  std::optional<PointExpr> vague_expr_;
  std::vector<std::pair<std::string, std::string>> inverses_;
  std::vector<std::string> labels_;
  std::vector<CompiledRelation> compiled_;
  std::vector<std::optional<std::string>> symmetric_;
};

/// Compiled expressions in label order (the schema's cached result).
[[nodiscard]] std::vector<CompiledRelation> compile(const RelationSchema& s);

/// Indices (into labels()) of every relation whose expression holds on q.
[[nodiscard]] std::vector<std::size_t> matching_relations(const RelationSchema& s, QAssignment q);

/// The unique relation matched by q's configuration; Vague when zero or
/// several relations match.
[[nodiscard]] const std::string& project(const PointConfiguration& c, const RelationSchema& s);

enum class ValidationDomain {
  /// All 256 Q assignments.
  All,
  /// Encodings of the satisfiable point configurations.
  Consistent,
};

[[nodiscard]] std::string_view to_string(ValidationDomain d) noexcept;

struct OverlapWitness {
  QAssignment assignment;
  std::vector<std::string> relations;
};

struct ValidationReport {
  std::string schema;
  ValidationDomain domain = ValidationDomain::Consistent;
  std::size_t domain_size = 0;
  bool exclusive = true;
  bool exhaustive = true;
  /// Assignments satisfying two or more relations.
  std::vector<OverlapWitness> overlaps;
  /// Assignments satisfying none.
  std::vector<QAssignment> uncovered;

  [[nodiscard]] bool ok() const noexcept { return exclusive && exhaustive; }
};

[[nodiscard]] ValidationReport validate(const RelationSchema& s, ValidationDomain domain);

/// JSON object with stable keys.
[[nodiscard]] std::string report_to_json(const ValidationReport& r);
[[nodiscard]] std::string report_to_table(const ValidationReport& r);

/// Raised by load_schema when the schema parses but fails validation.
class ValidationError : public Error {
public:
  explicit ValidationError(ValidationReport report);
  [[nodiscard]] const ValidationReport& report() const noexcept { return report_; }

private:
  ValidationReport report_;
};

/// Parses the line-oriented schema format and validates it on `domain`.
/// Throws ParseError or ValidationError.
[[nodiscard]] RelationSchema load_schema(std::string_view text,
                                         ValidationDomain domain = ValidationDomain::Consistent);
/// Parses without validating.
[[nodiscard]] RelationSchema parse_schema(std::string_view text);
[[nodiscard]] std::string save_schema(const RelationSchema& s);

}  // namespace timepoint
