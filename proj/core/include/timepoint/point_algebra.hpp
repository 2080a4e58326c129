#pragma once

#include <array>
#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "timepoint/error.hpp"

namespace timepoint {

/// Relation between two time points (the Z layer).
enum class PointRelation : std::uint8_t { Before, After, Equal, Vague };

/// The four cross-event point pairs: (t1s,t2s), (t1e,t2e), (t1s,t2e), (t1e,t2s).
enum class PointPair : std::uint8_t { SS, EE, SE, ES };

inline constexpr std::array<PointRelation, 4> kPointRelations = {
    PointRelation::Before, PointRelation::After, PointRelation::Equal, PointRelation::Vague};
inline constexpr std::array<PointPair, 4> kPointPairs = {PointPair::SS, PointPair::EE,
                                                         PointPair::SE, PointPair::ES};

[[nodiscard]] std::string_view to_string(PointRelation z) noexcept;
[[nodiscard]] std::string_view to_string(PointPair tp) noexcept;
[[nodiscard]] std::optional<PointRelation> parse_point_relation(std::string_view text) noexcept;
[[nodiscard]] std::optional<PointPair> parse_point_pair(std::string_view text) noexcept;

/// Yes/no answers to the two questions asked about one point pair:
/// q1 "can the first point occur earlier?", q2 "can the second point occur earlier?".
struct QuestionAnswers {
  bool q1 = false;
  bool q2 = false;

  friend constexpr bool operator==(QuestionAnswers, QuestionAnswers) = default;
};

/// Probabilities of answering yes to the two questions of one point pair.
class QuestionProbabilities {
public:
  /// Throws DomainError unless both values lie in [0, 1].
  QuestionProbabilities(double p1, double p2);

  [[nodiscard]] double p1() const noexcept { return p1_; }
  [[nodiscard]] double p2() const noexcept { return p2_; }

private:
  double p1_;
  double p2_;
};

[[nodiscard]] PointRelation answers_to_relation(QuestionAnswers a) noexcept;
[[nodiscard]] QuestionAnswers relation_to_answers(PointRelation z) noexcept;

/// Before <-> After; Equal and Vague are fixed.
[[nodiscard]] PointRelation invert(PointRelation z) noexcept;

/// A relation for each of the four point pairs. Not necessarily realizable by
/// two intervals; see is_consistent.
class PointConfiguration {
public:
  static constexpr std::size_t kCount = 256;

  constexpr PointConfiguration() noexcept
      : rel_{PointRelation::Vague, PointRelation::Vague, PointRelation::Vague,
             PointRelation::Vague} {}
  constexpr PointConfiguration(PointRelation ss, PointRelation ee, PointRelation se,
                               PointRelation es) noexcept
      : rel_{ss, ee, se, es} {}

  [[nodiscard]] constexpr PointRelation operator[](PointPair tp) const noexcept {
    return rel_[static_cast<std::size_t>(tp)];
  }
  [[nodiscard]] PointConfiguration with(PointPair tp, PointRelation z) const noexcept;

  /// Canonical code in [0, 256): lexicographic over (SS, EE, SE, ES) with
  /// Before < After < Equal < Vague.
  [[nodiscard]] std::size_t index() const noexcept;
  [[nodiscard]] static PointConfiguration from_index(std::size_t index);

  [[nodiscard]] bool has_vague() const noexcept;

  friend constexpr bool operator==(const PointConfiguration&, const PointConfiguration&) = default;

private:
  std::array<PointRelation, 4> rel_;
};

/// "ss=before ee=after se=before es=after"
[[nodiscard]] std::string to_string(const PointConfiguration& c);

/// Exchanges the roles of the two events.
[[nodiscard]] PointConfiguration swap_events(const PointConfiguration& c) noexcept;

template <std::totally_ordered T>
[[nodiscard]] PointRelation compare_points(const T& a, const T& b) {
  if (a < b) return PointRelation::Before;
  if (b < a) return PointRelation::After;
  return PointRelation::Equal;
}

/// Point configuration of the intervals [s1, e1] and [s2, e2].
/// Throws ImproperInterval unless s1 < e1 and s2 < e2.
template <std::totally_ordered T>
[[nodiscard]] PointConfiguration configuration_from_intervals(const T& s1, const T& e1,
                                                              const T& s2, const T& e2) {
  if (!(s1 < e1) || !(s2 < e2)) {
    throw ImproperInterval("events must have strictly positive duration");
  }
  return {compare_points(s1, s2), compare_points(e1, e2), compare_points(s1, e2),
          compare_points(e1, s2)};
}

enum class ConsistencyMode {
  /// Vague pairs are unconstrained.
  Satisfiable,
  /// Every Vague pair must also be realizable in both strict orders.
  RealizableVague,
};

/// Brute force over the 75 weak orderings of {t1s, t1e, t2s, t2e}.
[[nodiscard]] bool is_consistent(const PointConfiguration& c,
                                 ConsistencyMode mode = ConsistencyMode::Satisfiable);

/// All consistent configurations, in ascending index() order.
[[nodiscard]] std::vector<PointConfiguration> enumerate_consistent_configurations(
    ConsistencyMode mode = ConsistencyMode::Satisfiable);

/// A weak ordering of the four points as ranks (ties share a rank).
struct WeakOrdering {
  // t1s, t1e, t2s, t2e
  std::array<int, 4> rank{};
};

/// The 75 weak orderings of four elements, including improper ones.
[[nodiscard]] const std::vector<WeakOrdering>& all_weak_orderings();

}  // namespace timepoint
