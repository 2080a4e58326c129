#include "timepoint/point_algebra.hpp"

#include <algorithm>
#include <cmath>

namespace timepoint {

std::string_view to_string(PointRelation z) noexcept {
  switch (z) {
    case PointRelation::Before: return "before";
    case PointRelation::After: return "after";
    case PointRelation::Equal: return "equal";
    case PointRelation::Vague: return "vague";
  }
  return "unknown";
}

std::string_view to_string(PointPair tp) noexcept {
  switch (tp) {
    case PointPair::SS: return "ss";
    case PointPair::EE: return "ee";
    case PointPair::SE: return "se";
    case PointPair::ES: return "es";
  }
  return "unknown";
}

std::optional<PointRelation> parse_point_relation(std::string_view text) noexcept {
  for (auto z : kPointRelations) {
    if (to_string(z) == text) return z;
  }
  return std::nullopt;
}

std::optional<PointPair> parse_point_pair(std::string_view text) noexcept {
  for (auto tp : kPointPairs) {
    if (to_string(tp) == text) return tp;
  }
  return std::nullopt;
}

QuestionProbabilities::QuestionProbabilities(double p1, double p2) : p1_(p1), p2_(p2) {
  auto in_unit = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
  if (!in_unit(p1) || !in_unit(p2)) {
    throw DomainError("question probabilities must lie in [0, 1]");
  }
}

PointRelation answers_to_relation(QuestionAnswers a) noexcept {
  if (a.q1 && !a.q2) return PointRelation::Before;
  if (!a.q1 && a.q2) return PointRelation::After;
  if (!a.q1 && !a.q2) return PointRelation::Equal;
  return PointRelation::Vague;
}

QuestionAnswers relation_to_answers(PointRelation z) noexcept {
  switch (z) {
    case PointRelation::Before: return {true, false};
    case PointRelation::After: return {false, true};
    case PointRelation::Equal: return {false, false};
    case PointRelation::Vague: return {true, true};
  }
  return {true, true};
}

PointRelation invert(PointRelation z) noexcept {
  switch (z) {
    case PointRelation::Before: return PointRelation::After;
    case PointRelation::After: return PointRelation::Before;
    default: return z;
  }
}

PointConfiguration PointConfiguration::with(PointPair tp, PointRelation z) const noexcept {
  PointConfiguration out = *this;
  out.rel_[static_cast<std::size_t>(tp)] = z;
  return out;
}

std::size_t PointConfiguration::index() const noexcept {
  std::size_t code = 0;
  for (auto z : rel_) code = code * 4 + static_cast<std::size_t>(z);
  return code;
}

PointConfiguration PointConfiguration::from_index(std::size_t index) {
  if (index >= kCount) throw DomainError("configuration index out of range");
  PointConfiguration out;
  for (std::size_t k = 4; k-- > 0;) {
    out.rel_[k] = static_cast<PointRelation>(index % 4);
    index /= 4;
  }
  return out;
}

bool PointConfiguration::has_vague() const noexcept {
  return std::ranges::find(rel_, PointRelation::Vague) != rel_.end();
}

std::string to_string(const PointConfiguration& c) {
  std::string out;
  for (auto tp : kPointPairs) {
    if (!out.empty()) out += ' ';
    out += to_string(tp);
    out += '=';
    out += to_string(c[tp]);
  }
  return out;
}

PointConfiguration swap_events(const PointConfiguration& c) noexcept {
  return {invert(c[PointPair::SS]), invert(c[PointPair::EE]), invert(c[PointPair::ES]),
          invert(c[PointPair::SE])};
}

const std::vector<WeakOrdering>& all_weak_orderings() {
  static const std::vector<WeakOrdering> orderings = [] {
    std::vector<WeakOrdering> out;
    // A rank vector is a weak ordering iff its ranks are exactly {0..max}.
    for (int code = 0; code < 256; ++code) {
      WeakOrdering w;
      int rest = code;
      for (auto& r : w.rank) {
        r = rest % 4;
        rest /= 4;
      }
      const int top = *std::ranges::max_element(w.rank);
      bool surjective = true;
      for (int level = 0; level <= top; ++level) {
        surjective = surjective && std::ranges::find(w.rank, level) != w.rank.end();
      }
      if (surjective) out.push_back(w);
    }
    return out;
  }();
  return orderings;
}

namespace {

constexpr std::size_t kT1s = 0, kT1e = 1, kT2s = 2, kT2e = 3;

bool proper(const WeakOrdering& w) {
  return w.rank[kT1s] < w.rank[kT1e] && w.rank[kT2s] < w.rank[kT2e];
}

PointConfiguration configuration_of(const WeakOrdering& w) {
  const auto& r = w.rank;
  return {compare_points(r[kT1s], r[kT2s]), compare_points(r[kT1e], r[kT2e]),
          compare_points(r[kT1s], r[kT2e]), compare_points(r[kT1e], r[kT2s])};
}

bool satisfies(const PointConfiguration& realized, const PointConfiguration& c) {
  for (auto tp : kPointPairs) {
    if (c[tp] != PointRelation::Vague && c[tp] != realized[tp]) return false;
  }
  return true;
}

}  // namespace

bool is_consistent(const PointConfiguration& c, ConsistencyMode mode) {
  std::array<bool, 4> seen_before{};
  std::array<bool, 4> seen_after{};
  bool any = false;
  for (const auto& w : all_weak_orderings()) {
    if (!proper(w)) continue;
    const auto realized = configuration_of(w);
    if (!satisfies(realized, c)) continue;
    any = true;
    for (auto tp : kPointPairs) {
      const auto k = static_cast<std::size_t>(tp);
      seen_before[k] = seen_before[k] || realized[tp] == PointRelation::Before;
      seen_after[k] = seen_after[k] || realized[tp] == PointRelation::After;
    }
  }
  if (!any) return false;
  if (mode == ConsistencyMode::Satisfiable) return true;
  for (auto tp : kPointPairs) {
    const auto k = static_cast<std::size_t>(tp);
    if (c[tp] == PointRelation::Vague && !(seen_before[k] && seen_after[k])) return false;
  }
  return true;
}

std::vector<PointConfiguration> enumerate_consistent_configurations(ConsistencyMode mode) {
  std::vector<PointConfiguration> out;
  for (std::size_t i = 0; i < PointConfiguration::kCount; ++i) {
    auto c = PointConfiguration::from_index(i);
    if (is_consistent(c, mode)) out.push_back(c);
  }
  return out;
}

}  // namespace timepoint
