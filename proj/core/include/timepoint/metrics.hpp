#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "timepoint/schema.hpp"

namespace timepoint {

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Micro P/R/F1 over non-Vague labels: precision counts non-Vague
/// predictions, recall non-Vague gold labels. 0/0 is taken as 0.
/// Throws LengthMismatch.
[[nodiscard]] PrfScore micro_f1_excluding_vague(std::span<const std::string> gold,
                                                std::span<const std::string> pred,
                                                std::string_view vague = "Vague");

/// One-vs-rest P/R/F1 of a single label, 0/0 taken as 0.
[[nodiscard]] PrfScore relation_score(std::span<const std::string> gold,
                                      std::span<const std::string> pred, std::string_view label);

/// Unweighted mean of relation_score(...).f1 over `relations`.
[[nodiscard]] double macro_f1(std::span<const std::string> gold, std::span<const std::string> pred,
                              std::span<const std::string> relations);

struct VagueErrorSplit {
  /// Gold non-Vague instances predicted as Vague.
  std::size_t to_vague = 0;
  /// Gold non-Vague instances predicted as another wrong relation.
  std::size_t not_vague = 0;

  friend bool operator==(const VagueErrorSplit&, const VagueErrorSplit&) = default;
};

[[nodiscard]] VagueErrorSplit error_breakdown(std::span<const std::string> gold,
                                              std::span<const std::string> pred,
                                              std::string_view vague = "Vague");

/// Gold (rows) by predicted (columns) counts over a fixed label list.
class ConfusionMatrix {
public:
  /// Throws UnknownRelation for labels outside `labels`.
  ConfusionMatrix(std::vector<std::string> labels, std::span<const std::string> gold,
                  std::span<const std::string> pred);

  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
  [[nodiscard]] std::size_t at(std::size_t gold, std::size_t pred) const noexcept {
    return counts_[gold * labels_.size() + pred];
  }
  [[nodiscard]] std::size_t row_total(std::size_t gold) const noexcept;
  [[nodiscard]] std::size_t column_total(std::size_t pred) const noexcept;
  [[nodiscard]] std::size_t total() const noexcept;

private:
  std::vector<std::string> labels_;
  std::vector<std::size_t> counts_;
};

struct RelationReport {
  std::string relation;
  PrfScore score;
  std::size_t support = 0;
};

struct EvalReport {
  std::string schema;
  std::size_t size = 0;
  PrfScore micro;
  double macro_f1 = 0.0;
  bool macro_includes_vague = false;
  std::vector<RelationReport> per_relation;
  ConfusionMatrix confusion;
  VagueErrorSplit vague_errors;

  /// Stable key names: schema, size, micro{precision,recall,f1}, macro_f1,
  /// per_relation[], confusion{labels,counts}, vague_errors{to_vague,not_vague}.
  [[nodiscard]] std::string to_json() const;
  [[nodiscard]] std::string to_table() const;
};

/// Throws LengthMismatch or UnknownRelation.
[[nodiscard]] EvalReport evaluate(std::span<const std::string> gold, std::span<const std::string> pred,
                                  const RelationSchema& s, bool macro_includes_vague = false);

}  // namespace timepoint
