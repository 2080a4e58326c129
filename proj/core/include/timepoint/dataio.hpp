#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "timepoint/learner.hpp"
#include "timepoint/logic_expr.hpp"
#include "timepoint/schema.hpp"

namespace timepoint {

enum class Split { Train, Dev, Test };

[[nodiscard]] std::string_view to_string(Split s) noexcept;
[[nodiscard]] std::optional<Split> parse_split(std::string_view text) noexcept;

/// One event pair: {"id", "split", "gold", "features"?, "config"?}.
struct PairRecord {
  std::string id;
  Split split = Split::Train;
  std::string gold;
  std::optional<std::vector<double>> features;
  std::optional<PointConfiguration> gold_config;

  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

/// Parses JSONL, one record per non-blank line, checking labels against s.
/// Throws ParseError (with the line number), UnknownRelation or DuplicateId.
[[nodiscard]] std::vector<PairRecord> parse_pairs(std::string_view jsonl, const RelationSchema& s);
[[nodiscard]] std::vector<PairRecord> read_pairs(const std::filesystem::path& path, const RelationSchema& s);
[[nodiscard]] std::string format_pairs(std::span<const PairRecord> records);
void write_pairs(const std::filesystem::path& path, std::span<const PairRecord> records);

using WarningSink = std::function<void(const std::string&)>;

/// Appends, for every record, its event-swapped twin: label mapped to its
/// symmetric relation, configuration swapped, feature halves exchanged
/// (features of odd length are reused as-is with a warning), id suffixed
/// "#sym". Throws SplitViolation if any record is not in the train split.
/// Warnings go to `warn`, or std::clog when it is empty.
[[nodiscard]] std::vector<PairRecord> symmetry_augment(std::span<const PairRecord> data,
                                                       const RelationSchema& s,
                                                       const WarningSink& warn = {});

/// Seeded uniform sample of floor(n * fraction) records (at least one),
/// kept in their original order. Throws DomainError unless 0 < fraction <= 1.
[[nodiscard]] std::vector<PairRecord> split_sample(std::span<const PairRecord> data, double fraction,
                                                   std::uint64_t seed);

/// Records with features, as training examples. Throws DimensionMismatch
/// if a record has no features.
[[nodiscard]] std::vector<LabeledPair> to_labeled(std::span<const PairRecord> data);
[[nodiscard]] std::vector<PairRecord> from_labeled(std::span<const LabeledPair> data, Split split);

/// A line of a prediction file: {"id", "q": [8 probabilities]} or
/// {"id", "relation": name}. Both may be present.
struct PredictionRecord {
  std::string id;
  std::optional<QVector> q;
  std::optional<std::string> relation;
  bool ambiguous = false;
};

[[nodiscard]] std::vector<PredictionRecord> parse_predictions(std::string_view jsonl);
[[nodiscard]] std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);
[[nodiscard]] std::string format_predictions(std::span<const PredictionRecord> records);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace timepoint
