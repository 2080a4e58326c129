#include "timepoint/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace timepoint {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "train";
}

std::optional<Split> parse_split(std::string_view text) noexcept {
  if (text == "train") return Split::Train;
  if (text == "dev") return Split::Dev;
  if (text == "test") return Split::Test;
  return std::nullopt;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

namespace {

template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t number = 0;
  std::size_t begin = 0;
  while (begin < text.size()) {
    auto end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(begin, end - begin);
    begin = end + 1;
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    f(line, number);
  }
}

PointConfiguration parse_config(const nlohmann::json& j, std::size_t line) {
  PointConfiguration c;
  for (auto tp : kPointPairs) {
    const auto key = std::string(to_string(tp));
    if (!j.contains(key)) throw ParseError("config is missing '" + key + "'", line, 1);
    const auto z = parse_point_relation(j.at(key).get<std::string>());
    if (!z) throw ParseError("unknown point relation in config." + key, line, 1);
    c = c.with(tp, *z);
  }
  return c;
}

ordered_json config_json(const PointConfiguration& c) {
  ordered_json j = ordered_json::object();
  for (auto tp : kPointPairs) j[std::string(to_string(tp))] = std::string(to_string(c[tp]));
  return j;
}

}  // namespace

std::vector<PairRecord> parse_pairs(std::string_view jsonl, const RelationSchema& s) {
  std::vector<PairRecord> out;
  std::set<std::string> ids;
  for_each_line(jsonl, [&](std::string_view line, std::size_t number) {
    PairRecord r;
    try {
      const auto j = nlohmann::json::parse(line);
      r.id = j.at("id").get<std::string>();
      r.gold = j.at("gold").get<std::string>();
      const auto split = parse_split(j.value("split", std::string("train")));
      if (!split) throw ParseError("unknown split", number, 1);
      r.split = *split;
      if (j.contains("features")) r.features = j.at("features").get<std::vector<double>>();
      if (j.contains("config")) r.gold_config = parse_config(j.at("config"), number);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), number, 1);
    }
    if (!s.contains(r.gold)) {
      throw UnknownRelation("record '" + r.id + "' (line " + std::to_string(number) + ") has label '" +
                            r.gold + "', not in schema '" + s.name() + "'");
    }
    if (!ids.insert(r.id).second) throw DuplicateId(r.id);
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<PairRecord> read_pairs(const std::filesystem::path& path, const RelationSchema& s) {
  return parse_pairs(read_text_file(path), s);
}

std::string format_pairs(std::span<const PairRecord> records) {
  std::string out;
  for (const auto& r : records) {
    ordered_json j{{"id", r.id}, {"split", std::string(to_string(r.split))}, {"gold", r.gold}};
    if (r.features) j["features"] = *r.features;
    if (r.gold_config) j["config"] = config_json(*r.gold_config);
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_pairs(const std::filesystem::path& path, std::span<const PairRecord> records) {
  write_text_file(path, format_pairs(records));
}

std::vector<PairRecord> symmetry_augment(std::span<const PairRecord> data, const RelationSchema& s,
                                         const WarningSink& warn) {
  for (const auto& r : data) {
    if (r.split != Split::Train) {
      throw SplitViolation("record '" + r.id + "' is in the " + std::string(to_string(r.split)) +
                           " split; only training data may be augmented");
    }
  }
  std::vector<PairRecord> out(data.begin(), data.end());
  out.reserve(2 * data.size());
  for (const auto& r : data) {
    PairRecord twin = r;
    twin.id = r.id + "#sym";
    twin.gold = s.symmetric(r.gold);
    if (r.gold_config) twin.gold_config = swap_events(*r.gold_config);
    if (r.features) {
      auto& f = *twin.features;
      if (f.size() % 2 == 0) {
        std::rotate(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(f.size() / 2), f.end());
      } else {
        const auto message = "record '" + r.id + "' has " + std::to_string(f.size()) +
                             " features; odd length cannot be split into event halves, reusing them";
        if (warn) {
          warn(message);
        } else {
          std::clog << "warning: " << message << '\n';
        }
      }
    }
    out.push_back(std::move(twin));
  }
  return out;
}

std::vector<PairRecord> split_sample(std::span<const PairRecord> data, double fraction,
                                     std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw DomainError("sample fraction must lie in (0, 1]");
  if (data.empty()) return {};
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(static_cast<double>(data.size()) * fraction)));
  std::vector<PairRecord> out;
  out.reserve(k);
  std::mt19937_64 rng(seed);
  // Selection sampling keeps the input order.
  std::sample(data.begin(), data.end(), std::back_inserter(out), k, rng);
  return out;
}

std::vector<LabeledPair> to_labeled(std::span<const PairRecord> data) {
  std::vector<LabeledPair> out;
  out.reserve(data.size());
  for (const auto& r : data) {
    if (!r.features) throw DimensionMismatch("record '" + r.id + "' has no features");
    out.push_back({r.id, *r.features, r.gold, r.gold_config});
  }
  return out;
}

std::vector<PairRecord> from_labeled(std::span<const LabeledPair> data, Split split) {
  std::vector<PairRecord> out;
  out.reserve(data.size());
  for (const auto& ex : data) out.push_back({ex.id, split, ex.gold, ex.features, ex.gold_config});
  return out;
}

std::vector<PredictionRecord> parse_predictions(std::string_view jsonl) {
  std::vector<PredictionRecord> out;
  for_each_line(jsonl, [&](std::string_view line, std::size_t number) {
    PredictionRecord r;
    try {
      const auto j = nlohmann::json::parse(line);
      r.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
      if (j.contains("q")) {
        const auto values = j.at("q").get<std::vector<double>>();
        if (values.size() != QAtom::kCount) throw ParseError("'q' must hold 8 probabilities", number, 1);
        std::array<double, QAtom::kCount> a{};
        std::ranges::copy(values, a.begin());
        r.q = QVector(a);
      }
      if (j.contains("relation")) r.relation = j.at("relation").get<std::string>();
      r.ambiguous = j.value("ambiguous", false);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), number, 1);
    } catch (const DomainError& e) {
      throw ParseError(e.what(), number, 1);
    }
    if (!r.q && !r.relation) throw ParseError("prediction needs 'q' or 'relation'", number, 1);
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_text_file(path));
}

std::string format_predictions(std::span<const PredictionRecord> records) {
  std::string out;
  for (const auto& r : records) {
    ordered_json j{{"id", r.id}};
    if (r.q) j["q"] = r.q->values();
    if (r.relation) j["relation"] = *r.relation;
    if (r.ambiguous) j["ambiguous"] = true;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace timepoint
