#include "timepoint/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace timepoint {

namespace {

void check_lengths(std::span<const std::string> gold, std::span<const std::string> pred) {
  if (gold.size() != pred.size()) throw LengthMismatch(gold.size(), pred.size());
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

PrfScore score(std::size_t correct, std::size_t predicted, std::size_t actual) {
  PrfScore s{ratio(correct, predicted), ratio(correct, actual), 0.0};
  const double sum = s.precision + s.recall;
  s.f1 = sum == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / sum;
  return s;
}

}  // namespace

PrfScore micro_f1_excluding_vague(std::span<const std::string> gold,
                                  std::span<const std::string> pred, std::string_view vague) {
  check_lengths(gold, pred);
  std::size_t correct = 0, predicted = 0, actual = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (pred[i] != vague) ++predicted;
    if (gold[i] != vague) ++actual;
    if (gold[i] != vague && pred[i] == gold[i]) ++correct;
  }
  return score(correct, predicted, actual);
}

PrfScore relation_score(std::span<const std::string> gold, std::span<const std::string> pred,
                        std::string_view label) {
  check_lengths(gold, pred);
  std::size_t tp = 0, predicted = 0, actual = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (pred[i] == label) ++predicted;
    if (gold[i] == label) ++actual;
    if (pred[i] == label && gold[i] == label) ++tp;
  }
  return score(tp, predicted, actual);
}

double macro_f1(std::span<const std::string> gold, std::span<const std::string> pred,
                std::span<const std::string> relations) {
  check_lengths(gold, pred);
  if (relations.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : relations) total += relation_score(gold, pred, r).f1;
  return total / static_cast<double>(relations.size());
}

VagueErrorSplit error_breakdown(std::span<const std::string> gold, std::span<const std::string> pred,
                                std::string_view vague) {
  check_lengths(gold, pred);
  VagueErrorSplit out;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == vague || pred[i] == gold[i]) continue;
    if (pred[i] == vague) {
      ++out.to_vague;
    } else {
      ++out.not_vague;
    }
  }
  return out;
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels, std::span<const std::string> gold,
                                 std::span<const std::string> pred)
    : labels_(std::move(labels)), counts_(labels_.size() * labels_.size(), 0) {
  check_lengths(gold, pred);
  auto index = [&](const std::string& label) {
    const auto it = std::ranges::find(labels_, label);
    if (it == labels_.end()) throw UnknownRelation("'" + label + "' is not an evaluated relation");
    return static_cast<std::size_t>(it - labels_.begin());
  };
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++counts_[index(gold[i]) * labels_.size() + index(pred[i])];
  }
}

std::size_t ConfusionMatrix::row_total(std::size_t gold) const noexcept {
  std::size_t n = 0;
  for (std::size_t p = 0; p < labels_.size(); ++p) n += at(gold, p);
  return n;
}

std::size_t ConfusionMatrix::column_total(std::size_t pred) const noexcept {
  std::size_t n = 0;
  for (std::size_t g = 0; g < labels_.size(); ++g) n += at(g, pred);
  return n;
}

std::size_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

EvalReport evaluate(std::span<const std::string> gold, std::span<const std::string> pred,
                    const RelationSchema& s, bool macro_includes_vague) {
  check_lengths(gold, pred);
  std::vector<std::string> macro_set;
  for (const auto& label : s.labels()) {
    if (macro_includes_vague || label != s.vague_name()) macro_set.push_back(label);
  }
  EvalReport report{s.name(),
                    gold.size(),
                    micro_f1_excluding_vague(gold, pred, s.vague_name()),
                    macro_f1(gold, pred, macro_set),
                    macro_includes_vague,
                    {},
                    ConfusionMatrix(s.labels(), gold, pred),
                    error_breakdown(gold, pred, s.vague_name())};
  for (std::size_t i = 0; i < s.labels().size(); ++i) {
    report.per_relation.push_back(
        {s.labels()[i], relation_score(gold, pred, s.labels()[i]), report.confusion.row_total(i)});
  }
  return report;
}

std::string EvalReport::to_json() const {
  using json = nlohmann::ordered_json;
  json j;
  j["schema"] = schema;
  j["size"] = size;
  j["micro"] = {{"precision", micro.precision}, {"recall", micro.recall}, {"f1", micro.f1}};
  j["macro_f1"] = macro_f1;
  j["macro_includes_vague"] = macro_includes_vague;
  j["per_relation"] = json::array();
  for (const auto& r : per_relation) {
    j["per_relation"].push_back({{"relation", r.relation},
                                 {"precision", r.score.precision},
                                 {"recall", r.score.recall},
                                 {"f1", r.score.f1},
                                 {"support", r.support}});
  }
  json counts = json::array();
  for (std::size_t g = 0; g < confusion.labels().size(); ++g) {
    json row = json::array();
    for (std::size_t p = 0; p < confusion.labels().size(); ++p) row.push_back(confusion.at(g, p));
    counts.push_back(row);
  }
  j["confusion"] = {{"labels", confusion.labels()}, {"counts", counts}};
  j["vague_errors"] = {{"to_vague", vague_errors.to_vague}, {"not_vague", vague_errors.not_vague}};
  return j.dump(2);
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "schema " << schema << ", " << size << " instances\n";
  out << "micro (Vague excluded)  P " << micro.precision << "  R " << micro.recall << "  F1 "
      << micro.f1 << '\n';
  out << "macro F1" << (macro_includes_vague ? " (with Vague)  " : "                ") << macro_f1
      << "\n\n";

  std::size_t width = 9;
  for (const auto& label : confusion.labels()) width = std::max(width, label.size() + 2);
  out << std::left << std::setw(static_cast<int>(width)) << "relation" << std::right
      << std::setw(10) << "P" << std::setw(10) << "R" << std::setw(10) << "F1" << std::setw(10)
      << "support" << '\n';
  for (const auto& r : per_relation) {
    out << std::left << std::setw(static_cast<int>(width)) << r.relation << std::right
        << std::setw(10) << r.score.precision << std::setw(10) << r.score.recall << std::setw(10)
        << r.score.f1 << std::setw(10) << r.support << '\n';
  }

  out << "\nconfusion (rows gold, columns predicted)\n" << std::setw(static_cast<int>(width)) << "";
  for (const auto& label : confusion.labels()) out << std::setw(static_cast<int>(width)) << label;
  out << '\n';
  for (std::size_t g = 0; g < confusion.labels().size(); ++g) {
    out << std::left << std::setw(static_cast<int>(width)) << confusion.labels()[g] << std::right;
    for (std::size_t p = 0; p < confusion.labels().size(); ++p) {
      out << std::setw(static_cast<int>(width)) << confusion.at(g, p);
    }
    out << '\n';
  }
  out << "\nerrors on non-Vague gold: " << vague_errors.to_vague << " to Vague, "
      << vague_errors.not_vague << " to other relations\n";
  return out.str();
}

}  // namespace timepoint
