#include "timepoint/schema.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace timepoint {

namespace {

LogicExpr literal(PointPair tp, int question, bool positive) {
  auto a = LogicExpr::atom({tp, question});
  return positive ? a : !a;
}

LogicExpr minterm_of(PointPair tp, PointRelation z) {
  const auto a = relation_to_answers(z);
  return literal(tp, 1, a.q1) & literal(tp, 2, a.q2);
}

}  // namespace

std::string to_string(const PointPredicate& p) {
  const std::string pair(to_string(p.pair));
  using enum PointRelation;
  if (p.allowed == RelationSet{Before}) return pair + " <";
  if (p.allowed == RelationSet{Before, Equal}) return pair + " <=";
  if (p.allowed == RelationSet{Equal}) return pair + " =";
  if (p.allowed == RelationSet{After}) return pair + " >";
  if (p.allowed == RelationSet{After, Equal}) return pair + " >=";
  if (p.allowed == RelationSet{Vague}) return pair + " ~";
  std::string out = pair + " in {";
  bool first = true;
  for (auto z : kPointRelations) {
    if (!p.allowed.contains(z)) continue;
    if (!first) out += ",";
    out += to_string(z);
    first = false;
  }
  return out + "}";
}

std::string to_string(const PointExpr& e) {
  return format_expr(e, [](const PointPredicate& p) { return to_string(p); });
}

bool holds(const PointExpr& e, const PointConfiguration& c) {
  switch (e.kind()) {
    case ExprKind::Const: return e.value();
    case ExprKind::Atom: return e.atom().holds(c);
    case ExprKind::Not: return !holds(e.children().front(), c);
    case ExprKind::And:
      return std::ranges::all_of(e.children(), [&](const PointExpr& x) { return holds(x, c); });
    case ExprKind::Or:
      return std::ranges::any_of(e.children(), [&](const PointExpr& x) { return holds(x, c); });
  }
  return false;
}

LogicExpr compile_predicate(const PointPredicate& p) {
  if (p.allowed.empty()) throw SchemaError("EmptyPredicate", "predicate on " + std::string(to_string(p.pair)) + " allows no relation");
  std::vector<PointRelation> in;
  std::vector<PointRelation> out;
  for (auto z : kPointRelations) (p.allowed.contains(z) ? in : out).push_back(z);

  switch (in.size()) {
    case 4: return LogicExpr::constant(true);
    case 1: return minterm_of(p.pair, in[0]);
    case 3: {
      // Everything but one minterm: at least one literal differs from it.
      const auto a = relation_to_answers(out[0]);
      return literal(p.pair, 1, !a.q1) | literal(p.pair, 2, !a.q2);
    }
    default: {
      const auto a = relation_to_answers(in[0]);
      const auto b = relation_to_answers(in[1]);
      if (a.q1 == b.q1) return literal(p.pair, 1, a.q1);
      if (a.q2 == b.q2) return literal(p.pair, 2, a.q2);
      return minterm_of(p.pair, in[0]) | minterm_of(p.pair, in[1]);
    }
  }
}

LogicExpr compile_point_expr(const PointExpr& e) {
  return e.substitute([](const PointPredicate& p) { return compile_predicate(p); });
}

RelationSchema::RelationSchema(std::string name, std::vector<RelationDef> relations,
                               std::string vague_name, std::optional<PointExpr> vague_expr,
                               std::vector<std::pair<std::string, std::string>> inverses)
    : name_(std::move(name)),
      relations_(std::move(relations)),
      vague_name_(std::move(vague_name)),
      vague_expr_(std::move(vague_expr)),
      inverses_(std::move(inverses)) {
  if (relations_.empty()) throw SchemaError("EmptySchema", "schema '" + name_ + "' defines no relations");
  std::set<std::string> seen;
  for (const auto& r : relations_) {
    if (r.name.empty()) throw SchemaError("EmptyRelationName", "relation names must be non-empty");
    if (!seen.insert(r.name).second) {
      throw SchemaError("DuplicateRelationName", "relation '" + r.name + "' is defined twice");
    }
    labels_.push_back(r.name);
  }
  if (vague_name_.empty()) throw SchemaError("EmptyRelationName", "the vague relation needs a name");
  if (!seen.insert(vague_name_).second) {
    throw SchemaError("DuplicateRelationName", "vague name '" + vague_name_ + "' is also a relation");
  }
  labels_.push_back(vague_name_);

  std::vector<LogicExpr> others;
  for (const auto& r : relations_) {
    auto expr = compile_point_expr(r.expr);
    others.push_back(expr);
    compiled_.push_back({r.name, expr, expand_minterms(expr)});
  }
  auto vague = vague_expr_ ? compile_point_expr(*vague_expr_) : !LogicExpr::any_of(others);
  compiled_.push_back({vague_name_, vague, expand_minterms(vague)});

  symmetric_.resize(labels_.size());
  for (const auto& [a, b] : inverses_) {
    const auto ia = index_of(a);
    const auto ib = index_of(b);
    symmetric_[ia] = labels_[ib];
    symmetric_[ib] = labels_[ia];
  }
  std::vector<std::set<std::size_t>> derived(labels_.size());
  for (const auto& c : enumerate_consistent_configurations()) {
    derived[index_of(project(c, *this))].insert(index_of(project(swap_events(c), *this)));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (symmetric_[i]) continue;
    if (derived[i].size() == 1) symmetric_[i] = labels_[*derived[i].begin()];
    if (derived[i].empty()) symmetric_[i] = labels_[i];
  }
}

bool RelationSchema::contains(std::string_view label) const noexcept {
  return std::ranges::find(labels_, label) != labels_.end();
}

std::size_t RelationSchema::index_of(std::string_view label) const {
  const auto it = std::ranges::find(labels_, label);
  if (it == labels_.end()) {
    throw UnknownRelation("'" + std::string(label) + "' is not a relation of schema '" + name_ + "'");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

const std::string& RelationSchema::symmetric(std::string_view label) const {
  const auto& s = symmetric_[index_of(label)];
  if (!s) {
    throw SchemaError("NoSymmetricRelation",
                      "relation '" + std::string(label) + "' has no unique symmetric counterpart");
  }
  return *s;
}

std::vector<CompiledRelation> compile(const RelationSchema& s) { return s.compiled(); }

std::vector<std::size_t> matching_relations(const RelationSchema& s, QAssignment q) {
  std::vector<std::size_t> out;
  const auto& compiled = s.compiled();
  for (std::size_t i = 0; i < compiled.size(); ++i) {
    if (compiled[i].minterms[q.index()]) out.push_back(i);
  }
  return out;
}

const std::string& project(const PointConfiguration& c, const RelationSchema& s) {
  const auto matches = matching_relations(s, encode(c));
  return matches.size() == 1 ? s.labels()[matches.front()] : s.vague_name();
}

std::string_view to_string(ValidationDomain d) noexcept {
  return d == ValidationDomain::All ? "all" : "consistent";
}

ValidationReport validate(const RelationSchema& s, ValidationDomain domain) {
  ValidationReport report;
  report.schema = s.name();
  report.domain = domain;

  std::vector<QAssignment> assignments;
  if (domain == ValidationDomain::All) {
    for (std::size_t m = 0; m < QAssignment::kCount; ++m) {
      assignments.emplace_back(static_cast<std::uint8_t>(m));
    }
  } else {
    for (const auto& c : enumerate_consistent_configurations()) assignments.push_back(encode(c));
  }
  report.domain_size = assignments.size();

  for (auto q : assignments) {
    const auto matches = matching_relations(s, q);
    if (matches.empty()) {
      report.exhaustive = false;
      report.uncovered.push_back(q);
    } else if (matches.size() > 1) {
      report.exclusive = false;
      OverlapWitness w{q, {}};
      for (auto i : matches) w.relations.push_back(s.labels()[i]);
      report.overlaps.push_back(std::move(w));
    }
  }
  return report;
}

namespace {

nlohmann::json assignment_json(QAssignment q) {
  nlohmann::json atoms = nlohmann::json::object();
  for (std::size_t i = 0; i < QAtom::kCount; ++i) {
    const auto a = QAtom::from_index(i);
    atoms[to_string(a)] = q[a] ? 1 : 0;
  }
  return {{"minterm", q.index()}, {"configuration", to_string(decode(q))}, {"atoms", atoms}};
}

}  // namespace

std::string report_to_json(const ValidationReport& r) {
  nlohmann::json j;
  j["schema"] = r.schema;
  j["domain"] = std::string(to_string(r.domain));
  j["domain_size"] = r.domain_size;
  j["exclusive"] = r.exclusive;
  j["exhaustive"] = r.exhaustive;
  j["ok"] = r.ok();
  j["overlaps"] = nlohmann::json::array();
  for (const auto& w : r.overlaps) {
    auto entry = assignment_json(w.assignment);
    entry["relations"] = w.relations;
    j["overlaps"].push_back(entry);
  }
  j["uncovered"] = nlohmann::json::array();
  for (auto q : r.uncovered) j["uncovered"].push_back(assignment_json(q));
  return j.dump(2);
}

std::string report_to_table(const ValidationReport& r) {
  std::ostringstream out;
  out << "schema      " << r.schema << '\n'
      << "domain      " << to_string(r.domain) << " (" << r.domain_size << " assignments)\n"
      << "exclusive   " << (r.exclusive ? "yes" : "no") << '\n'
      << "exhaustive  " << (r.exhaustive ? "yes" : "no") << '\n';
  for (const auto& w : r.overlaps) {
    out << "overlap     " << to_string(decode(w.assignment)) << " ->";
    for (const auto& name : w.relations) out << ' ' << name;
    out << '\n';
  }
  for (auto q : r.uncovered) out << "uncovered   " << to_string(decode(q)) << '\n';
  return out.str();
}

ValidationError::ValidationError(ValidationReport report)
    : Error("ValidationError",
            "schema '" + report.schema + "' is " +
                (report.exclusive ? std::string() : std::string("not exclusive")) +
                (!report.exclusive && !report.exhaustive ? " and " : "") +
                (report.exhaustive ? std::string() : std::string("not exhaustive")) + " on the " +
                std::string(to_string(report.domain)) + " domain"),
      report_(std::move(report)) {}

}  // namespace timepoint
