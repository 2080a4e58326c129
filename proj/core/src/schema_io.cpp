#include <optional>
#include <sstream>

#include "expr_parser.hpp"
#include "timepoint/schema.hpp"

namespace timepoint {

namespace {

PointPredicate parse_point_atom(detail::Cursor& cur, const std::string& word, std::size_t start) {
  using enum PointRelation;
  if (const auto q = detail::parse_q_atom(word)) {
    // Q1 is yes for before/vague, Q2 for after/vague.
    return q->question == 1 ? PointPredicate{q->pair, {Before, Vague}}
                            : PointPredicate{q->pair, {After, Vague}};
  }
  const auto pair = parse_point_pair(word);
  if (!pair) cur.fail_at(start, "unknown atom '" + word + "'");

  const auto op_start = cur.mark();
  const auto op = cur.comparator();
  if (op == "<") return {*pair, {Before}};
  if (op == "<=") return {*pair, {Before, Equal}};
  if (op == "=") return {*pair, {Equal}};
  if (op == ">") return {*pair, {After}};
  if (op == ">=") return {*pair, {After, Equal}};
  if (op == "~") return {*pair, {Vague}};
  if (!op.empty()) cur.fail_at(op_start, "unknown comparator '" + op + "'");

  if (cur.word() != "in") cur.fail_at(op_start, "expected a comparator or 'in {...}'");
  cur.expect('{');
  RelationSet allowed;
  do {
    const auto at = cur.mark();
    const auto name = cur.word();
    const auto z = parse_point_relation(name);
    if (!z) cur.fail_at(at, "unknown point relation '" + name + "'");
    allowed = allowed.with(*z);
  } while (cur.accept(','));
  cur.expect('}');
  return {*pair, allowed};
}

PointExpr parse_point_expr(std::string_view text, std::size_t line, std::size_t column) {
  detail::Cursor cursor(text, line, column);
  detail::ExprParser<PointPredicate, decltype(&parse_point_atom)> parser(cursor, &parse_point_atom);
  return parser.parse_all();
}

struct Line {
  std::string_view text;
  std::size_t number;
  std::size_t pos = 0;

  void skip_space() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  std::string_view token() {
    skip_space();
    const auto start = pos;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t') ++pos;
    return text.substr(start, pos - start);
  }
  [[noreturn]] void fail(const std::string& message, std::size_t at) const {
    throw ParseError(message, number, at + 1);
  }
  std::string name() {
    skip_space();
    const auto at = pos;
    const auto t = token();
    if (t.empty() || t == ":=") fail("expected a name", at);
    return std::string(t);
  }
  void expect_define() {
    skip_space();
    const auto at = pos;
    if (token() != ":=") fail("expected ':='", at);
  }
  std::string_view rest() {
    skip_space();
    return text.substr(pos);
  }
  void expect_end() {
    skip_space();
    if (pos < text.size()) fail("unexpected trailing input", pos);
  }
};

}  // namespace

RelationSchema parse_schema(std::string_view text) {
  std::optional<std::string> name;
  std::vector<RelationDef> relations;
  std::optional<std::string> vague_name;
  std::optional<PointExpr> vague_expr;
  std::vector<std::pair<std::string, std::string>> inverses;

  std::size_t number = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    auto end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(begin, end - begin);
    begin = end + 1;
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    Line line{raw, number};
    const auto keyword_at = (line.skip_space(), line.pos);
    const auto keyword = line.token();
    if (keyword.empty()) continue;

    if (keyword == "schema") {
      if (name) line.fail("duplicate 'schema' header", keyword_at);
      name = line.name();
      line.expect_end();
    } else if (!name) {
      line.fail("expected 'schema <name>' before any definition", keyword_at);
    } else if (keyword == "relation") {
      auto rel = line.name();
      line.expect_define();
      const auto at = line.pos;
      relations.push_back({std::move(rel), parse_point_expr(line.rest(), number, at)});
    } else if (keyword == "vague") {
      if (vague_name) line.fail("duplicate 'vague' declaration", keyword_at);
      vague_name = line.name();
      line.expect_define();
      const auto at = line.pos;
      const auto body = line.rest();
      if (body == "complement" || body.starts_with("complement ")) {
        line.token();
        line.expect_end();
      } else {
        vague_expr = parse_point_expr(body, number, at);
      }
    } else if (keyword == "inverse") {
      auto a = line.name();
      auto b = line.name();
      line.expect_end();
      inverses.emplace_back(std::move(a), std::move(b));
    } else {
      line.fail("unknown keyword '" + std::string(keyword) + "'", keyword_at);
    }
    if (end == text.size()) break;
  }

  if (!name) throw ParseError("missing 'schema <name>' header", number, 1);
  if (!vague_name) throw ParseError("missing 'vague <name> := ...' declaration", number, 1);
  try {
    return RelationSchema(*name, std::move(relations), *vague_name, std::move(vague_expr),
                          std::move(inverses));
  } catch (const UnknownRelation& e) {
    throw SchemaError("UnknownRelation", std::string("inverse declaration: ") + e.what());
  }
}

RelationSchema load_schema(std::string_view text, ValidationDomain domain) {
  auto schema = parse_schema(text);
  auto report = validate(schema, domain);
  if (!report.ok()) throw ValidationError(std::move(report));
  return schema;
}

std::string save_schema(const RelationSchema& s) {
  std::ostringstream out;
  out << "schema " << s.name() << '\n';
  for (const auto& r : s.relations()) out << "relation " << r.name << " := " << to_string(r.expr) << '\n';
  out << "vague " << s.vague_name() << " := "
      << (s.vague_expr() ? to_string(*s.vague_expr()) : std::string("complement")) << '\n';
  for (const auto& [a, b] : s.declared_inverses()) out << "inverse " << a << ' ' << b << '\n';
  return out.str();
}

}  // namespace timepoint
