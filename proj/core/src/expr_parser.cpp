#include "expr_parser.hpp"

namespace timepoint {

namespace detail {

std::optional<QAtom> parse_q_atom(std::string_view word) {
  // Q<question>_<pair>
  if (word.size() != 5 || word[0] != 'Q' || word[2] != '_') return std::nullopt;
  if (word[1] != '1' && word[1] != '2') return std::nullopt;
  const auto pair = parse_point_pair(word.substr(3));
  if (!pair) return std::nullopt;
  return QAtom{*pair, word[1] - '0'};
}

}  // namespace detail

LogicExpr parse_logic_expr(std::string_view text) {
  detail::Cursor cursor(text, 1, 0);
  auto atom = [](detail::Cursor& cur, const std::string& word, std::size_t start) {
    const auto a = detail::parse_q_atom(word);
    if (!a) cur.fail_at(start, "unknown atom '" + word + "'");
    return *a;
  };
  detail::ExprParser<QAtom, decltype(atom)> parser(cursor, atom);
  return parser.parse_all();
}

}  // namespace timepoint
