#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "timepoint/error.hpp"
#include "timepoint/logic_expr.hpp"

namespace timepoint::detail {

/// "Q1_ss" -> QAtom; nullopt for anything else.
std::optional<QAtom> parse_q_atom(std::string_view word);

/// Character cursor over a single line of expression text. Column numbers
/// reported in errors are 1-based and include `column_offset`.
class Cursor {
public:
  Cursor(std::string_view text, std::size_t line, std::size_t column_offset)
      : text_(text), line_(line), column_offset_(column_offset) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[nodiscard]] bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  [[nodiscard]] char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  /// Identifier made of letters, digits and '_'; empty if none.
  std::string word() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  /// Comparison operator: one of < <= = > >= ~ (empty if none).
  std::string comparator() {
    skip_space();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '<' || text_[pos_] == '>')) {
      ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '=') ++pos_;
    } else if (pos_ < text_.size() && (text_[pos_] == '=' || text_[pos_] == '~')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  [[nodiscard]] std::size_t mark() const noexcept { return pos_; }

  [[noreturn]] void fail(const std::string& message) const { fail_at(pos_, message); }
  [[noreturn]] void fail_at(std::size_t pos, const std::string& message) const {
    throw ParseError(message, line_, column_offset_ + pos + 1);
  }

private:
  std::string_view text_;
  std::size_t line_;
  std::size_t column_offset_;
  std::size_t pos_ = 0;
};

/// Recursive-descent parser for `|` over `&` over `!`/atoms/parentheses.
/// `parse_atom(cursor)` consumes one atom or throws ParseError.
template <class AtomT, class AtomParser>
class ExprParser {
public:
  ExprParser(Cursor& cursor, AtomParser parse_atom) : cur_(cursor), parse_atom_(parse_atom) {}

  Expr<AtomT> parse_all() {
    auto e = parse_or();
    if (!cur_.at_end()) cur_.fail("unexpected trailing input");
    return e;
  }

  Expr<AtomT> parse_or() {
    std::vector<Expr<AtomT>> terms{parse_and()};
    while (cur_.accept('|')) terms.push_back(parse_and());
    return Expr<AtomT>::any_of(std::move(terms));
  }

private:
  Expr<AtomT> parse_and() {
    std::vector<Expr<AtomT>> factors{parse_unary()};
    while (cur_.accept('&')) factors.push_back(parse_unary());
    return Expr<AtomT>::all_of(std::move(factors));
  }

  Expr<AtomT> parse_unary() {
    if (cur_.accept('!')) return Expr<AtomT>::negate(parse_unary());
    if (cur_.accept('(')) {
      auto inner = parse_or();
      cur_.expect(')');
      return inner;
    }
    if (cur_.at_end()) cur_.fail("unexpected end of expression");
    const auto start = cur_.mark();
    const auto w = cur_.word();
    if (w == "true") return Expr<AtomT>::constant(true);
    if (w == "false") return Expr<AtomT>::constant(false);
    if (w.empty()) cur_.fail("expected an atom, '!', '(' or a constant");
    return Expr<AtomT>::atom(parse_atom_(cur_, w, start));
  }

  Cursor& cur_;
  AtomParser parse_atom_;
};

}  // namespace timepoint::detail
