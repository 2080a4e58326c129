#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "timepoint/point_algebra.hpp"

namespace timepoint {

enum class ExprKind : std::uint8_t { Const, Atom, Not, And, Or };

/// Immutable boolean expression tree over atoms of type AtomT.
///
/// And/Or nodes always hold at least two children: all_of/any_of collapse
/// the degenerate arities and flatten nested nodes of the same kind.
template <class AtomT>
class Expr {
public:
  using atom_type = AtomT;

  [[nodiscard]] static Expr constant(bool value) { return Expr(Node{ExprKind::Const, value, {}, {}}); }
  [[nodiscard]] static Expr atom(AtomT a) { return Expr(Node{ExprKind::Atom, false, a, {}}); }
  [[nodiscard]] static Expr negate(Expr child) {
    return Expr(Node{ExprKind::Not, false, {}, {std::move(child)}});
  }
  [[nodiscard]] static Expr all_of(std::vector<Expr> children) {
    return nary(ExprKind::And, std::move(children));
  }
  [[nodiscard]] static Expr any_of(std::vector<Expr> children) {
    return nary(ExprKind::Or, std::move(children));
  }

  [[nodiscard]] ExprKind kind() const noexcept { return node_->kind; }
  [[nodiscard]] bool value() const noexcept { return node_->value; }
  [[nodiscard]] const AtomT& atom() const noexcept { return node_->atom; }
  [[nodiscard]] const std::vector<Expr>& children() const noexcept { return node_->children; }

  /// Rebuilds the tree with every atom replaced by f(atom).
  template <class F>
  [[nodiscard]] auto substitute(F&& f) const -> Expr<typename decltype(f(std::declval<AtomT>()))::atom_type> {
    using Out = Expr<typename decltype(f(std::declval<AtomT>()))::atom_type>;
    switch (kind()) {
      case ExprKind::Const: return Out::constant(value());
      case ExprKind::Atom: return f(atom());
      case ExprKind::Not: return Out::negate(children().front().substitute(f));
      case ExprKind::And:
      case ExprKind::Or: {
        std::vector<Out> mapped;
        mapped.reserve(children().size());
        for (const auto& c : children()) mapped.push_back(c.substitute(f));
        return kind() == ExprKind::And ? Out::all_of(std::move(mapped))
                                       : Out::any_of(std::move(mapped));
      }
    }
    return Out::constant(false);
  }

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case ExprKind::Const: return a.value() == b.value();
      case ExprKind::Atom: return a.atom() == b.atom();
      default: return a.children() == b.children();
    }
  }

  friend Expr operator!(Expr e) { return negate(std::move(e)); }
  friend Expr operator&(Expr a, Expr b) { return all_of({std::move(a), std::move(b)}); }
  friend Expr operator|(Expr a, Expr b) { return any_of({std::move(a), std::move(b)}); }

private:
  struct Node {
    ExprKind kind;
    bool value;
    AtomT atom;
    std::vector<Expr> children;
  };

  explicit Expr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}

  static Expr nary(ExprKind kind, std::vector<Expr> children) {
    std::vector<Expr> flat;
    flat.reserve(children.size());
    for (auto& c : children) {
      if (c.kind() == kind) {
        flat.insert(flat.end(), c.children().begin(), c.children().end());
      } else {
        flat.push_back(std::move(c));
      }
    }
    if (flat.empty()) return constant(kind == ExprKind::And);
    if (flat.size() == 1) return std::move(flat.front());
    return Expr(Node{kind, false, {}, std::move(flat)});
  }

  std::shared_ptr<const Node> node_;
};

/// Renders an expression in the `!`, `&`, `|` text syntax with minimal
/// parentheses; `format_atom` renders a single atom.
template <class AtomT, class F>
[[nodiscard]] std::string format_expr(const Expr<AtomT>& e, F&& format_atom) {
  auto wrap = [&](const Expr<AtomT>& child, bool parens) {
    std::string s = format_expr(child, format_atom);
    return parens ? "(" + s + ")" : s;
  };
  switch (e.kind()) {
    case ExprKind::Const: return e.value() ? "true" : "false";
    case ExprKind::Atom: return format_atom(e.atom());
    case ExprKind::Not: {
      const auto& c = e.children().front();
      return "!" + wrap(c, c.kind() == ExprKind::And || c.kind() == ExprKind::Or);
    }
    case ExprKind::And:
    case ExprKind::Or: {
      const bool is_and = e.kind() == ExprKind::And;
      std::string out;
      for (const auto& c : e.children()) {
        if (!out.empty()) out += is_and ? " & " : " | ";
        out += wrap(c, c.kind() == (is_and ? ExprKind::Or : ExprKind::And));
      }
      return out;
    }
  }
  return {};
}

/// Question atom Q^i_tp: question `question` (1 or 2) about point pair `pair`.
struct QAtom {
  PointPair pair = PointPair::SS;
  int question = 1;

  static constexpr std::size_t kCount = 8;

  /// Bit position in a QAssignment: 2 * pair + (question - 1).
  [[nodiscard]] constexpr std::size_t index() const noexcept {
    return 2 * static_cast<std::size_t>(pair) + static_cast<std::size_t>(question - 1);
  }
  [[nodiscard]] static constexpr QAtom from_index(std::size_t i) noexcept {
    return {static_cast<PointPair>(i / 2), static_cast<int>(i % 2) + 1};
  }

  friend constexpr bool operator==(QAtom, QAtom) = default;
};

/// "Q1_ss"
[[nodiscard]] std::string to_string(QAtom a);

using LogicExpr = Expr<QAtom>;

/// A binary assignment of all eight question atoms; also a minterm index.
class QAssignment {
public:
  static constexpr std::size_t kCount = 256;

  constexpr QAssignment() noexcept = default;
  constexpr explicit QAssignment(std::uint8_t bits) noexcept : bits_(bits) {}

  [[nodiscard]] constexpr bool operator[](QAtom a) const noexcept {
    return ((bits_ >> a.index()) & 1u) != 0;
  }
  [[nodiscard]] constexpr QAssignment with(QAtom a, bool v) const noexcept {
    const auto mask = static_cast<std::uint8_t>(1u << a.index());
    return QAssignment(static_cast<std::uint8_t>(v ? (bits_ | mask) : (bits_ & ~mask)));
  }
  [[nodiscard]] constexpr std::size_t index() const noexcept { return bits_; }

  [[nodiscard]] QuestionAnswers answers(PointPair tp) const noexcept {
    return {(*this)[{tp, 1}], (*this)[{tp, 2}]};
  }

  friend constexpr bool operator==(QAssignment, QAssignment) = default;

private:
  std::uint8_t bits_ = 0;
};

/// Q encoding of a configuration, pair by pair through the Q<->Z table.
[[nodiscard]] QAssignment encode(const PointConfiguration& c) noexcept;
[[nodiscard]] PointConfiguration decode(QAssignment q) noexcept;

/// Probabilities P(Q^i_tp) for all eight atoms, each in [0, 1].
class QVector {
public:
  QVector() noexcept { values_.fill(0.0); }
  /// Throws DomainError if any value is outside [0, 1] or not finite.
  explicit QVector(const std::array<double, QAtom::kCount>& values);
  explicit QVector(QAssignment q) noexcept;

  [[nodiscard]] double operator[](QAtom a) const noexcept { return values_[a.index()]; }
  [[nodiscard]] const std::array<double, QAtom::kCount>& values() const noexcept { return values_; }

  [[nodiscard]] bool is_binary() const noexcept;
  /// Answers yes where the probability is strictly greater than 0.5.
  [[nodiscard]] QAssignment threshold() const noexcept;

private:
  std::array<double, QAtom::kCount> values_;
};

using AtomGradient = std::array<double, QAtom::kCount>;

struct SoftValue {
  double value = 0.0;
  AtomGradient gradient{};
};

using MintermSet = std::bitset<QAssignment::kCount>;

[[nodiscard]] bool eval_hard(const LogicExpr& e, QAssignment q);
/// Throws DomainError if q is not binary.
[[nodiscard]] bool eval_hard(const LogicExpr& e, const QVector& q);

/// Product t-norm relaxation: a&b = ab, a|b = a+b-ab, !a = 1-a.
[[nodiscard]] double eval_soft(const LogicExpr& e, const QVector& q);
/// eval_soft and its partial derivatives in one post-order pass.
[[nodiscard]] SoftValue grad_soft(const LogicExpr& e, const QVector& q);

[[nodiscard]] MintermSet expand_minterms(const LogicExpr& e);

/// Probability of minterm m when atoms are independent with P(a) = q[a].
[[nodiscard]] double minterm_probability(QAssignment m, const QVector& q) noexcept;
[[nodiscard]] double minterm_mass(const MintermSet& minterms, const QVector& q) noexcept;
[[nodiscard]] SoftValue grad_minterm_mass(const MintermSet& minterms, const QVector& q) noexcept;

/// Exact probability that e holds under independent atoms.
[[nodiscard]] double eval_prob_sum(const LogicExpr& e, const QVector& q);

[[nodiscard]] std::string to_string(const LogicExpr& e);

/// Parses `Q1_ss & !(Q2_es | true)`. Precedence: ! > & > |.
[[nodiscard]] LogicExpr parse_logic_expr(std::string_view text);

}  // namespace timepoint
