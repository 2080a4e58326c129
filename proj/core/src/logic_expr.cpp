#include "timepoint/logic_expr.hpp"

#include <cmath>

namespace timepoint {

std::string to_string(QAtom a) {
  return "Q" + std::to_string(a.question) + "_" + std::string(to_string(a.pair));
}

QAssignment encode(const PointConfiguration& c) noexcept {
  QAssignment q;
  for (auto tp : kPointPairs) {
    const auto a = relation_to_answers(c[tp]);
    q = q.with({tp, 1}, a.q1).with({tp, 2}, a.q2);
  }
  return q;
}

PointConfiguration decode(QAssignment q) noexcept {
  PointConfiguration c;
  for (auto tp : kPointPairs) c = c.with(tp, answers_to_relation(q.answers(tp)));
  return c;
}

QVector::QVector(const std::array<double, QAtom::kCount>& values) : values_(values) {
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw DomainError("question probabilities must lie in [0, 1]");
    }
  }
}

QVector::QVector(QAssignment q) noexcept {
  for (std::size_t i = 0; i < QAtom::kCount; ++i) {
    values_[i] = q[QAtom::from_index(i)] ? 1.0 : 0.0;
  }
}

bool QVector::is_binary() const noexcept {
  for (double v : values_) {
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

QAssignment QVector::threshold() const noexcept {
  QAssignment q;
  for (std::size_t i = 0; i < QAtom::kCount; ++i) {
    q = q.with(QAtom::from_index(i), values_[i] > 0.5);
  }
  return q;
}

bool eval_hard(const LogicExpr& e, QAssignment q) {
  switch (e.kind()) {
    case ExprKind::Const: return e.value();
    case ExprKind::Atom: return q[e.atom()];
    case ExprKind::Not: return !eval_hard(e.children().front(), q);
    case ExprKind::And:
      for (const auto& c : e.children()) {
        if (!eval_hard(c, q)) return false;
      }
      return true;
    case ExprKind::Or:
      for (const auto& c : e.children()) {
        if (eval_hard(c, q)) return true;
      }
      return false;
  }
  return false;
}

bool eval_hard(const LogicExpr& e, const QVector& q) {
  if (!q.is_binary()) throw DomainError("eval_hard requires a binary question vector");
  return eval_hard(e, q.threshold());
}

double eval_soft(const LogicExpr& e, const QVector& q) {
  switch (e.kind()) {
    case ExprKind::Const: return e.value() ? 1.0 : 0.0;
    case ExprKind::Atom: return q[e.atom()];
    case ExprKind::Not: return 1.0 - eval_soft(e.children().front(), q);
    case ExprKind::And: {
      double p = 1.0;
      for (const auto& c : e.children()) p *= eval_soft(c, q);
      return p;
    }
    case ExprKind::Or: {
      double none = 1.0;
      for (const auto& c : e.children()) none *= 1.0 - eval_soft(c, q);
      return 1.0 - none;
    }
  }
  return 0.0;
}

namespace {

// For the product of factors f_i, d/df_i = prod_{j != i} f_j; prefix/suffix
// products keep this exact when some factor is zero.
std::vector<double> leave_one_out_products(const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 1.0);
  double prefix = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = prefix;
    prefix *= f[i];
  }
  double suffix = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    out[i] *= suffix;
    suffix *= f[i];
  }
  return out;
}

}  // namespace

SoftValue grad_soft(const LogicExpr& e, const QVector& q) {
  SoftValue out;
  switch (e.kind()) {
    case ExprKind::Const:
      out.value = e.value() ? 1.0 : 0.0;
      return out;
    case ExprKind::Atom:
      out.value = q[e.atom()];
      out.gradient[e.atom().index()] = 1.0;
      return out;
    case ExprKind::Not: {
      const auto inner = grad_soft(e.children().front(), q);
      out.value = 1.0 - inner.value;
      for (std::size_t i = 0; i < QAtom::kCount; ++i) out.gradient[i] = -inner.gradient[i];
      return out;
    }
    case ExprKind::And:
    case ExprKind::Or: {
      const bool is_and = e.kind() == ExprKind::And;
      std::vector<SoftValue> parts;
      std::vector<double> factors;
      parts.reserve(e.children().size());
      for (const auto& c : e.children()) {
        parts.push_back(grad_soft(c, q));
        factors.push_back(is_and ? parts.back().value : 1.0 - parts.back().value);
      }
      const auto others = leave_one_out_products(factors);
      double product = 1.0;
      for (double f : factors) product *= f;
      out.value = is_and ? product : 1.0 - product;
      // d(1 - prod(1 - v_i))/dv_i = prod_{j != i}(1 - v_j), same sign as And.
      for (std::size_t k = 0; k < parts.size(); ++k) {
        for (std::size_t i = 0; i < QAtom::kCount; ++i) {
          out.gradient[i] += others[k] * parts[k].gradient[i];
        }
      }
      return out;
    }
  }
  return out;
}

MintermSet expand_minterms(const LogicExpr& e) {
  MintermSet out;
  for (std::size_t m = 0; m < QAssignment::kCount; ++m) {
    out[m] = eval_hard(e, QAssignment(static_cast<std::uint8_t>(m)));
  }
  return out;
}

double minterm_probability(QAssignment m, const QVector& q) noexcept {
  double p = 1.0;
  for (std::size_t i = 0; i < QAtom::kCount; ++i) {
    const auto a = QAtom::from_index(i);
    p *= m[a] ? q[a] : 1.0 - q[a];
  }
  return p;
}

double minterm_mass(const MintermSet& minterms, const QVector& q) noexcept {
  double total = 0.0;
  for (std::size_t m = 0; m < QAssignment::kCount; ++m) {
    if (minterms[m]) total += minterm_probability(QAssignment(static_cast<std::uint8_t>(m)), q);
  }
  return total;
}

SoftValue grad_minterm_mass(const MintermSet& minterms, const QVector& q) noexcept {
  SoftValue out;
  for (std::size_t mi = 0; mi < QAssignment::kCount; ++mi) {
    if (!minterms[mi]) continue;
    const QAssignment m(static_cast<std::uint8_t>(mi));
    std::array<double, QAtom::kCount> factor{};
    for (std::size_t i = 0; i < QAtom::kCount; ++i) {
      const auto a = QAtom::from_index(i);
      factor[i] = m[a] ? q[a] : 1.0 - q[a];
    }
    std::vector<double> f(factor.begin(), factor.end());
    const auto others = leave_one_out_products(f);
    double p = 1.0;
    for (double x : factor) p *= x;
    out.value += p;
    for (std::size_t i = 0; i < QAtom::kCount; ++i) {
      out.gradient[i] += (m[QAtom::from_index(i)] ? 1.0 : -1.0) * others[i];
    }
  }
  return out;
}

double eval_prob_sum(const LogicExpr& e, const QVector& q) {
  return minterm_mass(expand_minterms(e), q);
}

std::string to_string(const LogicExpr& e) {
  return format_expr(e, [](QAtom a) { return to_string(a); });
}

}  // namespace timepoint
