#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "gqw/cas/parser.hpp"
#include "gqw/exterior/tensors.hpp"

namespace gqw {

namespace detail {

// A form-valued subterm or a plain scalar (a 0-form that has not met a dx).
struct FormValue {
  std::optional<Expr> scalar;
  std::optional<KForm> form;

  [[nodiscard]] KForm as_form(const Chart& c) const { return form ? *form : KForm::function(c, *scalar); }
};

inline bool is_differential(const std::string& name, const Chart& c) {
  return name.size() > 1 && name[0] == 'd' && c.index_of(name) < 0 && c.index_of(name.substr(1)) >= 0;
}

inline FormValue lower_form(const syntax::Node& n, const Chart& c) {
  using syntax::NodeKind;
  const auto vocab = c.vocabulary();
  switch (n.kind) {
    case NodeKind::Number:
      return {Expr(n.number), std::nullopt};
    case NodeKind::Ident:
      if (is_differential(n.text, c))
        return {std::nullopt, KForm::basis(c, static_cast<std::size_t>(c.index_of(n.text.substr(1))))};
      return {lower_expr(n, vocab), std::nullopt};
    case NodeKind::Call: {
      for (const auto& ch : n.children)
        if (lower_form(ch, c).form) throw ParseError("function of a differential form", n.offset);
      return {lower_expr(n, vocab), std::nullopt};
    }
    case NodeKind::Neg: {
      FormValue v = lower_form(n.children[0], c);
      if (v.form) return {std::nullopt, Expr(-1) * *v.form};
      return {-*v.scalar, std::nullopt};
    }
    case NodeKind::Binary: {
      FormValue a = lower_form(n.children[0], c);
      FormValue b = lower_form(n.children[1], c);
      const char op = n.text[0];
      if (!a.form && !b.form) {
        switch (op) {
          case '+': return {*a.scalar + *b.scalar, std::nullopt};
          case '-': return {*a.scalar - *b.scalar, std::nullopt};
          case '*': return {*a.scalar * *b.scalar, std::nullopt};
          default: return {lower_expr(n, vocab), std::nullopt};
        }
      }
      switch (op) {
        case '+':
        case '-': {
          KForm fa = a.as_form(c);
          KForm fb = b.as_form(c);
          if (fa.degree() != fb.degree()) {
            if (a.scalar && a.scalar->is_zero()) fa = KForm::zero(c, fb.degree());
            else if (b.scalar && b.scalar->is_zero()) fb = KForm::zero(c, fa.degree());
            else throw ParseError("sum of forms of different degree", n.offset);
          }
          return {std::nullopt, op == '+' ? fa + fb : fa - fb};
        }
        case '*':
          if (a.form && b.form) throw ParseError("product of two forms; use ^ for the wedge product", n.offset);
          return {std::nullopt, a.form ? *b.scalar * *a.form : *a.scalar * *b.form};
        case '/':
          if (b.form) throw ParseError("division by a differential form", n.offset);
          if (b.scalar->is_zero()) throw ParseError("division by zero", n.offset);
          return {std::nullopt, pow(*b.scalar, Rational(-1)) * *a.form};
        case '^':
          if (!a.form || !b.form) throw ParseError("wedge needs two forms", n.offset);
          try {
            return {std::nullopt, wedge(*a.form, *b.form)};
          } catch (const UnsupportedDegreeError&) {
            throw ParseError("wedge product degree exceeds 2", n.offset);
          }
        default:
          throw ParseError("comparison not allowed in a form", n.offset);
      }
    }
  }
  throw ParseError("malformed syntax tree", n.offset);
}

}  // namespace detail

/// Parses a form literal such as "dp^dq" or "1/2*(p*dq - q*dp)". The token
/// dX denotes the differential of coordinate X; ^ between forms is the wedge.
/// A text without differentials is a 0-form.
inline KForm parse_form(std::string_view text, const Chart& chart) {
  KForm f = detail::lower_form(syntax::parse_tree(text), chart).as_form(chart);
  if (f.degree() > 2) throw UnsupportedDegreeError("form literals are limited to degree 2");
  return f;
}

/// Prints a form in the literal grammar, e.g. "2*q*dq + 2*p*dp".
inline std::string to_string(const KForm& a) {
  if (a.degree() == 0) return to_string(a.scalar());
  std::string out;
  auto idx = a.indices();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Expr& c = a.coefficients()[k];
    if (c.is_zero()) continue;
    std::string basis;
    for (std::size_t r = 0; r < idx[k].size(); ++r)
      basis += (r ? "^d" : "d") + a.chart().coordinate(static_cast<std::size_t>(idx[k][r]));
    std::string term = c.is_one() ? basis : "(" + to_string(c) + ")*" + basis;
    out += out.empty() ? term : " + " + term;
  }
  return out.empty() ? "0" : out;
}

inline std::string to_string(const VectorField& v) {
  std::string out;
  for (std::size_t k = 0; k < v.dimension(); ++k) {
    if (v[k].is_zero()) continue;
    std::string basis = "d/d" + v.chart().coordinate(k);
    std::string term = v[k].is_one() ? basis : "(" + to_string(v[k]) + ")*" + basis;
    out += out.empty() ? term : " + " + term;
  }
  return out.empty() ? "0" : out;
}

}  // namespace gqw
