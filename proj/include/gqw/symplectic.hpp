#pragma once

#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gqw/exterior.hpp"

namespace gqw {

using ExprMatrix = std::vector<std::vector<Expr>>;

namespace detail {

// Laplace expansion along the first remaining row, memoized on the set of
// remaining columns (rows are implied by the set size).
class Determinant {
 public:
  explicit Determinant(const ExprMatrix& m) : m_(m) {}

  Expr operator()(unsigned columns, std::size_t row) {
    if (columns == 0) return Expr(1);
    if (auto it = memo_.find(columns); it != memo_.end()) return it->second;
    std::vector<Expr> terms;
    int sign = 1;
    for (std::size_t c = 0; c < m_.size(); ++c) {
      if (!(columns & (1u << c))) continue;
      if (!m_[row][c].is_zero()) {
        Expr minor = (*this)(columns & ~(1u << c), row + 1);
        terms.push_back(Expr(sign) * m_[row][c] * minor);
      }
      sign = -sign;
    }
    Expr d = add(std::move(terms));
    memo_.emplace(columns, d);
    return d;
  }

 private:
  const ExprMatrix& m_;
  std::map<unsigned, Expr> memo_;
};

}  // namespace detail

inline Expr determinant(const ExprMatrix& m) {
  detail::Determinant det(m);
  return det((1u << m.size()) - 1, 0);
}

/// Inverse by adjugate over determinant.
inline ExprMatrix inverse(const ExprMatrix& m, const Expr& det) {
  const std::size_t n = m.size();
  const Expr inv_det = pow(det, Rational(-1));
  ExprMatrix out(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // cofactor C_ji sits at (i, j) of the adjugate
      ExprMatrix minor;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == j) continue;
        std::vector<Expr> row;
        for (std::size_t c = 0; c < n; ++c)
          if (c != i) row.push_back(m[r][c]);
        minor.push_back(std::move(row));
      }
      Expr cof = determinant(minor);
      out[i][j] = ((i + j) % 2 == 0 ? cof : -cof) * inv_det;
    }
  }
  return out;
}

/// A chart carrying a closed nondegenerate 2-form.
class SymplecticChart {
 public:
  SymplecticChart(Chart chart, KForm omega) : chart_(std::move(chart)), omega_(std::move(omega)) {
    require_same_chart(chart_, omega_.chart(), "symplectic chart");
    if (omega_.degree() != 2) throw ValidationError("the symplectic form must have degree 2");
    if (chart_.dimension() % 2 != 0) throw DegeneracyError("a symplectic chart needs even dimension");

    auto closed = forms_equal(exterior_derivative(omega_), KForm::zero(chart_, 3));
    if (!closed.equal)
      throw ValidationError("the symplectic form is not closed (residual " + std::to_string(closed.residual) + ")");

    const std::size_t n = chart_.dimension();
    matrix_.assign(n, std::vector<Expr>(n, Expr(0)));
    auto idx = omega_.indices();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      auto i = static_cast<std::size_t>(idx[k][0]);
      auto j = static_cast<std::size_t>(idx[k][1]);
      matrix_[i][j] = omega_.coefficients()[k];
      matrix_[j][i] = -omega_.coefficients()[k];
    }
    det_ = gqw::determinant(matrix_);
    for (const auto& pt : chart_.sampler().points()) {
      double v = std::abs(evaluate(det_, pt));
      if (!(v > chart_.sampler().tolerance())) {
        std::ostringstream msg;
        msg << "the symplectic form is degenerate at";
        for (const auto& c : chart_.coordinates()) msg << ' ' << c << '=' << pt.values.at(c).real();
        throw DegeneracyError(msg.str());
      }
    }
    inverse_ = inverse(matrix_, det_);
  }

  [[nodiscard]] const Chart& chart() const { return chart_; }
  [[nodiscard]] const KForm& omega() const { return omega_; }
  /// W with omega = sum_{i<j} W_ij dx^i ^ dx^j, W antisymmetric.
  [[nodiscard]] const ExprMatrix& matrix() const { return matrix_; }
  [[nodiscard]] const ExprMatrix& inverse_matrix() const { return inverse_; }
  [[nodiscard]] const Expr& determinant() const { return det_; }

  [[nodiscard]] Expr parse(std::string_view text) const { return chart_.parse(text); }

 private:
  Chart chart_;
  KForm omega_;
  ExprMatrix matrix_;
  ExprMatrix inverse_;
  Expr det_;
};

/// The field with xi ⌟ omega = df, i.e. xi = -W^{-1} grad f.
inline VectorField hamiltonian_vf(const Expr& f, const SymplecticChart& s) {
  const Chart& c = s.chart();
  const std::size_t n = c.dimension();
  std::vector<Expr> grad;
  for (std::size_t k = 0; k < n; ++k) grad.push_back(differentiate(f, c.coordinate(k)));
  std::vector<Expr> comps;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Expr> terms;
    for (std::size_t k = 0; k < n; ++k)
      if (!grad[k].is_zero() && !s.inverse_matrix()[i][k].is_zero())
        terms.push_back(-(s.inverse_matrix()[i][k] * grad[k]));
    comps.push_back(add(std::move(terms)));
  }
  return {c, std::move(comps)};
}

/// {f, g} = xi_f g.
inline Expr poisson(const Expr& f, const Expr& g, const SymplecticChart& s) {
  return hamiltonian_vf(f, s).apply(g);
}

/// The three routes to {f, g}: -omega(xi_f, xi_g), xi_f g, and -(xi_g ⌟ df).
struct PoissonRoutes {
  Expr omega_route;
  Expr derivative_route;
  Expr interior_route;
};

inline PoissonRoutes poisson_routes(const Expr& f, const Expr& g, const SymplecticChart& s) {
  VectorField xf = hamiltonian_vf(f, s);
  VectorField xg = hamiltonian_vf(g, s);
  KForm df = exterior_derivative(s.chart(), f);
  return {-evaluate_form(s.omega(), xf, xg), xf.apply(g), -interior_product(xg, df).scalar()};
}

/// Agreement of the three routes.
inline EqualityResult check_poisson_routes(const Expr& f, const Expr& g, const SymplecticChart& s) {
  auto r = poisson_routes(f, g, s);
  EqualityResult out = expr_equal(r.omega_route, r.derivative_route, s.chart().sampler());
  out.merge(expr_equal(r.interior_route, r.derivative_route, s.chart().sampler()));
  return out;
}

/// The defining equation xi_f ⌟ omega = df.
inline EqualityResult check_hamiltonian(const Expr& f, const SymplecticChart& s) {
  return forms_equal(interior_product(hamiltonian_vf(f, s), s.omega()), exterior_derivative(s.chart(), f));
}

struct BracketLemmaReport {
  std::vector<double> component_residuals;
  EqualityResult result;
};

/// [xi_f, xi_g] against xi_{f,g}, componentwise.
inline BracketLemmaReport verify_bracket_lemma(const Expr& f, const Expr& g, const SymplecticChart& s) {
  VectorField lhs = lie_bracket(hamiltonian_vf(f, s), hamiltonian_vf(g, s));
  VectorField rhs = hamiltonian_vf(poisson(f, g, s), s);
  BracketLemmaReport rep;
  for (std::size_t k = 0; k < lhs.dimension(); ++k) {
    auto r = expr_equal(lhs[k], rhs[k], s.chart().sampler());
    rep.component_residuals.push_back(r.residual);
    rep.result.merge(r);
  }
  return rep;
}

/// {f,{g,h}} + {g,{h,f}} + {h,{f,g}}.
inline Expr jacobiator(const Expr& f, const Expr& g, const Expr& h, const SymplecticChart& s) {
  return poisson(f, poisson(g, h, s), s) + poisson(g, poisson(h, f, s), s) + poisson(h, poisson(f, g, s), s);
}

/// {f, gh} - {f,g}h - g{f,h}.
inline Expr leibniz_defect(const Expr& f, const Expr& g, const Expr& h, const SymplecticChart& s) {
  return poisson(f, g * h, s) - poisson(f, g, s) * h - g * poisson(f, h, s);
}

/// Random polynomial of total degree <= `degree` with small integer
/// coefficients, deterministic in `rng`.
template <typename Rng>
Expr random_polynomial(const Chart& c, int degree, Rng& rng) {
  std::vector<Expr> terms;
  const std::size_t n = c.dimension();
  std::vector<int> exps(n, 0);
  auto rec = [&](auto&& self, std::size_t k, int left) -> void {
    if (k == n) {
      const auto coeff = static_cast<std::int64_t>(rng() % 7) - 3;
      if (coeff == 0) return;
      std::vector<Expr> factors{Expr(coeff)};
      for (std::size_t j = 0; j < n; ++j)
        if (exps[j] > 0) factors.push_back(pow(c.coordinate_symbol(j), Rational(exps[j])));
      terms.push_back(mul(std::move(factors)));
      return;
    }
    for (int e = 0; e <= left; ++e) {
      exps[k] = e;
      self(self, k + 1, left - e);
    }
    exps[k] = 0;
  };
  rec(rec, 0, degree);
  return add(std::move(terms));
}

}  // namespace gqw
