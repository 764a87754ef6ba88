#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gqw/symplectic.hpp"

// Prequantization on the trivial circle bundle Y = M x U(1), fiber point
// lambda = exp(2 pi i t), with connection gamma = (1/i hbar) beta + 2 pi i dt.
// The vertical generator d/dt is written d_{2pi i}; gamma(d_{2pi i}) = 2 pi i.

namespace gqw {

inline Expr two_pi_i() { return Expr(2) * pi() * imag_unit(); }
inline Expr inv_i_hbar() { return pow(imag_unit() * hbar(), Rational(-1)); }

/// Name for an extra coordinate that does not clash with the chart.
inline std::string fresh_coordinate(const Chart& c, std::string base) {
  while (c.index_of(base) >= 0) base += "_";
  return base;
}

class PrequantCircle {
 public:
  /// Checks d beta = omega.
  PrequantCircle(SymplecticChart base, KForm beta) : PrequantCircle(std::move(base), std::move(beta), true) {}

  /// Skips the d beta = omega check. Used to build deliberately broken
  /// bundles for mutation tests.
  static PrequantCircle unchecked(SymplecticChart base, KForm beta) {
    return {std::move(base), std::move(beta), false};
  }

  [[nodiscard]] const SymplecticChart& base() const { return base_; }
  [[nodiscard]] const Chart& chart() const { return base_.chart(); }
  [[nodiscard]] const KForm& beta() const { return beta_; }
  [[nodiscard]] const std::string& fiber_coordinate() const { return fiber_; }

  /// The chart (m, t) of the total space, for numeric oracles.
  [[nodiscard]] Chart total_chart() const {
    auto coords = chart().coordinates();
    coords.push_back(fiber_);
    return {coords, chart().sampler().extended(fiber_, {0.0, 1.0})};
  }

  /// (1/i hbar) beta(X): the horizontal part of gamma on a base field.
  [[nodiscard]] Expr gamma_base(const VectorField& x) const { return inv_i_hbar() * evaluate_form(beta_, x); }

 private:
  PrequantCircle(SymplecticChart base, KForm beta, bool check)
      : base_(std::move(base)), beta_(std::move(beta)), fiber_(fresh_coordinate(base_.chart(), "t")) {
    require_same_chart(base_.chart(), beta_.chart(), "prequantization");
    if (beta_.degree() != 1) throw ValidationError("the symplectic potential must be a 1-form");
    if (check) {
      auto r = forms_equal(exterior_derivative(beta_), base_.omega());
      if (!r.equal)
        throw ValidationError("d(beta) differs from omega (residual " + std::to_string(r.residual) + ")");
    }
  }

  SymplecticChart base_;
  KForm beta_;
  std::string fiber_;
};

/// zeta = base + fiber * d_{2pi i}, fiber depending on m only.
struct CircleLiftedVF {
  VectorField base;
  Expr fiber;

  static CircleLiftedVF vertical(const Chart& c, Expr coefficient) {
    return {VectorField::zero(c), std::move(coefficient)};
  }

  friend CircleLiftedVF operator+(const CircleLiftedVF& a, const CircleLiftedVF& b) {
    return {a.base + b.base, a.fiber + b.fiber};
  }
  friend CircleLiftedVF operator*(const Expr& s, const CircleLiftedVF& a) { return {s * a.base, s * a.fiber}; }
};

/// s(m, exp(2 pi i t)) = exp(-2 pi i t) u(m).
struct EquivariantSection {
  Expr u;

  /// d_{2pi i} acting on the lifted section: multiplication by -2 pi i.
  [[nodiscard]] EquivariantSection vertical_action() const { return {-two_pi_i() * u}; }
};

/// gamma(zeta) = (1/i hbar) beta(X) + 2 pi i c.
inline Expr gamma_of(const CircleLiftedVF& z, const PrequantCircle& y) {
  return y.gamma_base(z.base) + two_pi_i() * z.fiber;
}

/// L_zeta gamma as a 1-form on M: (1/i hbar) X ⌟ d(beta) + d(gamma(zeta)).
inline KForm lie_derivative_gamma(const CircleLiftedVF& z, const PrequantCircle& y) {
  return inv_i_hbar() * interior_product(z.base, exterior_derivative(y.beta())) +
         exterior_derivative(y.chart(), gamma_of(z, y));
}

inline EqualityResult preserves_gamma(const CircleLiftedVF& z, const PrequantCircle& y) {
  return forms_equal(lie_derivative_gamma(z, y), KForm::zero(y.chart(), 1));
}

/// Fiber coefficient beta(X) / (2 pi hbar) makes gamma vanish.
inline CircleLiftedVF horizontal_lift(const VectorField& x, const PrequantCircle& y) {
  require_same_chart(x.chart(), y.chart(), "horizontal lift");
  return {x, -y.gamma_base(x) * pow(two_pi_i(), Rational(-1))};
}

/// E(f) = horizontal lift of xi_f + f / (2 pi hbar) d_{2pi i}.
inline CircleLiftedVF E_circle(const Expr& f, const PrequantCircle& y) {
  CircleLiftedVF z = horizontal_lift(hamiltonian_vf(f, y.base()), y);
  z.fiber = z.fiber + f * pow(Expr(2) * pi() * hbar(), Rational(-1));
  return z;
}

/// [X1 + c1 d, X2 + c2 d] = [X1, X2] + (X1 c2 - X2 c1) d.
inline CircleLiftedVF bracket_lifted(const CircleLiftedVF& a, const CircleLiftedVF& b) {
  return {lie_bracket(a.base, b.base), a.base.apply(b.fiber) - b.base.apply(a.fiber)};
}

inline EqualityResult lifted_equal(const CircleLiftedVF& a, const CircleLiftedVF& b, const DomainSampler& s) {
  EqualityResult r;
  for (std::size_t k = 0; k < a.base.dimension(); ++k) r.merge(expr_equal(a.base[k], b.base[k], s));
  r.merge(expr_equal(a.fiber, b.fiber, s));
  return r;
}

/// F(zeta) = -i hbar gamma(zeta), defined on gamma-preserving fields.
inline Expr F_circle(const CircleLiftedVF& z, const PrequantCircle& y) {
  auto r = preserves_gamma(z, y);
  if (!r.equal) throw NotAQuantomorphismError("the field does not preserve the connection", r.residual);
  return -(imag_unit() * hbar()) * gamma_of(z, y);
}

/// The field on the total space chart, for the flow oracle.
inline VectorField total_space_field(const CircleLiftedVF& z, const PrequantCircle& y) {
  Chart total = y.total_chart();
  std::vector<Expr> comps = z.base.components();
  comps.push_back(z.fiber);
  return {total, std::move(comps)};
}

/// nabla_X u = X u + (1/i hbar) beta(X) u.
inline EquivariantSection connection_nabla(const VectorField& x, const EquivariantSection& s, const PrequantCircle& y) {
  require_same_chart(x.chart(), y.chart(), "connection");
  return {x.apply(s.u) + y.gamma_base(x) * s.u};
}

/// r(f) = i hbar nabla_{xi_f} + f.
inline EquivariantSection ks_operator(const Expr& f, const EquivariantSection& s, const PrequantCircle& y) {
  return {imag_unit() * hbar() * connection_nabla(hamiltonian_vf(f, y.base()), s, y).u + f * s.u};
}

/// The lifted action i hbar E(f) on the equivariant function
/// exp(-2 pi i t) u, stripped of the exp factor.
inline EquivariantSection lifted_action(const Expr& f, const EquivariantSection& s, const PrequantCircle& y) {
  CircleLiftedVF z = E_circle(f, y);
  return {imag_unit() * hbar() * (z.base.apply(s.u) - two_pi_i() * z.fiber * s.u)};
}

/// [r(f), r(g)] s - i hbar r({f,g}) s.
inline Expr dirac_defect(const Expr& f, const Expr& g, const EquivariantSection& s, const PrequantCircle& y) {
  Expr fg = ks_operator(f, ks_operator(g, s, y), y).u - ks_operator(g, ks_operator(f, s, y), y).u;
  return fg - imag_unit() * hbar() * ks_operator(poisson(f, g, y.base()), s, y).u;
}

/// (nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]) s - (1/i hbar) omega(X,Y) s.
inline Expr curvature_defect(const VectorField& x, const VectorField& w, const EquivariantSection& s,
                             const PrequantCircle& y) {
  Expr lhs = connection_nabla(x, connection_nabla(w, s, y), y).u - connection_nabla(w, connection_nabla(x, s, y), y).u -
             connection_nabla(lie_bracket(x, w), s, y).u;
  return lhs - inv_i_hbar() * evaluate_form(y.base().omega(), x, w) * s.u;
}

}  // namespace gqw
