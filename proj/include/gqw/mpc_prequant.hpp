#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gqw/circle_prequant.hpp"
#include "gqw/mpc_group.hpp"

// Metaplectic-c prequantization on the trivial bundle P = M x Mp^c over a
// two-dimensional Darboux-type chart, gamma = (1/i hbar) beta + 1/2 eta_* theta_0.
// Fiber points are canonical pairs (g, lambda). In local coordinates
// lambda = exp(i phi), 1/2 eta_* theta_0 = i dphi.

namespace gqw {

// ---- 2x2 matrices of expressions ------------------------------------------------

using ExprMat2 = std::array<std::array<Expr, 2>, 2>;

inline ExprMat2 zero_mat2() { return {{{Expr(0), Expr(0)}, {Expr(0), Expr(0)}}}; }

inline ExprMat2 mat2_of(const Mat2& m, std::int64_t den = std::int64_t{1} << 20);

inline ExprMat2 operator+(const ExprMat2& a, const ExprMat2& b) {
  ExprMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}
inline ExprMat2 operator-(const ExprMat2& a, const ExprMat2& b) {
  ExprMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}
inline ExprMat2 operator*(const ExprMat2& a, const ExprMat2& b) {
  ExprMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}
inline ExprMat2 operator*(const Expr& s, const ExprMat2& a) {
  ExprMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = s * a[i][j];
  return r;
}
inline ExprMat2 commutator(const ExprMat2& a, const ExprMat2& b) { return a * b - b * a; }
inline Expr trace(const ExprMat2& a) { return a[0][0] + a[1][1]; }
inline bool is_zero(const ExprMat2& a) {
  return a[0][0].is_zero() && a[0][1].is_zero() && a[1][0].is_zero() && a[1][1].is_zero();
}

inline ExprMat2 apply(const VectorField& x, const ExprMat2& a) {
  ExprMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = x.apply(a[i][j]);
  return r;
}

inline Mat2 evaluate(const ExprMat2& a, const Bindings& b) {
  Mat2 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = evaluate(a[i][j], b).real();
  return m;
}

inline EqualityResult mat2_equal(const ExprMat2& a, const ExprMat2& b, const DomainSampler& s) {
  EqualityResult r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.merge(expr_equal(a[i][j], b[i][j], s));
  return r;
}

/// Nearest rational with the given denominator.
inline Rational approximate(double x, std::int64_t den = std::int64_t{1} << 20) {
  return {static_cast<std::int64_t>(std::llround(x * static_cast<double>(den))), den};
}

inline ExprMat2 mat2_of(const Mat2& m, std::int64_t den) {
  ExprMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = Expr(approximate(m(i, j), den));
  return r;
}

/// Jacobian d(x^i)/d(coordinate j) of a field on a 2-dimensional chart.
inline ExprMat2 jacobian(const VectorField& x) {
  ExprMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = differentiate(x[static_cast<std::size_t>(i)], x.chart().coordinate(j));
  return r;
}

// ---- the bundle ----------------------------------------------------------------

class MpcPrequant {
 public:
  MpcPrequant(SymplecticChart base, KForm beta) : MpcPrequant(std::move(base), std::move(beta), true) {}

  static MpcPrequant unchecked(SymplecticChart base, KForm beta) { return {std::move(base), std::move(beta), false}; }

  /// Punctured plane with omega = dp^dq and beta = 1/2 (p dq - q dp).
  static MpcPrequant punctured_plane(double half_width = 2.0, double inner_radius = 0.1) {
    std::vector<std::string> coords{"p", "q"};
    Expr r2 = pow(symbol("p"), 2) + pow(symbol("q"), 2) - Expr(approximate(inner_radius * inner_radius, 1'000'000));
    Chart c = Chart::box(coords, half_width, {r2});
    return {SymplecticChart(c, parse_form("dp^dq", c)), parse_form("1/2*(p*dq - q*dp)", c)};
  }

  [[nodiscard]] const SymplecticChart& base() const { return base_; }
  [[nodiscard]] const Chart& chart() const { return base_.chart(); }
  [[nodiscard]] const KForm& beta() const { return beta_; }

  /// (1/i hbar) beta(X).
  [[nodiscard]] Expr gamma_base(const VectorField& x) const { return inv_i_hbar() * evaluate_form(beta_, x); }

  /// gamma on the tangent (v_m, dphi) at m, numerically.
  [[nodiscard]] Complex gamma_at(const Bindings& m, const Eigen::Vector2d& v_m, double dphi) const {
    Complex b = evaluate(beta_.coefficients()[0], m) * v_m[0] + evaluate(beta_.coefficients()[1], m) * v_m[1];
    return b / Complex(0.0, m.hbar) + Complex(0.0, dphi);
  }

  /// Names g11, g12, g21, g22 for the frame entries, avoiding base names.
  [[nodiscard]] std::array<std::string, 4> frame_coordinates() const {
    return {fresh_coordinate(chart(), "g11"), fresh_coordinate(chart(), "g12"), fresh_coordinate(chart(), "g21"),
            fresh_coordinate(chart(), "g22")};
  }

  /// Chart (m, g) on which equivariant sections live. The frame entries are
  /// sampled on a box; the operators involved are polynomial in g.
  [[nodiscard]] Chart section_chart() const {
    auto coords = chart().coordinates();
    DomainSampler s = chart().sampler();
    for (const auto& g : frame_coordinates()) {
      coords.push_back(g);
      s = s.extended(g, {-1.5, 1.5});
    }
    return {coords, s};
  }

 private:
  MpcPrequant(SymplecticChart base, KForm beta, bool check) : base_(std::move(base)), beta_(std::move(beta)) {
    if (base_.chart().dimension() != 2)
      throw ValidationError("metaplectic-c prequantization is implemented for two-dimensional charts");
    require_same_chart(base_.chart(), beta_.chart(), "metaplectic-c prequantization");
    if (beta_.degree() != 1) throw ValidationError("the symplectic potential must be a 1-form");
    if (check) {
      auto r = forms_equal(exterior_derivative(beta_), base_.omega());
      if (!r.equal)
        throw ValidationError("d(beta) differs from omega (residual " + std::to_string(r.residual) + ")");
    }
  }

  SymplecticChart base_;
  KForm beta_;
};

// ---- frame bundle lift -----------------------------------------------------------

/// (X, A): base field plus the right-invariant field g -> A(m) g on M x Sp.
struct FrameLiftedVF {
  VectorField base;
  ExprMat2 matrix;
};

/// Lift of the Hamiltonian flow to symplectic frames: A = Jacobian of xi_f.
inline FrameLiftedVF frame_lift(const Expr& f, const SymplecticChart& s) {
  if (s.chart().dimension() != 2) throw ValidationError("frame lifts are implemented for two-dimensional charts");
  VectorField x = hamiltonian_vf(f, s);
  ExprMat2 a = jacobian(x);
  auto tr = max_abs(trace(a), s.chart().sampler());
  if (!tr.equal)
    throw ConventionError("frame lift is not in sp(R^2): trace residual " + std::to_string(tr.residual) +
                          " (symplectic form not constant in this chart?)");
  return {x, a};
}

/// Right-invariant parts bracket with a minus sign: [R(A1), R(A2)] = -R([A1, A2]).
inline FrameLiftedVF bracket_frame(const FrameLiftedVF& a, const FrameLiftedVF& b) {
  return {lie_bracket(a.base, b.base),
          apply(a.base, b.matrix) - apply(b.base, a.matrix) - commutator(a.matrix, b.matrix)};
}

// ---- structured fields on P --------------------------------------------------------

/// zeta = X + R(A_R(m), tau_R(m)) + L(A_L, tau_L): base field, right-invariant
/// fiber part (tangent alpha_R a) and constant left-invariant part (tangent
/// a alpha_L). The tau components are imaginary.
struct StructuredVF {
  VectorField base;
  ExprMat2 right = zero_mat2();
  Expr right_phase;
  ExprMat2 left = zero_mat2();
  Expr left_phase;

  static StructuredVF zero(const Chart& c) { return {VectorField::zero(c)}; }

  /// The left-invariant field of a constant algebra element (flow a -> a exp(t alpha)).
  static StructuredVF left_invariant(const Chart& c, ExprMat2 a, Expr tau) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (!free_symbols(a[i][j]).empty()) throw UnsupportedFieldError("left-invariant part must be constant");
    if (!free_symbols(tau).empty()) throw UnsupportedFieldError("left-invariant part must be constant");
    StructuredVF z = zero(c);
    z.left = a;
    z.left_phase = std::move(tau);
    return z;
  }
  static StructuredVF left_invariant(const Chart& c, const MpcAlgebra& alpha) {
    return left_invariant(c, mat2_of(alpha.A), imag_unit() * Expr(approximate(alpha.tau.imag())));
  }

  /// coefficient * d_{2pi i}: the central generator with gamma(d_{2pi i}) = 2 pi i.
  static StructuredVF central(const Chart& c, const Expr& coefficient) {
    StructuredVF z = zero(c);
    z.right_phase = coefficient * two_pi_i();
    return z;
  }

  friend StructuredVF operator+(const StructuredVF& a, const StructuredVF& b) {
    return {a.base + b.base, a.right + b.right, a.right_phase + b.right_phase, a.left + b.left,
            a.left_phase + b.left_phase};
  }
  friend StructuredVF operator*(const Expr& s, const StructuredVF& a) {
    if (!free_symbols(s).empty() && !(is_zero(a.left) && a.left_phase.is_zero()))
      throw UnsupportedFieldError("a non-constant multiple of a left-invariant field leaves the structured class");
    return {s * a.base, s * a.right, s * a.right_phase, s * a.left, s * a.left_phase};
  }
};

inline EqualityResult structured_equal(const StructuredVF& a, const StructuredVF& b, const DomainSampler& s) {
  EqualityResult r = fields_equal(a.base, b.base);
  r.merge(mat2_equal(a.right, b.right, s));
  r.merge(expr_equal(a.right_phase, b.right_phase, s));
  r.merge(mat2_equal(a.left, b.left, s));
  r.merge(expr_equal(a.left_phase, b.left_phase, s));
  return r;
}

/// Closed-form bracket on the structured class:
///   base   [X1, X2]
///   right  X1(A2) - X2(A1) - [A1, A2],   X1(tau2) - X2(tau1)
///   left   [B1, B2],                      0
/// Right- and left-invariant parts commute.
inline StructuredVF structured_bracket(const StructuredVF& a, const StructuredVF& b) {
  StructuredVF r;
  r.base = lie_bracket(a.base, b.base);
  r.right = apply(a.base, b.right) - apply(b.base, a.right) - commutator(a.right, b.right);
  r.right_phase = a.base.apply(b.right_phase) - b.base.apply(a.right_phase);
  r.left = commutator(a.left, b.left);
  r.left_phase = Expr(0);
  if (!trace(r.right).is_zero() && !max_abs(trace(r.right), a.base.chart().sampler()).equal)
    throw UnsupportedFieldError("bracket left the structured class (right part not traceless)");
  return r;
}

/// gamma(zeta) = (1/i hbar) beta(X) + tau_R + tau_L, using eta o Ad = eta.
inline Expr gamma_of(const StructuredVF& z, const MpcPrequant& p) {
  return p.gamma_base(z.base) + z.right_phase + z.left_phase;
}

/// L_zeta gamma = zeta ⌟ dgamma + d(gamma(zeta)) with dgamma = (1/i hbar) Pi^* d(beta).
inline KForm lie_derivative_gamma(const StructuredVF& z, const MpcPrequant& p) {
  return inv_i_hbar() * interior_product(z.base, exterior_derivative(p.beta())) +
         exterior_derivative(p.chart(), gamma_of(z, p));
}

/// dgamma(z1, z2) = z1(gamma(z2)) - z2(gamma(z1)) - gamma([z1, z2]).
inline Expr dgamma(const StructuredVF& a, const StructuredVF& b, const MpcPrequant& p) {
  return a.base.apply(gamma_of(b, p)) - b.base.apply(gamma_of(a, p)) - gamma_of(structured_bracket(a, b), p);
}

/// Horizontal lift of the frame lift: tau_R = -(1/i hbar) beta(xi_f).
inline StructuredVF hat_lift(const Expr& f, const MpcPrequant& p) {
  FrameLiftedVF fl = frame_lift(f, p.base());
  StructuredVF z = StructuredVF::zero(p.chart());
  z.base = fl.base;
  z.right = fl.matrix;
  z.right_phase = -p.gamma_base(fl.base);
  return z;
}

/// E(f) = hat_lift(f) + f / (2 pi hbar) d_{2pi i}.
inline StructuredVF E_mpc(const Expr& f, const MpcPrequant& p) {
  return hat_lift(f, p) + StructuredVF::central(p.chart(), f * pow(Expr(2) * pi() * hbar(), Rational(-1)));
}

struct MembershipReport {
  EqualityResult preserves_gamma;  // (i) L_zeta gamma = 0
  EqualityResult frame_condition;  // (ii) Sigma_* zeta = frame lift of Pi_* zeta
  [[nodiscard]] bool passes() const { return preserves_gamma.equal && frame_condition.equal; }
  [[nodiscard]] double residual() const { return std::max(preserves_gamma.residual, frame_condition.residual); }
};

/// (ii) in the trivialization: A_L = 0 and A_R = Jacobian of the base field.
inline MembershipReport quantomorphism_membership(const StructuredVF& z, const MpcPrequant& p) {
  MembershipReport r;
  r.preserves_gamma = forms_equal(lie_derivative_gamma(z, p), KForm::zero(p.chart(), 1));
  r.frame_condition = mat2_equal(z.right, jacobian(z.base), p.chart().sampler());
  r.frame_condition.merge(mat2_equal(z.left, zero_mat2(), p.chart().sampler()));
  return r;
}

enum class Membership { Full, GammaOnly };

/// F(zeta) = -i hbar gamma(zeta). `GammaOnly` drops condition (ii); it exists
/// to show that E o F then fails to be the identity.
inline Expr F_mpc(const StructuredVF& z, const MpcPrequant& p, Membership check = Membership::Full) {
  MembershipReport r = quantomorphism_membership(z, p);
  if (!r.preserves_gamma.equal)
    throw NotAQuantomorphismError("the field does not preserve gamma", r.preserves_gamma.residual);
  if (check == Membership::Full && !r.frame_condition.equal)
    throw NotAQuantomorphismError("the field does not cover the frame lift of its projection",
                                  r.frame_condition.residual);
  return -(imag_unit() * hbar()) * gamma_of(z, p);
}

// ---- sections and the delta operator ------------------------------------------------

/// zeta acting on s(m, (g, lambda)) = lambda^{-1} u(m, g):
///   X u + sum_ij (A_R g + g A_L)_ij du/dg_ij - (tau_R + tau_L) u.
inline Expr apply_structured(const StructuredVF& z, const Expr& u, const MpcPrequant& p) {
  auto names = p.frame_coordinates();
  ExprMat2 g{{{symbol(names[0]), symbol(names[1])}, {symbol(names[2]), symbol(names[3])}}};
  ExprMat2 v = z.right * g + g * z.left;
  std::vector<Expr> terms{z.base.apply(u)};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!v[i][j].is_zero()) terms.push_back(v[i][j] * differentiate(u, names[static_cast<std::size_t>(2 * i + j)]));
  terms.push_back(-(z.right_phase + z.left_phase) * u);
  return add(std::move(terms));
}

/// delta_f u = xi_hat_f u + (1/i hbar) f u.
inline Expr delta_operator(const Expr& f, const Expr& u, const MpcPrequant& p) {
  return apply_structured(hat_lift(f, p), u, p) + inv_i_hbar() * f * u;
}

/// [delta_f, delta_g] u - delta_{f,g} u.
inline Expr delta_defect(const Expr& f, const Expr& g, const Expr& u, const MpcPrequant& p) {
  Expr fg = delta_operator(f, delta_operator(g, u, p), p) - delta_operator(g, delta_operator(f, u, p), p);
  return fg - delta_operator(poisson(f, g, p.base()), u, p);
}

// ---- numeric realization on M x Mp^c -------------------------------------------------

/// Point (p, q, g11, g12, g21, g22, phi) of the local product chart.
inline Eigen::VectorXd bundle_point(const Eigen::Vector2d& m, const MpcElement& a) {
  Eigen::VectorXd x(7);
  const Mat2& g = a.g.matrix();
  x << m[0], m[1], g(0, 0), g(0, 1), g(1, 0), g(1, 1), std::arg(a.lambda);
  return x;
}

/// The structured field as an ODE right-hand side in product coordinates:
/// dg = A_R g + g A_L, dphi = (tau_R + tau_L) / i.
class StructuredFlowField {
 public:
  StructuredFlowField(StructuredVF z, const MpcPrequant& p, double hbar_value = 1.0)
      : z_(std::move(z)), chart_(p.chart()), hbar_(hbar_value) {
    Bindings none;
    none.hbar = hbar_;
    left_ = evaluate(z_.left, none);
    left_phase_ = evaluate(z_.left_phase, none);
  }

  [[nodiscard]] Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    Bindings b;
    b.hbar = hbar_;
    b.set(chart_.coordinate(0), x[0]);
    b.set(chart_.coordinate(1), x[1]);
    Mat2 g;
    g << x[2], x[3], x[4], x[5];
    Mat2 dg = evaluate(z_.right, b) * g + g * left_;
    Complex tau = evaluate(z_.right_phase, b) + left_phase_;
    Eigen::VectorXd out(7);
    out << evaluate(z_.base[0], b).real(), evaluate(z_.base[1], b).real(), dg(0, 0), dg(0, 1), dg(1, 0), dg(1, 1),
        (tau / Complex(0.0, 1.0)).real();
    return out;
  }

 private:
  StructuredVF z_;
  Chart chart_;
  double hbar_;
  Mat2 left_;
  Complex left_phase_;
};

/// The bracket [a, b] at x from the extrapolated flow commutator.
inline Eigen::VectorXd structured_bracket_oracle(const StructuredVF& a, const StructuredVF& b, const MpcPrequant& p,
                                                 const Eigen::VectorXd& x, double t = 1e-3, double hbar_value = 1.0) {
  return flow_commutator_extrapolated(StructuredFlowField(a, p, hbar_value), StructuredFlowField(b, p, hbar_value), x,
                                      t);
}

/// Tangent of a curve s -> (m(s), a(s)) at s = 0 in the coordinates
/// (v_m, dphi), by central differences. The phase difference is taken as a
/// ratio so that the representative's sign convention cannot leak in unless
/// it actually jumps inside the stencil.
struct BundleTangent {
  Eigen::Vector2d v_m;
  double dphi;
};

inline BundleTangent curve_tangent(const std::function<std::pair<Eigen::Vector2d, MpcElement>(double)>& curve,
                                   double h) {
  auto [mp, ap] = curve(h);
  auto [mm, am] = curve(-h);
  return {(mp - mm) / (2 * h), std::arg(ap.lambda / am.lambda) / (2 * h)};
}

/// gamma evaluated on the tangent of a curve; the base point is curve(0).
inline Complex gamma_on_curve(const MpcPrequant& p,
                              const std::function<std::pair<Eigen::Vector2d, MpcElement>(double)>& curve, double h,
                              double hbar_value = 1.0) {
  auto [m0, a0] = curve(0.0);
  Bindings b;
  b.hbar = hbar_value;
  b.set(p.chart().coordinate(0), m0[0]);
  b.set(p.chart().coordinate(1), m0[1]);
  BundleTangent t = curve_tangent(curve, h);
  return p.gamma_at(b, t.v_m, t.dphi);
}

inline Eigen::Vector2d base_point(const Chart& c, const Bindings& b) {
  return {b.values.at(c.coordinate(0)).real(), b.values.at(c.coordinate(1)).real()};
}

// ---- the three defining conditions ---------------------------------------------------

struct PrequantConditionReport {
  double right_invariance = 0.0;     // (1) R_b^* gamma = gamma, max residual over samples
  double vertical_normalization = 0.0;  // (2) gamma(d_alpha) = 1/2 eta_* alpha
  EqualityResult curvature;          // (3) dgamma = (1/i hbar) Pi^* omega on structured fields
  int n_samples = 0;
};

/// Conditions (1) and (2) are checked numerically on random tangents and
/// group elements; (3) symbolically on pairs of structured fields.
inline PrequantConditionReport check_prequant_conditions(const MpcPrequant& p, std::uint64_t seed = 42,
                                                         int samples = 8, double h = 1e-6) {
  PrequantConditionReport rep;
  std::mt19937_64 rng(seed);
  const DomainSampler s = p.chart().sampler().with_seed(seed).with_samples(samples);
  auto pts = s.points();
  rep.n_samples = samples;
  for (const auto& pt : pts) {
    Eigen::Vector2d m = base_point(p.chart(), pt);
    Eigen::Vector2d v(2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1);
    MpcElement a = random_mpc(rng);
    MpcElement b = random_mpc(rng);
    MpcAlgebra alpha = random_algebra(rng);
    auto curve = [&](double t) { return std::pair{Eigen::Vector2d(m + t * v), mpc_mul(a, exp_mpc(alpha, t))}; };
    auto moved = [&](double t) {
      auto [mt, at] = curve(t);
      return std::pair{mt, mpc_mul(at, b)};
    };
    rep.right_invariance =
        std::max(rep.right_invariance, std::abs(gamma_on_curve(p, moved, h, pt.hbar) - gamma_on_curve(p, curve, h, pt.hbar)));
    auto vertical = [&](double t) { return std::pair{m, mpc_mul(a, exp_mpc(alpha, t))}; };
    rep.vertical_normalization =
        std::max(rep.vertical_normalization, std::abs(gamma_on_curve(p, vertical, h, pt.hbar) - alpha.tau));
  }
  // (3) on a family spanning base, right-invariant, left-invariant and central directions.
  const Chart& c = p.chart();
  std::vector<StructuredVF> fields{
      E_mpc(c.parse(c.coordinate(0)), p),
      E_mpc(c.parse(c.coordinate(0) + "*" + c.coordinate(1)), p),
      hat_lift(c.parse(c.coordinate(0) + "^2 + " + c.coordinate(1) + "^2"), p),
      StructuredVF::left_invariant(c, random_algebra(rng)),
      StructuredVF::left_invariant(c, random_algebra(rng)),
      StructuredVF::central(c, Expr(1)),
  };
  for (std::size_t i = 0; i < fields.size(); ++i) {
    for (std::size_t j = i + 1; j < fields.size(); ++j) {
      Expr expected = inv_i_hbar() * evaluate_form(p.base().omega(), fields[i].base, fields[j].base);
      rep.curvature.merge(expr_equal(dgamma(fields[i], fields[j], p), expected, s));
    }
  }
  return rep;
}

// ---- bundle maps and the two examples -----------------------------------------------

/// K(m, a) = (base(m), fiber(m, a)).
struct BundleMap {
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> base;
  std::function<MpcElement(const Eigen::Vector2d&, const MpcElement&)> fiber;

  [[nodiscard]] std::pair<Eigen::Vector2d, MpcElement> operator()(const Eigen::Vector2d& m, const MpcElement& a) const {
    return {base(m), fiber(m, a)};
  }
};

/// F[h, exp(2 pi i t)] = [h mu(2t), exp(2 pi i t)], on canonical pairs.
inline MpcElement fiber_map_A1(const MpcElement& a) {
  const double t = std::arg(a.lambda) / (2 * kPi);
  return MpcElement::from_mp(mp_mul(MpElement{a.g, 0}, mu_loop(2 * t)), a.lambda);
}

inline BundleMap example_A1_map() {
  return {[](const Eigen::Vector2d& m) { return m; },
          [](const Eigen::Vector2d&, const MpcElement& a) { return fiber_map_A1(a); }};
}

struct ExampleA1Report {
  double gamma_residual = 0.0;     // max |gamma(K_* v) - gamma(v)|
  double step_halving_change = 0.0;  // same residual's change when h is halved
  double eta_residual = 0.0;       // max |eta(F(a)) - eta(a)|
  double sp_spread = 0.0;          // max Sp distance between values of Sigma o K on one fiber
  int distinct_fiber_values = 0;
  double t0_vs_eighth = 0.0;       // distance between the images of t = 0 and t = 1/8
  int n_samples = 0;
  [[nodiscard]] bool gamma_preserved(double tol = 1e-6) const { return gamma_residual <= tol; }
  [[nodiscard]] bool fiber_image_nonconstant(double min_spread = 0.5) const {
    return distinct_fiber_values >= 2 && sp_spread >= min_spread;
  }
};

inline ExampleA1Report example_A1(const MpcPrequant& p, std::uint64_t seed = 42, int samples = 8,
                                  double h = 1e-6) {
  ExampleA1Report rep;
  rep.n_samples = samples;
  BundleMap k = example_A1_map();
  std::mt19937_64 rng(seed);
  auto pts = p.chart().sampler().with_seed(seed).with_samples(samples).points();
  auto residual_at = [&](const Eigen::Vector2d& m, const Eigen::Vector2d& v, const MpcElement& a,
                         const MpcAlgebra& alpha, double step, double hbar_value) {
    auto curve = [&](double t) { return std::pair{Eigen::Vector2d(m + t * v), mpc_mul(a, exp_mpc(alpha, t))}; };
    auto pushed = [&](double t) {
      auto [mt, at] = curve(t);
      return k(mt, at);
    };
    return std::abs(gamma_on_curve(p, pushed, step, hbar_value) - gamma_on_curve(p, curve, step, hbar_value));
  };
  for (const auto& pt : pts) {
    Eigen::Vector2d m = base_point(p.chart(), pt);
    Eigen::Vector2d v(2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1);
    MpcElement a = random_mpc(rng);
    MpcAlgebra alpha = random_algebra(rng);
    const double r1 = residual_at(m, v, a, alpha, h, pt.hbar);
    const double r2 = residual_at(m, v, a, alpha, h / 2, pt.hbar);
    rep.gamma_residual = std::max({rep.gamma_residual, r1, r2});
    rep.step_halving_change = std::max(rep.step_halving_change, std::abs(r1 - r2));
    rep.eta_residual = std::max(rep.eta_residual, std::abs(eta(fiber_map_A1(a)) - eta(a)));
  }
  // Sigma o K along the fiber over one point, at h = (g, sheet 0), t = j/8.
  SpElement g = random_sp(rng);
  std::vector<SpElement> values;
  for (int j = 0; j < 8; ++j) {
    MpcElement a{g, std::polar(1.0, 2 * kPi * j / 8.0)};
    values.push_back(sigma(fiber_map_A1(a)));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    bool fresh = true;
    for (std::size_t j = 0; j < i; ++j) {
      const double d = distance(values[i], values[j]);
      rep.sp_spread = std::max(rep.sp_spread, d);
      if (d <= 1e-6) fresh = false;
    }
    if (fresh) ++rep.distinct_fiber_values;
  }
  rep.t0_vs_eighth = distance(values[0], values[1]);
  return rep;
}

/// Rotation T(m) = R(angle) m as a chart map on the base.
inline ChartMap rotation_map(const Chart& c, const Expr& angle) {
  Expr x = c.coordinate_symbol(0);
  Expr y = c.coordinate_symbol(1);
  return {c, c, {cos(angle) * x - sin(angle) * y, sin(angle) * x + cos(angle) * y}};
}

struct ExampleA2Report {
  EqualityResult beta_invariance;   // T^* beta = beta, hence K^* gamma = gamma
  EqualityResult omega_invariance;  // T^* omega = omega
  double equivariance_residual = 0.0;
  double frame_difference = 0.0;    // |K'(m, I) - K~''(m, I)|_F on the fiber
  double condition2_residual = 0.0; // max over samples of |g - DT g|_F
  int n_samples = 0;
  [[nodiscard]] bool condition1(double) const { return beta_invariance.equal; }
  [[nodiscard]] bool condition2(double tol) const { return condition2_residual <= tol; }
};

/// The angle's value; a multiple of 2 pi would make T the identity.
inline double require_rotation_angle(const Expr& angle) {
  if (!free_symbols(angle).empty()) throw DegenerateParameterError("rotation angle must be a constant");
  const double theta = evaluate(angle, Bindings{}).real();
  if (std::abs(std::remainder(theta, 2 * kPi)) <= 1e-12)
    throw DegenerateParameterError("rotation angle is a multiple of 2 pi");
  return theta;
}

/// K(m, a) = (T m, a) for the rotation T by `angle`.
inline ExampleA2Report example_A2(const Expr& angle, const MpcPrequant& p, std::uint64_t seed = 42, int samples = 8) {
  const double theta = require_rotation_angle(angle);

  ExampleA2Report rep;
  rep.n_samples = samples;
  ChartMap t = rotation_map(p.chart(), angle);
  rep.beta_invariance = forms_equal(pullback(t, p.beta()), p.beta());
  rep.omega_invariance = forms_equal(pullback(t, p.base().omega()), p.base().omega());

  const SpElement r = SpElement::rotation(theta);
  BundleMap k{[r](const Eigen::Vector2d& m) { return Eigen::Vector2d(r.matrix() * m); },
              [](const Eigen::Vector2d&, const MpcElement& a) { return a; }};
  std::mt19937_64 rng(seed);
  auto pts = p.chart().sampler().with_seed(seed).with_samples(samples).points();
  auto jac = t.jacobian();
  for (const auto& pt : pts) {
    Eigen::Vector2d m = base_point(p.chart(), pt);
    MpcElement a = random_mpc(rng);
    MpcElement b = random_mpc(rng);
    auto lhs = k(m, mpc_mul(a, b));
    auto [km, ka] = k(m, a);
    rep.equivariance_residual =
        std::max(rep.equivariance_residual, (lhs.first - km).norm() + distance(lhs.second, mpc_mul(ka, b)));
    // K' acts on frames as the identity on the fiber; K~'' pushes frames by DT.
    Mat2 dt;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) dt(i, j) = evaluate(jac[i][j], pt).real();
    const Mat2 g = sigma(a).matrix();
    rep.condition2_residual = std::max(rep.condition2_residual, (g - dt * g).norm());
  }
  rep.frame_difference = (Mat2::Identity() - r.matrix()).norm();
  return rep;
}

}  // namespace gqw
