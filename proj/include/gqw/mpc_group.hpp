#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <sstream>

#include "gqw/cas/sampler.hpp"
#include "gqw/errors.hpp"

// Sp(R^2) = SL(2,R), its double cover Mp and Mp^c = Mp x_{Z2} U(1).
//
// Mp is modelled by sheets over Sp glued with the cocycle kappa, which
// comes from the factor of automorphy j(g, tau) = c tau + d at tau = i.
// Sheet 0 of g corresponds to the principal square root of j(g, i).

namespace gqw {

using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = std::numbers::pi;

class SpElement {
 public:
  SpElement() : m_(Mat2::Identity()) {}
  explicit SpElement(const Mat2& m) : m_(m) {
    const double det = m_.determinant();
    if (!(std::abs(det - 1.0) <= 1e-9)) {
      std::ostringstream msg;
      msg << "matrix is not in SL(2,R): det = " << det;
      throw ValidationError(msg.str());
    }
    m_ /= std::sqrt(det);
  }

  static SpElement identity() { return {}; }
  static SpElement rotation(double theta) {
    Mat2 r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return SpElement(r);
  }

  [[nodiscard]] const Mat2& matrix() const { return m_; }
  [[nodiscard]] SpElement inverse() const {
    Mat2 inv;
    inv << m_(1, 1), -m_(0, 1), -m_(1, 0), m_(0, 0);
    return SpElement(inv);
  }

  friend SpElement operator*(const SpElement& a, const SpElement& b) { return SpElement(a.m_ * b.m_); }

 private:
  Mat2 m_;
};

inline double distance(const SpElement& a, const SpElement& b) { return (a.matrix() - b.matrix()).norm(); }

/// g . tau = (a tau + b) / (c tau + d).
inline Complex mobius(const Mat2& g, Complex tau) { return (g(0, 0) * tau + g(0, 1)) / (g(1, 0) * tau + g(1, 1)); }

/// Principal argument, in (-pi, pi], of c tau + d.
inline double automorphy_arg(const Mat2& g, Complex tau = {0.0, 1.0}) {
  Complex j = g(1, 0) * tau + g(1, 1);
  double im = j.imag();
  if (im == 0.0) im = 0.0;  // -0 would put the negative real axis at -pi
  return std::atan2(im, j.real());
}

/// Angle-wrapping defect (w(g1, g2.i) + w(g2, i) - w(g1 g2, i)) / 2 pi.
inline int kappa(const SpElement& g1, const SpElement& g2) {
  const Complex i0{0.0, 1.0};
  const double w = automorphy_arg(g1.matrix(), mobius(g2.matrix(), i0)) + automorphy_arg(g2.matrix(), i0) -
                   automorphy_arg((g1 * g2).matrix(), i0);
  return static_cast<int>(std::lround(w / (2 * kPi)));
}

struct MpElement {
  SpElement g;
  int sheet = 0;

  static MpElement identity() { return {}; }
  /// The nontrivial element over the identity.
  static MpElement deck() { return {SpElement(), 1}; }
};

inline int parity(int k) { return ((k % 2) + 2) % 2; }

inline MpElement mp_mul(const MpElement& a, const MpElement& b) {
  return {a.g * b.g, parity(a.sheet + b.sheet + kappa(a.g, b.g))};
}

inline MpElement mp_inv(const MpElement& a) {
  SpElement gi = a.g.inverse();
  return {gi, parity(a.sheet + kappa(a.g, gi))};
}

inline bool same_mp(const MpElement& a, const MpElement& b, double tol = 1e-9) {
  return a.sheet == b.sheet && distance(a.g, b.g) <= tol;
}

/// [(g, 0), lambda], the canonical representative of its class in Mp^c.
struct MpcElement {
  SpElement g;
  Complex lambda{1.0, 0.0};

  MpcElement() = default;
  MpcElement(SpElement g_, Complex lambda_) : g(std::move(g_)), lambda(lambda_) {
    const double r = std::abs(lambda);
    if (!(std::abs(r - 1.0) <= 1e-9)) throw ValidationError("Mp^c phase must have modulus 1");
    lambda /= r;
  }

  static MpcElement identity() { return {}; }
  static MpcElement central(Complex lambda) { return {SpElement(), lambda}; }
  /// [(g, s), lambda] ~ [(g, 0), (-1)^s lambda].
  static MpcElement from_mp(const MpElement& m, Complex lambda) {
    return {m.g, m.sheet ? -lambda : lambda};
  }
};

inline MpcElement mpc_mul(const MpcElement& a, const MpcElement& b) {
  const int k = kappa(a.g, b.g);
  return {a.g * b.g, a.lambda * b.lambda * (parity(k) ? -1.0 : 1.0)};
}

inline MpcElement mpc_inv(const MpcElement& a) {
  SpElement gi = a.g.inverse();
  return {gi, std::conj(a.lambda) * (parity(kappa(a.g, gi)) ? -1.0 : 1.0)};
}

inline double distance(const MpcElement& a, const MpcElement& b) {
  return distance(a.g, b.g) + std::abs(a.lambda - b.lambda);
}

inline SpElement sigma(const MpcElement& a) { return a.g; }
inline Complex eta(const MpcElement& a) { return a.lambda * a.lambda; }

/// Element (A, tau) of sp(R^2) + u(1): A traceless, tau imaginary.
struct MpcAlgebra {
  Mat2 A = Mat2::Zero();
  Complex tau{0.0, 0.0};

  MpcAlgebra() = default;
  MpcAlgebra(const Mat2& a, Complex t) : A(a), tau(t) {
    if (std::abs(A.trace()) > 1e-12) throw ValidationError("sp(R^2) element must be traceless");
    if (std::abs(tau.real()) > 1e-12) throw ValidationError("u(1) component must be imaginary");
  }

  static Mat2 rotation_generator() {
    Mat2 j;
    j << 0.0, -1.0, 1.0, 0.0;
    return j;
  }
};

/// Matrix exponential by scaling and squaring with a Taylor series.
template <typename M>
M expm(const M& a) {
  const double norm = a.template lpNorm<Eigen::Infinity>();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const M x = a / std::ldexp(1.0, squarings);
  M term = M::Identity(a.rows(), a.cols());
  M sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
    if (term.template lpNorm<Eigen::Infinity>() <= 1e-17 * sum.template lpNorm<Eigen::Infinity>()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Continuous lift of a path in Sp, starting at `start` (whose g must be
/// path(0)). The square root of j(path(s), i) is followed by unwrapping its
/// argument step by step; the sheet of the endpoint is read off from the
/// accumulated winding.
inline MpElement lift_path(const std::function<Mat2(double)>& path, const MpElement& start, int steps = 64) {
  if (distance(start.g, SpElement(path(0.0))) > 1e-9) throw ValidationError("path does not start at the lift's base");
  constexpr int kMaxSteps = 1 << 20;
  for (int n = std::max(steps, 1); n <= kMaxSteps; n *= 2) {
    double prev = automorphy_arg(path(0.0));
    double winding = prev + 2 * kPi * start.sheet;
    bool smooth = true;
    for (int k = 1; k <= n && smooth; ++k) {
      const double w = automorphy_arg(path(static_cast<double>(k) / n));
      double dw = w - prev;
      dw -= 2 * kPi * std::round(dw / (2 * kPi));
      if (std::abs(dw) > kPi / 4) smooth = false;
      winding += dw;
      prev = w;
    }
    if (!smooth) continue;
    SpElement end(path(1.0));
    const long k = std::lround((winding - automorphy_arg(end.matrix())) / (2 * kPi));
    return {end, parity(static_cast<int>(k % 2))};
  }
  throw NumericError("path lifting did not converge under step subdivision");
}

inline int default_steps(const Mat2& a, double t) {
  return std::max(16, static_cast<int>(std::ceil(64.0 * (a * t).norm())));
}

/// exp(tA) lifted to Mp along s -> exp(s t A).
inline MpElement exp_mp(const Mat2& a, double t) {
  try {
    return lift_path([&](double s) { return Mat2(expm(Mat2(a * (s * t)))); }, MpElement::identity(),
                     default_steps(a, t));
  } catch (const NumericError&) {
    std::ostringstream msg;
    msg << "exp_mpc failed to converge at t = " << t << " for A = [" << a(0, 0) << ' ' << a(0, 1) << "; " << a(1, 0)
        << ' ' << a(1, 1) << ']';
    throw NumericError(msg.str());
  }
}

inline MpcElement exp_mpc(const MpcAlgebra& alpha, double t) {
  return MpcElement::from_mp(exp_mp(alpha.A, t), std::exp(alpha.tau * t));
}

/// mu(t): the lift of s -> R(4 pi s) over [0, t], starting at (I, 0).
inline MpElement mu_loop(double t) {
  const int steps = std::max(16, static_cast<int>(std::ceil(64.0 * 4 * kPi * std::abs(t))));
  return lift_path([t](double s) { return SpElement::rotation(4 * kPi * s * t).matrix(); }, MpElement::identity(),
                   steps);
}

/// Random element g = R(theta) exp(S), S symmetric traceless; covers SL(2,R)
/// through the Cartan decomposition.
template <typename Rng>
SpElement random_sp(Rng& rng, double spread = 1.0) {
  const double theta = kPi * (2 * uniform01(rng) - 1);
  const double a = spread * (2 * uniform01(rng) - 1);
  const double b = spread * (2 * uniform01(rng) - 1);
  Mat2 s;
  s << a, b, b, -a;
  return SpElement::rotation(theta) * SpElement(expm(s));
}

template <typename Rng>
MpcElement random_mpc(Rng& rng) {
  SpElement g = random_sp(rng);
  return {g, std::polar(1.0, 2 * kPi * uniform01(rng))};
}

template <typename Rng>
MpcAlgebra random_algebra(Rng& rng, double spread = 1.0) {
  Mat2 a;
  const double x = spread * (2 * uniform01(rng) - 1);
  a << x, spread * (2 * uniform01(rng) - 1), spread * (2 * uniform01(rng) - 1), -x;
  return {a, Complex(0.0, spread * (2 * uniform01(rng) - 1))};
}

}  // namespace gqw
