#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "gqw/exterior/tensors.hpp"

// Numeric flows of vector fields. Used as independent oracles for the
// symbolic bracket and Lie derivative.

namespace gqw {

inline Bindings bind_point(const Chart& c, const Eigen::VectorXd& x, double hbar_value = 1.0) {
  Bindings b;
  b.hbar = hbar_value;
  for (std::size_t k = 0; k < c.dimension(); ++k) b.set(c.coordinate(k), x[static_cast<Eigen::Index>(k)]);
  return b;
}

inline Eigen::VectorXd point_of(const Chart& c, const Bindings& b) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(c.dimension()));
  for (std::size_t k = 0; k < c.dimension(); ++k) x[static_cast<Eigen::Index>(k)] = b.values.at(c.coordinate(k)).real();
  return x;
}

/// Real vector field with its symbolic Jacobian, evaluated numerically.
class NumericField {
 public:
  explicit NumericField(const VectorField& v, double hbar_value = 1.0) : chart_(v.chart()), hbar_(hbar_value) {
    components_ = v.components();
    for (const auto& c : components_) {
      std::vector<Expr> row;
      for (const auto& s : chart_.coordinates()) row.push_back(differentiate(c, s));
      jacobian_.push_back(std::move(row));
    }
  }

  [[nodiscard]] Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    Bindings b = bind_point(chart_, x, hbar_);
    Eigen::VectorXd out(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) out[k] = evaluate(components_[static_cast<std::size_t>(k)], b).real();
    return out;
  }

  [[nodiscard]] Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    Bindings b = bind_point(chart_, x, hbar_);
    const auto n = x.size();
    Eigen::MatrixXd J(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        J(i, j) = evaluate(jacobian_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], b).real();
    return J;
  }

 private:
  Chart chart_;
  double hbar_;
  std::vector<Expr> components_;
  std::vector<std::vector<Expr>> jacobian_;
};

/// Time-t flow by classical RK4. `Field` maps a point to a tangent vector.
template <typename Field>
Eigen::VectorXd flow(const Field& f, Eigen::VectorXd x, double t, int steps = 4) {
  const double h = t / steps;
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXd k1 = f(x);
    Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
    Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
    Eigen::VectorXd k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

/// Flow together with its derivative D(phi_t), integrating the variational
/// equation J' = Dv(x) J alongside x.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> flow_with_jacobian(const NumericField& f, Eigen::VectorXd x,
                                                                      double t, int steps = 4) {
  const double h = t / steps;
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(x.size(), x.size());
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXd k1 = f(x);
    Eigen::MatrixXd m1 = f.jacobian(x) * J;
    Eigen::VectorXd x2 = x + 0.5 * h * k1;
    Eigen::MatrixXd J2 = J + 0.5 * h * m1;
    Eigen::VectorXd k2 = f(x2);
    Eigen::MatrixXd m2 = f.jacobian(x2) * J2;
    Eigen::VectorXd x3 = x + 0.5 * h * k2;
    Eigen::MatrixXd J3 = J + 0.5 * h * m2;
    Eigen::VectorXd k3 = f(x3);
    Eigen::MatrixXd m3 = f.jacobian(x3) * J3;
    Eigen::VectorXd x4 = x + h * k3;
    Eigen::MatrixXd J4 = J + h * m3;
    Eigen::VectorXd k4 = f(x4);
    Eigen::MatrixXd m4 = f.jacobian(x4) * J4;
    x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    J += h / 6.0 * (m1 + 2 * m2 + 2 * m3 + m4);
  }
  return {x, J};
}

/// [u, v](x) from the flow commutator phi^v_{-t} phi^u_{-t} phi^v_t phi^u_t,
/// averaged over +t and -t to cancel the cubic term.
template <typename Field>
Eigen::VectorXd flow_commutator(const Field& u, const Field& v, const Eigen::VectorXd& x, double t = 1e-3) {
  auto once = [&](double s) {
    Eigen::VectorXd y = flow(u, x, s);
    y = flow(v, y, s);
    y = flow(u, y, -s);
    y = flow(v, y, -s);
    return Eigen::VectorXd((y - x) / (s * s));
  };
  return 0.5 * (once(t) + once(-t));
}

/// flow_commutator with one Richardson step, cancelling the t^2 term.
template <typename Field>
Eigen::VectorXd flow_commutator_extrapolated(const Field& u, const Field& v, const Eigen::VectorXd& x,
                                             double t = 1e-3) {
  return (4.0 * flow_commutator(u, v, x, t / 2) - flow_commutator(u, v, x, t)) / 3.0;
}

/// Coefficients of (phi^* a) at x for a map with value y = phi(x) and
/// derivative D. Degrees 0..2.
inline std::vector<double> pullback_at(const KForm& a, const Eigen::VectorXd& y, const Eigen::MatrixXd& D,
                                       double hbar_value = 1.0) {
  Bindings b = bind_point(a.chart(), y, hbar_value);
  auto idx = a.indices();
  std::vector<double> coeff;
  for (const auto& c : a.coefficients()) coeff.push_back(evaluate(c, b).real());
  std::vector<double> out;
  for (const auto& I : idx) {
    double s = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto& J = idx[k];
      double minor = 1.0;
      if (J.size() == 1) minor = D(J[0], I[0]);
      if (J.size() == 2) minor = D(J[0], I[0]) * D(J[1], I[1]) - D(J[0], I[1]) * D(J[1], I[0]);
      if (J.size() > 2) throw UnsupportedDegreeError("numeric pullback is limited to degree 2");
      s += coeff[k] * minor;
    }
    out.push_back(s);
  }
  return out;
}

/// L_v a at x as d/dt (phi_t^* a) by a central difference in t.
inline std::vector<double> flow_lie_derivative(const VectorField& v, const KForm& a, const Eigen::VectorXd& x,
                                               double h = 1e-4) {
  NumericField f(v);
  auto [yp, Dp] = flow_with_jacobian(f, x, h, 1);
  auto [ym, Dm] = flow_with_jacobian(f, x, -h, 1);
  auto plus = pullback_at(a, yp, Dp);
  auto minus = pullback_at(a, ym, Dm);
  std::vector<double> out;
  for (std::size_t k = 0; k < plus.size(); ++k) out.push_back((plus[k] - minus[k]) / (2 * h));
  return out;
}

}  // namespace gqw
