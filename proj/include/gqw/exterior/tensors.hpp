#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gqw/exterior/chart.hpp"

namespace gqw {

using MultiIndex = std::vector<int>;

/// Strictly increasing multi-indices of length k over {0..n-1}, in
/// lexicographic order.
inline std::vector<MultiIndex> multi_indices(std::size_t n, std::size_t k) {
  std::vector<MultiIndex> out;
  MultiIndex cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < static_cast<int>(n); ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

/// Sorts `idx` in place and returns the permutation sign, or 0 on a repeat.
inline int sort_with_sign(MultiIndex& idx) {
  int sign = 1;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j + 1 < idx.size() - i; ++j) {
      if (idx[j] == idx[j + 1]) return 0;
      if (idx[j] > idx[j + 1]) {
        std::swap(idx[j], idx[j + 1]);
        sign = -sign;
      }
    }
  }
  for (std::size_t j = 0; j + 1 < idx.size(); ++j)
    if (idx[j] == idx[j + 1]) return 0;
  return sign;
}

/// Vector field sum_i v^i d/dx^i on a chart.
class VectorField {
 public:
  VectorField() = default;
  VectorField(Chart chart, std::vector<Expr> components)
      : chart_(std::move(chart)), components_(std::move(components)) {
    if (components_.size() != chart_.dimension())
      throw ValidationError("vector field component count does not match the chart dimension");
  }
  static VectorField zero(const Chart& c) { return {c, std::vector<Expr>(c.dimension())}; }
  static VectorField coordinate(const Chart& c, std::size_t i) {
    std::vector<Expr> comps(c.dimension());
    comps[i] = Expr(1);
    return {c, std::move(comps)};
  }

  [[nodiscard]] const Chart& chart() const { return chart_; }
  [[nodiscard]] const std::vector<Expr>& components() const { return components_; }
  [[nodiscard]] const Expr& operator[](std::size_t i) const { return components_[i]; }
  [[nodiscard]] std::size_t dimension() const { return components_.size(); }

  /// Directional derivative v(f).
  [[nodiscard]] Expr apply(const Expr& f) const {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (components_[i].is_zero()) continue;
      terms.push_back(components_[i] * differentiate(f, chart_.coordinate(i)));
    }
    return add(std::move(terms));
  }

  [[nodiscard]] bool is_zero() const {
    return std::all_of(components_.begin(), components_.end(), [](const Expr& e) { return e.is_zero(); });
  }

  friend VectorField operator+(const VectorField& a, const VectorField& b) {
    require_same_chart(a.chart_, b.chart_, "vector field sum");
    std::vector<Expr> c;
    for (std::size_t i = 0; i < a.dimension(); ++i) c.push_back(a[i] + b[i]);
    return {a.chart_, std::move(c)};
  }
  friend VectorField operator-(const VectorField& a, const VectorField& b) {
    return a + (Expr(-1) * b);
  }
  friend VectorField operator*(const Expr& s, const VectorField& v) {
    std::vector<Expr> c;
    for (const auto& x : v.components_) c.push_back(s * x);
    return {v.chart_, std::move(c)};
  }

 private:
  Chart chart_;
  std::vector<Expr> components_;
};

/// Differential k-form with coefficients on strictly increasing multi-indices.
/// Degrees 0..2 are general inputs; degree 3 appears only as the output of
/// the exterior derivative of a 2-form (to test closedness).
class KForm {
 public:
  static constexpr int kMaxDegree = 3;

  KForm() = default;
  KForm(Chart chart, int degree, std::vector<Expr> coefficients)
      : chart_(std::move(chart)), degree_(degree), coefficients_(std::move(coefficients)) {
    if (degree_ < 0 || degree_ > kMaxDegree) throw UnsupportedDegreeError("form degree out of range");
    if (coefficients_.size() != multi_indices(chart_.dimension(), static_cast<std::size_t>(degree_)).size())
      throw ValidationError("form coefficient count does not match C(n,k)");
  }

  static KForm zero(const Chart& c, int degree) {
    if (degree < 0 || degree > kMaxDegree) throw UnsupportedDegreeError("form degree out of range");
    return {c, degree,
            std::vector<Expr>(multi_indices(c.dimension(), static_cast<std::size_t>(degree)).size())};
  }
  static KForm function(const Chart& c, Expr f) { return {c, 0, {std::move(f)}}; }
  /// The basis one-form dx^i.
  static KForm basis(const Chart& c, std::size_t i) {
    KForm f = zero(c, 1);
    f.coefficients_[i] = Expr(1);
    return f;
  }

  [[nodiscard]] const Chart& chart() const { return chart_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] const std::vector<Expr>& coefficients() const { return coefficients_; }
  [[nodiscard]] std::vector<MultiIndex> indices() const {
    return multi_indices(chart_.dimension(), static_cast<std::size_t>(degree_));
  }
  /// The scalar of a 0-form.
  [[nodiscard]] const Expr& scalar() const {
    if (degree_ != 0) throw UnsupportedDegreeError("scalar() of a form of positive degree");
    return coefficients_[0];
  }

  /// Coefficient for an arbitrary (unsorted) index tuple, antisymmetrized.
  [[nodiscard]] Expr component(MultiIndex idx) const {
    int sign = sort_with_sign(idx);
    if (sign == 0) return Expr(0);
    auto all = indices();
    for (std::size_t k = 0; k < all.size(); ++k)
      if (all[k] == idx) return sign > 0 ? coefficients_[k] : -coefficients_[k];
    return Expr(0);
  }

  [[nodiscard]] bool is_zero() const {
    return std::all_of(coefficients_.begin(), coefficients_.end(), [](const Expr& e) { return e.is_zero(); });
  }

  friend KForm operator+(const KForm& a, const KForm& b) {
    require_same_chart(a.chart_, b.chart_, "form sum");
    if (a.degree_ != b.degree_) throw UnsupportedDegreeError("cannot add forms of different degree");
    std::vector<Expr> c;
    for (std::size_t k = 0; k < a.coefficients_.size(); ++k) c.push_back(a.coefficients_[k] + b.coefficients_[k]);
    return {a.chart_, a.degree_, std::move(c)};
  }
  friend KForm operator-(const KForm& a, const KForm& b) { return a + (Expr(-1) * b); }
  friend KForm operator*(const Expr& s, const KForm& a) {
    std::vector<Expr> c;
    for (const auto& x : a.coefficients_) c.push_back(s * x);
    return {a.chart_, a.degree_, std::move(c)};
  }

 private:
  Chart chart_;
  int degree_ = 0;
  std::vector<Expr> coefficients_{Expr(0)};
};

/// Exterior product.
inline KForm wedge(const KForm& a, const KForm& b) {
  require_same_chart(a.chart(), b.chart(), "wedge");
  const int deg = a.degree() + b.degree();
  if (deg > KForm::kMaxDegree) throw UnsupportedDegreeError("wedge product degree exceeds 3");
  KForm out = KForm::zero(a.chart(), deg);
  auto ai = a.indices();
  auto bi = b.indices();
  auto oi = out.indices();
  std::vector<Expr> coeffs = out.coefficients();
  for (std::size_t x = 0; x < ai.size(); ++x) {
    if (a.coefficients()[x].is_zero()) continue;
    for (std::size_t y = 0; y < bi.size(); ++y) {
      if (b.coefficients()[y].is_zero()) continue;
      MultiIndex idx = ai[x];
      idx.insert(idx.end(), bi[y].begin(), bi[y].end());
      int sign = sort_with_sign(idx);
      if (sign == 0) continue;
      auto pos = std::find(oi.begin(), oi.end(), idx) - oi.begin();
      coeffs[static_cast<std::size_t>(pos)] += Expr(sign) * a.coefficients()[x] * b.coefficients()[y];
    }
  }
  return {a.chart(), deg, std::move(coeffs)};
}

/// d: k-forms to (k+1)-forms for k <= 2.
inline KForm exterior_derivative(const KForm& a) {
  if (a.degree() >= KForm::kMaxDegree)
    throw UnsupportedDegreeError("exterior derivative of a degree-3 form is not supported");
  const Chart& c = a.chart();
  KForm out = KForm::zero(c, a.degree() + 1);
  auto oi = out.indices();
  std::vector<Expr> coeffs;
  for (const auto& J : oi) {
    std::vector<Expr> terms;
    for (std::size_t r = 0; r < J.size(); ++r) {
      MultiIndex rest;
      for (std::size_t s = 0; s < J.size(); ++s)
        if (s != r) rest.push_back(J[s]);
      Expr coeff = a.component(rest);
      if (coeff.is_zero()) continue;
      Expr d = differentiate(coeff, c.coordinate(static_cast<std::size_t>(J[r])));
      terms.push_back(r % 2 == 0 ? d : -d);
    }
    coeffs.push_back(add(std::move(terms)));
  }
  return {c, a.degree() + 1, std::move(coeffs)};
}

inline KForm exterior_derivative(const Chart& c, const Expr& f) {
  return exterior_derivative(KForm::function(c, f));
}

/// Contraction v ⌟ a.
inline KForm interior_product(const VectorField& v, const KForm& a) {
  require_same_chart(v.chart(), a.chart(), "interior product");
  if (a.degree() < 1) throw UnsupportedDegreeError("interior product needs a form of degree >= 1");
  KForm out = KForm::zero(a.chart(), a.degree() - 1);
  auto ai = a.indices();
  auto oi = out.indices();
  std::vector<std::vector<Expr>> acc(oi.size());
  for (std::size_t x = 0; x < ai.size(); ++x) {
    if (a.coefficients()[x].is_zero()) continue;
    const auto& I = ai[x];
    for (std::size_t r = 0; r < I.size(); ++r) {
      const Expr& vr = v[static_cast<std::size_t>(I[r])];
      if (vr.is_zero()) continue;
      MultiIndex rest;
      for (std::size_t s = 0; s < I.size(); ++s)
        if (s != r) rest.push_back(I[s]);
      auto pos = static_cast<std::size_t>(std::find(oi.begin(), oi.end(), rest) - oi.begin());
      Expr term = vr * a.coefficients()[x];
      acc[pos].push_back(r % 2 == 0 ? term : -term);
    }
  }
  std::vector<Expr> coeffs;
  for (auto& t : acc) coeffs.push_back(add(std::move(t)));
  return {a.chart(), a.degree() - 1, std::move(coeffs)};
}

/// a(u) for a 1-form, a(u, v) for a 2-form.
inline Expr evaluate_form(const KForm& a, const VectorField& u) {
  if (a.degree() != 1) throw UnsupportedDegreeError("evaluate_form(a, u) needs a 1-form");
  return interior_product(u, a).scalar();
}
inline Expr evaluate_form(const KForm& a, const VectorField& u, const VectorField& v) {
  if (a.degree() != 2) throw UnsupportedDegreeError("evaluate_form(a, u, v) needs a 2-form");
  return interior_product(v, interior_product(u, a)).scalar();
}

/// [u, v]^i = u^k d_k v^i - v^k d_k u^i.
inline VectorField lie_bracket(const VectorField& u, const VectorField& v) {
  require_same_chart(u.chart(), v.chart(), "lie bracket");
  std::vector<Expr> c;
  for (std::size_t i = 0; i < u.dimension(); ++i) c.push_back(u.apply(v[i]) - v.apply(u[i]));
  return {u.chart(), std::move(c)};
}

/// Cartan formula L_v a = v ⌟ da + d(v ⌟ a).
inline KForm lie_derivative(const VectorField& v, const KForm& a) {
  require_same_chart(v.chart(), a.chart(), "lie derivative");
  if (a.degree() == 0) return KForm::function(a.chart(), v.apply(a.scalar()));
  return interior_product(v, exterior_derivative(a)) + exterior_derivative(interior_product(v, a));
}

/// Smooth map between charts, given by target coordinates as expressions in
/// the source coordinates.
class ChartMap {
 public:
  ChartMap(Chart source, Chart target, std::vector<Expr> components)
      : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
    if (components_.size() != target_.dimension())
      throw ChartMismatchError("chart map component count does not match the target dimension");
    auto vocab = source_.vocabulary();
    for (const auto& e : components_)
      for (const auto& s : free_symbols(e))
        if (!vocab.contains(s)) throw UnknownSymbolError(s);
  }
  static ChartMap identity(const Chart& c) {
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < c.dimension(); ++i) comps.push_back(c.coordinate_symbol(i));
    return {c, c, std::move(comps)};
  }

  [[nodiscard]] const Chart& source() const { return source_; }
  [[nodiscard]] const Chart& target() const { return target_; }
  [[nodiscard]] const std::vector<Expr>& components() const { return components_; }

  /// Expression in target coordinates, rewritten in source coordinates.
  [[nodiscard]] Expr pull(const Expr& f) const {
    std::map<std::string, Expr> repl;
    for (std::size_t i = 0; i < target_.dimension(); ++i) repl[target_.coordinate(i)] = components_[i];
    return substitute(f, repl);
  }

  /// Jacobian J[i][j] = d(target_i)/d(source_j).
  [[nodiscard]] std::vector<std::vector<Expr>> jacobian() const {
    std::vector<std::vector<Expr>> J;
    for (const auto& c : components_) {
      std::vector<Expr> row;
      for (const auto& s : source_.coordinates()) row.push_back(differentiate(c, s));
      J.push_back(std::move(row));
    }
    return J;
  }

 private:
  Chart source_;
  Chart target_;
  std::vector<Expr> components_;
};

/// outer ∘ inner.
inline ChartMap compose(const ChartMap& outer, const ChartMap& inner) {
  require_same_chart(outer.source(), inner.target(), "compose");
  std::vector<Expr> comps;
  for (const auto& c : outer.components()) comps.push_back(inner.pull(c));
  return {inner.source(), outer.target(), std::move(comps)};
}

inline KForm pullback(const ChartMap& phi, const KForm& a) {
  if (!(a.chart() == phi.target()))
    throw ChartMismatchError("pullback: form does not live on the map's target chart");
  const Chart& src = phi.source();
  if (a.degree() == 0) return KForm::function(src, phi.pull(a.scalar()));
  std::vector<KForm> dphi;
  for (const auto& c : phi.components()) dphi.push_back(exterior_derivative(KForm::function(src, c)));
  KForm out = KForm::zero(src, a.degree());
  auto ai = a.indices();
  for (std::size_t x = 0; x < ai.size(); ++x) {
    if (a.coefficients()[x].is_zero()) continue;
    KForm term = KForm::function(src, phi.pull(a.coefficients()[x]));
    for (int j : ai[x]) term = wedge(term, dphi[static_cast<std::size_t>(j)]);
    out = out + term;
  }
  return out;
}

/// Coefficientwise expr_equal on the chart's sampler.
inline EqualityResult forms_equal(const KForm& a, const KForm& b) {
  require_same_chart(a.chart(), b.chart(), "forms_equal");
  if (a.degree() != b.degree()) return {false, 0.0, 0, false};
  EqualityResult r;
  for (std::size_t k = 0; k < a.coefficients().size(); ++k)
    r.merge(expr_equal(a.coefficients()[k], b.coefficients()[k], a.chart().sampler()));
  return r;
}

inline EqualityResult fields_equal(const VectorField& a, const VectorField& b) {
  require_same_chart(a.chart(), b.chart(), "fields_equal");
  EqualityResult r;
  for (std::size_t k = 0; k < a.dimension(); ++k) r.merge(expr_equal(a[k], b[k], a.chart().sampler()));
  return r;
}

}  // namespace gqw
