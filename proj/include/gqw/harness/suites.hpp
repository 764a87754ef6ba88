#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gqw/harness/report.hpp"
#include "gqw/harness/system_spec.hpp"

namespace gqw {

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"poisson", "circle-iso",      "dirac", "group", "mpc-iso",
                                              "delta",   "counterexamples", "all"};
  return names;
}

/// Finite-difference and flow tolerances for the numeric checks on P.
inline constexpr double kTangentTol = 1e-6;
inline constexpr double kFlowOracleTol = 1e-5;
inline constexpr double kGroupTol = 1e-9;

struct Outcome {
  bool passed = false;
  double residual = 0.0;
  int n_samples = 0;
  std::string note;
};

/// Merges per-case equality results and remembers the first failing case.
class Tally {
 public:
  void add(const EqualityResult& r, const std::string& label) {
    ++cases_;
    if (!r.equal && first_failure_.empty()) first_failure_ = label;
    result_.merge(r);
  }
  void add_residual(double residual, double tol, int n, const std::string& label) {
    EqualityResult r;
    r.equal = residual <= tol;
    r.residual = residual;
    r.n_samples = n;
    add(r, label);
  }
  [[nodiscard]] Outcome outcome() const {
    std::string note = std::to_string(cases_) + " cases";
    if (!first_failure_.empty()) note += "; first failure: " + first_failure_;
    return {result_.equal, result_.residual, result_.n_samples, note};
  }

 private:
  EqualityResult result_;
  int cases_ = 0;
  std::string first_failure_;
};

namespace detail {

template <typename Fn>
void run_check(Report& r, const std::string& id, const std::string& anchor, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult c;
  c.id = id;
  c.anchor = anchor;
  try {
    Outcome o = fn();
    c.passed = o.passed;
    c.residual = o.residual;
    c.n_samples = o.n_samples;
    c.note = o.note;
  } catch (const std::exception& e) {
    c.passed = false;
    c.residual = std::numeric_limits<double>::quiet_NaN();
    c.note = std::string("error: ") + e.what();
  }
  c.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  r.checks.push_back(std::move(c));
}

struct Named {
  std::string name;
  Expr f;
};

inline std::vector<Named> corpus(const System& s) {
  std::vector<Named> out;
  for (const auto& [n, e] : s.hamiltonians) out.push_back({n, e});
  return out;
}

inline std::vector<std::pair<Named, Named>> corpus_pairs(const System& s) {
  auto c = corpus(s);
  std::vector<std::pair<Named, Named>> out;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) out.emplace_back(c[i], c[j]);
  return out;
}

inline std::string label(const Named& a, const Named& b) { return "(" + a.name + ", " + b.name + ")"; }

inline const MpcPrequant& require_mpc(const System& s) {
  if (!s.mpc) throw UnsupportedFieldError("metaplectic-c checks need a two-dimensional base");
  return *s.mpc;
}

inline Eigen::Vector2d base_of(const System& s, const Bindings& b) { return base_point(s.chart(), b); }

}  // namespace detail

// ---- poisson -----------------------------------------------------------------

inline Report poisson_suite(const System& sys) {
  using detail::Named;
  Report r{"poisson"};
  const SymplecticChart& s = sys.symplectic;
  const DomainSampler& smp = sys.chart().sampler();
  auto pairs = detail::corpus_pairs(sys);
  std::mt19937_64 rng(sys.spec.seed);
  for (int k = 0; k < 20; ++k) {
    Named a{"rand" + std::to_string(2 * k), random_polynomial(sys.chart(), 3, rng)};
    Named b{"rand" + std::to_string(2 * k + 1), random_polynomial(sys.chart(), 3, rng)};
    pairs.emplace_back(a, b);
  }
  auto c = detail::corpus(sys);
  std::vector<std::array<Named, 3>> triples;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      for (std::size_t k = j + 1; k < c.size(); ++k) triples.push_back({c[i], c[j], c[k]});
  for (int k = 0; k < 20; ++k)
    triples.push_back({Named{"randA" + std::to_string(k), random_polynomial(sys.chart(), 3, rng)},
                       Named{"randB" + std::to_string(k), random_polynomial(sys.chart(), 3, rng)},
                       Named{"randC" + std::to_string(k), random_polynomial(sys.chart(), 3, rng)}});
  auto tri_label = [](const std::array<Named, 3>& t) {
    return "(" + t[0].name + ", " + t[1].name + ", " + t[2].name + ")";
  };

  detail::run_check(r, "poisson.hamiltonian", "xi_f ⌟ omega = df", [&] {
    Tally t;
    for (const auto& f : c) t.add(check_hamiltonian(f.f, s), f.name);
    return t.outcome();
  });
  detail::run_check(r, "poisson.routes", "{f,g} = -omega(xi_f, xi_g) = xi_f g = -(xi_g ⌟ df)", [&] {
    Tally t;
    for (const auto& [a, b] : pairs) t.add(check_poisson_routes(a.f, b.f, s), detail::label(a, b));
    return t.outcome();
  });
  detail::run_check(r, "poisson.bracket-lemma", "[xi_f, xi_g] = xi_{f,g}", [&] {
    Tally t;
    for (const auto& [a, b] : pairs) t.add(verify_bracket_lemma(a.f, b.f, s).result, detail::label(a, b));
    return t.outcome();
  });
  detail::run_check(r, "poisson.antisymmetry", "{f,g} + {g,f} = 0", [&] {
    Tally t;
    for (const auto& [a, b] : pairs)
      t.add(max_abs(poisson(a.f, b.f, s) + poisson(b.f, a.f, s), smp), detail::label(a, b));
    return t.outcome();
  });
  detail::run_check(r, "poisson.jacobi", "{f,{g,h}} + {g,{h,f}} + {h,{f,g}} = 0", [&] {
    Tally t;
    for (const auto& tr : triples) t.add(max_abs(jacobiator(tr[0].f, tr[1].f, tr[2].f, s), smp), tri_label(tr));
    return t.outcome();
  });
  detail::run_check(r, "poisson.leibniz", "{f,gh} = {f,g}h + g{f,h}", [&] {
    Tally t;
    for (const auto& tr : triples)
      t.add(max_abs(leibniz_defect(tr[0].f, tr[1].f, tr[2].f, s), smp), tri_label(tr));
    return t.outcome();
  });
  return r;
}

// ---- circle-iso ----------------------------------------------------------------

inline Report circle_suite(const System& sys) {
  Report r{"circle-iso"};
  const PrequantCircle& y = sys.circle;
  const DomainSampler& smp = sys.chart().sampler();
  auto c = detail::corpus(sys);
  auto pairs = detail::corpus_pairs(sys);
  const Expr inv_2pi_hbar = pow(Expr(2) * pi() * hbar(), Rational(-1));

  detail::run_check(r, "circle.lifted-bracket",
                    "[hor(xi_f), hor(xi_g)] = hor(xi_{f,g}) - (1/2 pi hbar){f,g} d_{2 pi i}", [&] {
                      Tally t;
                      for (const auto& [a, b] : pairs) {
                        Expr fg = poisson(a.f, b.f, y.base());
                        auto lhs = bracket_lifted(horizontal_lift(hamiltonian_vf(a.f, y.base()), y),
                                                  horizontal_lift(hamiltonian_vf(b.f, y.base()), y));
                        CircleLiftedVF rhs = horizontal_lift(hamiltonian_vf(fg, y.base()), y);
                        rhs.fiber = rhs.fiber - inv_2pi_hbar * fg;
                        t.add(lifted_equal(lhs, rhs, smp), detail::label(a, b));
                      }
                      return t.outcome();
                    });
  detail::run_check(r, "circle.E-homomorphism", "[E(f), E(g)] = E({f,g})", [&] {
    Tally t;
    for (const auto& [a, b] : pairs)
      t.add(lifted_equal(bracket_lifted(E_circle(a.f, y), E_circle(b.f, y)), E_circle(poisson(a.f, b.f, y.base()), y),
                         smp),
            detail::label(a, b));
    return t.outcome();
  });
  detail::run_check(r, "circle.E-preserves-gamma", "L_{E(f)} gamma = 0", [&] {
    Tally t;
    for (const auto& f : c) t.add(preserves_gamma(E_circle(f.f, y), y), f.name);
    return t.outcome();
  });
  detail::run_check(r, "circle.curvature", "dgamma = (1/i hbar) omega on lifted fields", [&] {
    std::vector<CircleLiftedVF> fields;
    for (const auto& f : c) fields.push_back(E_circle(f.f, y));
    for (std::size_t k = 0; k < sys.chart().dimension(); ++k)
      fields.push_back(horizontal_lift(VectorField::coordinate(sys.chart(), k), y));
    Tally t;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      for (std::size_t j = i + 1; j < fields.size(); ++j) {
        const auto& a = fields[i];
        const auto& b = fields[j];
        Expr dg = a.base.apply(gamma_of(b, y)) - b.base.apply(gamma_of(a, y)) - gamma_of(bracket_lifted(a, b), y);
        Expr expected = inv_i_hbar() * evaluate_form(y.base().omega(), a.base, b.base);
        t.add(expr_equal(dg, expected, smp), "fields " + std::to_string(i) + "," + std::to_string(j));
      }
    }
    return t.outcome();
  });
  detail::run_check(r, "circle.F-after-E", "F(E(f)) = f", [&] {
    Tally t;
    for (const auto& f : c) t.add(expr_equal(F_circle(E_circle(f.f, y), y), f.f, smp), f.name);
    return t.outcome();
  });
  detail::run_check(r, "circle.E-after-F", "E(F(zeta)) = zeta on the image of E", [&] {
    Tally t;
    for (const auto& [a, b] : pairs) {
      CircleLiftedVF z = E_circle(a.f, y);
      CircleLiftedVF w = E_circle(b.f, y);
      CircleLiftedVF zeta{z.base + Expr(2) * w.base, z.fiber + Expr(2) * w.fiber};
      t.add(lifted_equal(E_circle(F_circle(zeta, y), y), zeta, smp), detail::label(a, b));
    }
    return t.outcome();
  });
  detail::run_check(r, "circle.flow-oracle", "[E(f), E(g)] agrees with the flow commutator on Y", [&] {
    Chart total = y.total_chart();
    auto pts = total.sampler().with_samples(8).points();
    Tally t;
    const double hb = sys.spec.hbar;
    for (std::size_t k = 0; k + 1 < c.size() && k < 3; ++k) {
      CircleLiftedVF a = E_circle(c[k + 1].f, y);
      CircleLiftedVF b = E_circle(c[(k + 2) % c.size()].f, y);
      NumericField na(total_space_field(a, y), hb);
      NumericField nb(total_space_field(b, y), hb);
      NumericField nab(total_space_field(bracket_lifted(a, b), y), hb);
      for (const auto& pt : pts) {
        Eigen::VectorXd x = point_of(total, pt);
        const double res = (flow_commutator_extrapolated(na, nb, x) - nab(x)).norm();
        t.add_residual(res, kFlowOracleTol, 1, c[k + 1].name + "," + c[(k + 2) % c.size()].name);
      }
    }
    return t.outcome();
  });
  return r;
}

// ---- dirac ---------------------------------------------------------------------

inline std::vector<detail::Named> default_sections(const Chart& c) {
  const std::string p = c.coordinate(0);
  const std::string q = c.coordinate(c.dimension() > 1 ? 1 : 0);
  return {{"1", Expr(1)}, {p + "*" + q, c.parse(p + "*" + q)}, {"exp*cos", c.parse("exp(" + p + ")*cos(" + q + ")")}};
}

inline Report dirac_suite(const System& sys) {
  Report r{"dirac"};
  const PrequantCircle& y = sys.circle;
  const DomainSampler& smp = sys.chart().sampler();
  auto sections = default_sections(sys.chart());
  auto c = detail::corpus(sys);
  if (c.size() > 5) c.resize(5);

  detail::run_check(r, "dirac.unit", "r(1) = id", [&] {
    Tally t;
    for (const auto& u : sections) {
      Expr d = ks_operator(Expr(1), EquivariantSection{u.f}, y).u - u.f;
      EqualityResult e = max_abs(d, smp);
      e.equal = e.equal && d.is_zero();  // exact, not merely sampled
      t.add(e, u.name);
    }
    return t.outcome();
  });
  detail::run_check(r, "dirac.commutator", "[r(f), r(g)] = i hbar r({f,g})", [&] {
    Tally t;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        for (const auto& u : sections)
          t.add(max_abs(dirac_defect(c[i].f, c[j].f, EquivariantSection{u.f}, y), smp),
                detail::label(c[i], c[j]) + " on " + u.name);
    return t.outcome();
  });
  detail::run_check(r, "dirac.curvature", "nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y] = (1/i hbar) omega(X,Y)",
                    [&] {
                      std::vector<VectorField> fields;
                      for (std::size_t k = 0; k < sys.chart().dimension(); ++k)
                        fields.push_back(VectorField::coordinate(sys.chart(), k));
                      for (const auto& f : c) fields.push_back(hamiltonian_vf(f.f, y.base()));
                      Tally t;
                      for (std::size_t i = 0; i < fields.size(); ++i)
                        for (std::size_t j = i + 1; j < fields.size(); ++j)
                          for (const auto& u : sections)
                            t.add(max_abs(curvature_defect(fields[i], fields[j], EquivariantSection{u.f}, y), smp),
                                  "fields " + std::to_string(i) + "," + std::to_string(j) + " on " + u.name);
                      return t.outcome();
                    });
  detail::run_check(r, "dirac.lifted-action", "r(f) = i hbar E(f) on equivariant functions", [&] {
    Tally t;
    for (const auto& f : c)
      for (const auto& u : sections)
        t.add(expr_equal(ks_operator(f.f, EquivariantSection{u.f}, y).u,
                         lifted_action(f.f, EquivariantSection{u.f}, y).u, smp),
              f.name + " on " + u.name);
    return t.outcome();
  });
  return r;
}

// ---- group ---------------------------------------------------------------------

inline Report group_suite(std::uint64_t seed) {
  Report r{"group"};
  auto rng_for = [seed](std::uint64_t salt) { return std::mt19937_64(seed ^ (salt * 0x9E3779B97F4A7C15ULL)); };

  detail::run_check(r, "group.associativity", "(ab)c = a(bc) in Mp^c", [&] {
    auto rng = rng_for(1);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      MpcElement a = random_mpc(rng), b = random_mpc(rng), c = random_mpc(rng);
      worst = std::max(worst, distance(mpc_mul(mpc_mul(a, b), c), mpc_mul(a, mpc_mul(b, c))));
    }
    return Outcome{worst <= kGroupTol, worst, 1000};
  });
  detail::run_check(r, "group.inverse", "a a^-1 = a^-1 a = 1 in Mp^c", [&] {
    auto rng = rng_for(2);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      MpcElement a = random_mpc(rng);
      worst = std::max({worst, distance(mpc_mul(a, mpc_inv(a)), MpcElement::identity()),
                        distance(mpc_mul(mpc_inv(a), a), MpcElement::identity())});
    }
    return Outcome{worst <= kGroupTol, worst, 1000};
  });
  detail::run_check(r, "group.eta-center", "eta(lambda) = lambda^2 on the central circle", [&] {
    auto rng = rng_for(3);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      Complex l = std::polar(1.0, 2 * kPi * uniform01(rng));
      worst = std::max(worst, std::abs(eta(MpcElement::central(l)) - l * l));
    }
    return Outcome{worst <= kGroupTol, worst, 1000};
  });
  detail::run_check(r, "group.homomorphisms", "sigma(ab) = sigma(a)sigma(b), eta(ab) = eta(a)eta(b)", [&] {
    auto rng = rng_for(4);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      MpcElement a = random_mpc(rng), b = random_mpc(rng);
      worst = std::max({worst, distance(sigma(mpc_mul(a, b)), sigma(a) * sigma(b)),
                        std::abs(eta(mpc_mul(a, b)) - eta(a) * eta(b))});
    }
    return Outcome{worst <= kGroupTol, worst, 1000};
  });
  detail::run_check(r, "group.cocycle", "kappa(a,b) + kappa(ab,c) = kappa(b,c) + kappa(a,bc) mod 2", [&] {
    auto rng = rng_for(5);
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
      SpElement a = random_sp(rng), b = random_sp(rng), c = random_sp(rng);
      if (parity(kappa(a, b) + kappa(a * b, c)) != parity(kappa(b, c) + kappa(a, b * c))) ++bad;
    }
    return Outcome{bad == 0, static_cast<double>(bad), 1000, std::to_string(bad) + " violations"};
  });
  detail::run_check(r, "group.path-lifting", "lifting exp(x) then exp(y) along a path lands on exp(x)exp(y) in Mp",
                    [&] {
                      auto rng = rng_for(6);
                      int bad = 0;
                      double worst = 0.0;
                      for (int k = 0; k < 200; ++k) {
                        MpcAlgebra x = random_algebra(rng, 2.0), y = random_algebra(rng, 2.0);
                        MpElement a = exp_mp(x.A, 1.0);
                        MpElement b = exp_mp(y.A, 1.0);
                        const Mat2 ga = a.g.matrix();
                        auto path = [&](double s) -> Mat2 {
                          if (s <= 0.5) return expm(Mat2(x.A * (2 * s)));
                          return ga * expm(Mat2(y.A * (2 * s - 1)));
                        };
                        MpElement lifted = lift_path(path, MpElement::identity(), 512);
                        MpElement product = mp_mul(a, b);
                        worst = std::max(worst, distance(lifted.g, product.g));
                        if (!same_mp(lifted, product)) ++bad;
                      }
                      return Outcome{bad == 0, worst, 200, std::to_string(bad) + " sheet mismatches"};
                    });
  detail::run_check(r, "group.loops", "R(2 pi t) lifts to a path ending at (I,1); R(4 pi t) lifts to a loop", [&] {
    MpElement open = lift_path([](double s) { return SpElement::rotation(2 * kPi * s).matrix(); },
                               MpElement::identity());
    MpElement closed = lift_path([](double s) { return SpElement::rotation(4 * kPi * s).matrix(); },
                                 MpElement::identity());
    const bool ok = same_mp(open, MpElement::deck()) && same_mp(closed, MpElement::identity());
    return Outcome{ok, std::max(distance(open.g, SpElement()), distance(closed.g, SpElement())), 2,
                   "open ends on sheet " + std::to_string(open.sheet) + ", closed on sheet " +
                       std::to_string(closed.sheet)};
  });
  return r;
}

// ---- mpc-iso ---------------------------------------------------------------------

inline Report mpc_suite(const System& sys) {
  Report r{"mpc-iso"};
  auto c = detail::corpus(sys);
  auto pairs = detail::corpus_pairs(sys);
  const DomainSampler& smp = sys.chart().sampler();
  const std::uint64_t seed = sys.spec.seed;

  std::optional<PrequantConditionReport> conditions;
  auto cond = [&]() -> const PrequantConditionReport& {
    if (!conditions) conditions = check_prequant_conditions(detail::require_mpc(sys), seed, sys.spec.samples);
    return *conditions;
  };
  detail::run_check(r, "mpc.condition1", "R_b^* gamma = gamma", [&] {
    const auto& k = cond();
    return Outcome{k.right_invariance <= kTangentTol, k.right_invariance, k.n_samples};
  });
  detail::run_check(r, "mpc.condition2", "gamma(d_alpha) = 1/2 eta_* alpha", [&] {
    const auto& k = cond();
    return Outcome{k.vertical_normalization <= kTangentTol, k.vertical_normalization, k.n_samples};
  });
  detail::run_check(r, "mpc.condition3", "dgamma = (1/i hbar) Pi^* omega", [&] {
    const auto& k = cond();
    return Outcome{k.curvature.equal, k.curvature.residual, k.curvature.n_samples};
  });
  detail::run_check(r, "mpc.eta-conjugation", "eta(a b a^-1) = eta(b)", [&] {
    std::mt19937_64 rng(seed + 7);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      MpcElement a = random_mpc(rng), b = random_mpc(rng);
      worst = std::max(worst, std::abs(eta(mpc_mul(mpc_mul(a, b), mpc_inv(a))) - eta(b)));
    }
    return Outcome{worst <= kGroupTol, worst, 1000};
  });
  detail::run_check(r, "mpc.hat-lift", "gamma(xi_hat_f) = 0, Sigma_* xi_hat_f = frame lift of xi_f, Pi_* E(f) = xi_f",
                    [&] {
                      const MpcPrequant& p = detail::require_mpc(sys);
                      Tally t;
                      for (const auto& f : c) {
                        StructuredVF h = hat_lift(f.f, p);
                        t.add(max_abs(gamma_of(h, p), smp), f.name + " gamma");
                        t.add(quantomorphism_membership(h, p).frame_condition, f.name + " frame");
                        t.add(fields_equal(E_mpc(f.f, p).base, hamiltonian_vf(f.f, p.base())), f.name + " base");
                      }
                      return t.outcome();
                    });
  detail::run_check(r, "mpc.E-membership", "E(f) preserves gamma and covers the frame lift", [&] {
    const MpcPrequant& p = detail::require_mpc(sys);
    Tally t;
    for (const auto& f : c) {
      MembershipReport m = quantomorphism_membership(E_mpc(f.f, p), p);
      t.add(m.preserves_gamma, f.name + " (i)");
      t.add(m.frame_condition, f.name + " (ii)");
    }
    return t.outcome();
  });
  detail::run_check(r, "mpc.E-homomorphism", "[E(f), E(g)] = E({f,g})", [&] {
    const MpcPrequant& p = detail::require_mpc(sys);
    Tally t;
    for (const auto& [a, b] : pairs)
      t.add(structured_equal(structured_bracket(E_mpc(a.f, p), E_mpc(b.f, p)), E_mpc(poisson(a.f, b.f, p.base()), p),
                             smp),
            detail::label(a, b));
    return t.outcome();
  });
  detail::run_check(r, "mpc.F-after-E", "F(E(f)) = f", [&] {
    const MpcPrequant& p = detail::require_mpc(sys);
    Tally t;
    for (const auto& f : c) t.add(expr_equal(F_mpc(E_mpc(f.f, p), p), f.f, smp), f.name);
    return t.outcome();
  });
  detail::run_check(r, "mpc.E-after-F", "E(F(zeta)) = zeta on the image of E", [&] {
    const MpcPrequant& p = detail::require_mpc(sys);
    Tally t;
    for (const auto& [a, b] : pairs) {
      StructuredVF zeta = E_mpc(a.f, p) + Expr(2) * E_mpc(b.f, p);
      t.add(structured_equal(E_mpc(F_mpc(zeta, p), p), zeta, smp), detail::label(a, b));
    }
    return t.outcome();
  });
  detail::run_check(r, "mpc.hat-commutes-left", "[xi_hat_f, d_alpha] = 0", [&] {
    const MpcPrequant& p = detail::require_mpc(sys);
    std::mt19937_64 rng(seed + 11);
    std::vector<StructuredVF> lefts;
    for (int k = 0; k < 3; ++k) lefts.push_back(StructuredVF::left_invariant(sys.chart(), random_algebra(rng)));
    Tally t;
    for (const auto& f : c)
      for (std::size_t k = 0; k < lefts.size(); ++k)
        t.add(structured_equal(structured_bracket(hat_lift(f.f, p), lefts[k]), StructuredVF::zero(sys.chart()), smp),
              f.name + " with alpha" + std::to_string(k));
    return t.outcome();
  });
  detail::run_check(r, "mpc.flow-oracle", "closed-form bracket of structured fields agrees with the flow commutator",
                    [&] {
                      const MpcPrequant& p = detail::require_mpc(sys);
                      std::mt19937_64 rng(seed + 13);
                      const Chart& ch = sys.chart();
                      const std::string x = ch.coordinate(0), y = ch.coordinate(1);
                      std::vector<std::pair<StructuredVF, StructuredVF>> fields{
                          {E_mpc(ch.parse(x + "*" + y), p), E_mpc(ch.parse(x + "^2 - " + y + "^2"), p)},
                          {E_mpc(ch.parse(x + "^2 + " + y + "^3"), p),
                           StructuredVF::left_invariant(ch, random_algebra(rng))},
                          {StructuredVF::left_invariant(ch, random_algebra(rng)),
                           StructuredVF::left_invariant(ch, random_algebra(rng))},
                          {hat_lift(ch.parse(x + "*" + y + "^2"), p), E_mpc(ch.parse(y), p)},
                      };
                      auto pts = smp.with_samples(8).points();
                      Tally t;
                      for (std::size_t k = 0; k < fields.size(); ++k) {
                        const auto& [a, b] = fields[k];
                        StructuredFlowField closed(structured_bracket(a, b), p, sys.spec.hbar);
                        double worst = 0.0;
                        for (const auto& pt : pts) {
                          Eigen::VectorXd z = bundle_point(detail::base_of(sys, pt), random_mpc(rng));
                          Eigen::VectorXd oracle = structured_bracket_oracle(a, b, p, z, 1e-3, sys.spec.hbar);
                          worst = std::max(worst, (oracle - closed(z)).norm());
                        }
                        t.add_residual(worst, kFlowOracleTol, static_cast<int>(pts.size()),
                                       "pair " + std::to_string(k));
                      }
                      return t.outcome();
                    });
  detail::run_check(r, "mpc.regression-condition-ii",
                    "without the frame condition, zeta = E(f) + d_diag(1,-1) has F(zeta) = f but E(F(zeta)) != zeta",
                    [&] {
                      const MpcPrequant& p = detail::require_mpc(sys);
                      ExprMat2 h{{{Expr(1), Expr(0)}, {Expr(0), Expr(-1)}}};
                      StructuredVF extra = StructuredVF::left_invariant(sys.chart(), h, Expr(0));
                      bool ok = true;
                      double gap = std::numeric_limits<double>::infinity();
                      std::string first;
                      for (const auto& f : c) {
                        StructuredVF zeta = E_mpc(f.f, p) + extra;
                        MembershipReport m = quantomorphism_membership(zeta, p);
                        Expr back = F_mpc(zeta, p, Membership::GammaOnly);
                        EqualityResult round = structured_equal(E_mpc(back, p), zeta, smp);
                        bool rejected = false;
                        try {
                          (void)F_mpc(zeta, p);
                        } catch (const NotAQuantomorphismError&) {
                          rejected = true;
                        }
                        const bool here = m.preserves_gamma.equal && !m.frame_condition.equal &&
                                          expr_equal(back, f.f, smp).equal && !round.equal && rejected;
                        if (!here && first.empty()) first = f.name;
                        ok = ok && here;
                        gap = std::min(gap, round.residual);
                      }
                      std::string note = "smallest |E(F(zeta)) - zeta| over the corpus";
                      if (!first.empty()) note += "; unexpected behaviour at " + first;
                      return Outcome{ok, gap, smp.samples(), note};
                    });
  return r;
}

// ---- delta -----------------------------------------------------------------------

inline Report delta_suite(const System& sys) {
  Report r{"delta"};
  auto pairs = detail::corpus_pairs(sys);
  auto c = detail::corpus(sys);

  detail::run_check(r, "delta.representation", "delta_{f,g} = [delta_f, delta_g]", [&] {
    const MpcPrequant& p = detail::require_mpc(sys);
    Chart sc = p.section_chart();
    auto g = p.frame_coordinates();
    const std::string x = sys.chart().coordinate(0), y = sys.chart().coordinate(1);
    std::vector<detail::Named> sections{
        {"1", Expr(1)},
        {"frame-linear", sc.parse(x + "*" + g[0] + " + " + y + "*" + g[2])},
        {"frame-quadratic", sc.parse("exp(" + x + ")*" + g[1] + "*" + g[3])}};
    DomainSampler s = sc.sampler().with_samples(sys.spec.samples);
    Tally t;
    for (const auto& u : sections)
      for (const auto& [a, b] : pairs)
        t.add(max_abs(delta_defect(a.f, b.f, u.f, p), s), detail::label(a, b) + " on " + u.name);
    return t.outcome();
  });
  detail::run_check(r, "delta.reduces-to-r", "delta_f u = (1/i hbar) r(f) u when u ignores the frame", [&] {
    const MpcPrequant& p = detail::require_mpc(sys);
    Tally t;
    for (const auto& f : c)
      for (const auto& u : default_sections(sys.chart()))
        t.add(expr_equal(delta_operator(f.f, u.f, p),
                         inv_i_hbar() * ks_operator(f.f, EquivariantSection{u.f}, sys.circle).u, sys.chart().sampler()),
              f.name + " on " + u.name);
    return t.outcome();
  });
  return r;
}

// ---- counterexamples -------------------------------------------------------------

inline Report counterexample_suite(const System& sys, const Expr& a2_angle = pi() / Expr(2)) {
  Report r{"counterexamples"};
  const std::uint64_t seed = sys.spec.seed;
  std::optional<ExampleA1Report> a1;
  auto get_a1 = [&]() -> const ExampleA1Report& {
    if (!a1) a1 = example_A1(detail::require_mpc(sys), seed, sys.spec.samples);
    return *a1;
  };
  std::optional<ExampleA2Report> a2;
  auto get_a2 = [&]() -> const ExampleA2Report& {
    if (!a2) a2 = example_A2(a2_angle, detail::require_mpc(sys), seed, sys.spec.samples);
    return *a2;
  };

  detail::run_check(r, "a1.gamma-preserved", "a1: K^* gamma = gamma", [&] {
    const auto& a = get_a1();
    return Outcome{a.gamma_preserved(kTangentTol), a.gamma_residual, a.n_samples};
  });
  detail::run_check(r, "a1.step-halving", "a1: tangent residual stable under h -> h/2 (cocycle locally constant)",
                    [&] {
                      const auto& a = get_a1();
                      return Outcome{a.step_halving_change <= kTangentTol, a.step_halving_change, a.n_samples};
                    });
  detail::run_check(r, "a1.eta", "a1: eta o F = eta", [&] {
    const auto& a = get_a1();
    return Outcome{a.eta_residual <= kGroupTol, a.eta_residual, a.n_samples};
  });
  detail::run_check(r, "a1.no-frame-map", "a1: Sigma o K is not constant on a fiber, so no K' exists", [&] {
    const auto& a = get_a1();
    return Outcome{a.fiber_image_nonconstant(0.5) && a.t0_vs_eighth >= 0.5, a.t0_vs_eighth, 8,
                   "no K' exists: " + std::to_string(a.distinct_fiber_values) +
                       " distinct frames over one fiber; sigma-distance of mu(0) and mu(1/4) images = " +
                       std::to_string(a.t0_vs_eighth)};
  });
  detail::run_check(r, "a2.condition1", "a2: K^* gamma = gamma (T^* beta = beta)", [&] {
    const auto& a = get_a2();
    EqualityResult e = a.beta_invariance;
    e.merge(a.omega_invariance);
    return Outcome{e.equal, e.residual, e.n_samples};
  });
  detail::run_check(r, "a2.equivariance", "a2: K(p a) = K(p) a", [&] {
    const auto& a = get_a2();
    return Outcome{a.equivariance_residual <= kGroupTol, a.equivariance_residual, a.n_samples};
  });
  detail::run_check(r, "a2.condition2-fails", "a2: K~'' o Sigma != Sigma o K", [&] {
    const auto& a = get_a2();
    return Outcome{!a.condition2(kTangentTol), a.condition2_residual, a.n_samples,
                   "condition (2) fails as expected"};
  });
  detail::run_check(r, "a2.frame-gap", "a2: |K' - K~''|_F = |I - R(angle)|_F", [&] {
    const auto& a = get_a2();
    Bindings none;
    const double theta = evaluate(a2_angle, none).real();
    const double expected = (Mat2::Identity() - SpElement::rotation(theta).matrix()).norm();
    const double res = std::abs(a.frame_difference - expected);
    char buf[96];
    std::snprintf(buf, sizeof buf, "K' != K~'': |K' - K~''|_F = %.12g", a.frame_difference);
    return Outcome{res <= 1e-12, res, 1, buf};
  });
  return r;
}

// ---- dispatch ----------------------------------------------------------------------

inline Report run_suite(const System& sys, const std::string& name) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  if (name == "poisson") r = poisson_suite(sys);
  else if (name == "circle-iso") r = circle_suite(sys);
  else if (name == "dirac") r = dirac_suite(sys);
  else if (name == "group") r = group_suite(sys.spec.seed);
  else if (name == "mpc-iso") r = mpc_suite(sys);
  else if (name == "delta") r = delta_suite(sys);
  else if (name == "counterexamples") r = counterexample_suite(sys);
  else if (name == "all") {
    r.suite = "all";
    for (const auto& n : suite_names())
      if (n != "all") r.append(run_suite(sys, n));
  } else {
    throw ValidationError("unknown suite '" + name + "'");
  }
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace gqw
