#include <catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "gqw/circle_prequant.hpp"

using namespace gqw;

namespace {

PrequantCircle punctured_bundle() {
  Chart c = Chart::box({"p", "q"}, 2.0, {parse_expr("p^2 + q^2 - 1/100", std::vector<std::string>{"p", "q"})});
  return {SymplecticChart(c, parse_form("dp^dq", c)), parse_form("1/2*(p*dq - q*dp)", c)};
}

PrequantCircle plane_bundle() {
  Chart c = Chart::box({"p", "q"});
  return {SymplecticChart(c, parse_form("dp^dq", c)), parse_form("p*dq", c)};
}

const std::vector<std::string> kHamiltonians{"p", "q", "p^2 + q^2", "p*q", "1/2*(p*q - q^3)"};
const std::vector<std::string> kSections{"1", "p*q", "exp(p)*cos(q)"};

}  // namespace

TEST_CASE("the bundle checks d beta = omega", "[circle]") {
  Chart c = Chart::box({"p", "q"});
  SymplecticChart s(c, parse_form("dp^dq", c));
  CHECK_NOTHROW(PrequantCircle(s, parse_form("-q*dp", c)));
  CHECK_THROWS_AS(PrequantCircle(s, parse_form("q*dp", c)), ValidationError);
  CHECK_NOTHROW(PrequantCircle::unchecked(s, parse_form("q*dp", c)));
  CHECK(punctured_bundle().fiber_coordinate() == "t");
}

TEST_CASE("horizontal lift", "[circle][lift]") {
  auto y = punctured_bundle();
  const Chart& c = y.chart();
  CircleLiftedVF zero = horizontal_lift(VectorField::zero(c), y);
  CHECK(zero.fiber.is_zero());

  VectorField rot = hamiltonian_vf(c.parse("1/2*(p^2 + q^2)"), y.base());
  CircleLiftedVF h = horizontal_lift(rot, y);
  Expr expected = pow(two_pi_i(), Rational(-1)) * inv_i_hbar() * c.parse("1/2*(p^2 + q^2)");
  CHECK(expr_equal(h.fiber, expected, c.sampler()).equal);
  CHECK(gamma_of(h, y).is_zero());

  for (const auto& f : {"p", "sin(p*q)", "exp(p)*cos(q)", "(p + q)^3", "p/(q^2 + 1)"}) {
    for (const auto& g : {"q", "p^2"}) {
      VectorField x = hamiltonian_vf(c.parse(f), y.base()) + VectorField::coordinate(c, 0);
      x = c.parse(g) * x;
      CHECK(max_abs(gamma_of(horizontal_lift(x, y), y), c.sampler()).equal);
    }
  }
}

TEST_CASE("E examples", "[circle][E]") {
  auto y = plane_bundle();
  const Chart& c = y.chart();
  CircleLiftedVF one = E_circle(Expr(1), y);
  CHECK(one.base.is_zero());
  CHECK(one.fiber == pow(Expr(2) * pi() * hbar(), Rational(-1)));
  CircleLiftedVF zero = E_circle(Expr(0), y);
  CHECK(zero.base.is_zero());
  CHECK(zero.fiber.is_zero());

  Expr f = c.parse("p^2 + q^2");
  Expr g = c.parse("p*q");
  CHECK(lifted_equal(E_circle(poisson(f, g, y.base()), y), bracket_lifted(E_circle(f, y), E_circle(g, y)), c.sampler())
            .equal);
}

TEST_CASE("lifted bracket of horizontal lifts", "[circle][bracket]") {
  for (auto y : {plane_bundle(), punctured_bundle()}) {
    const Chart& c = y.chart();
    Expr f = c.parse("p^2 + q^2");
    Expr g = c.parse("p*q");
    Expr fg = poisson(f, g, y.base());
    auto lhs = bracket_lifted(horizontal_lift(hamiltonian_vf(f, y.base()), y),
                              horizontal_lift(hamiltonian_vf(g, y.base()), y));
    CircleLiftedVF rhs = horizontal_lift(hamiltonian_vf(fg, y.base()), y);
    rhs.fiber = rhs.fiber - pow(Expr(2) * pi() * hbar(), Rational(-1)) * fg;
    CHECK(lifted_equal(lhs, rhs, c.sampler()).equal);

    CircleLiftedVF z = E_circle(f, y);
    auto self = bracket_lifted(z, z);
    CHECK(self.base.is_zero());
    CHECK(self.fiber.is_zero());
  }
}

TEST_CASE("lifted bracket matches the flow commutator on the total space", "[circle][bracket][oracle]") {
  auto y = plane_bundle();
  Chart total = y.total_chart();
  const Chart& c = y.chart();
  std::vector<std::pair<std::string, std::string>> pairs{{"p^2 + q^2", "p*q"}, {"p", "q^2"}, {"sin(q)", "p^3"}};
  auto pts = total.sampler().with_samples(8).points();
  for (const auto& [fs, gs] : pairs) {
    CircleLiftedVF a = E_circle(c.parse(fs), y);
    CircleLiftedVF b = E_circle(c.parse(gs), y);
    NumericField na(total_space_field(a, y));
    NumericField nb(total_space_field(b, y));
    NumericField nab(total_space_field(bracket_lifted(a, b), y));
    for (const auto& pt : pts) {
      Eigen::VectorXd x = point_of(total, pt);
      Eigen::VectorXd oracle = flow_commutator(na, nb, x, 1e-3);
      CHECK((oracle - nab(x)).norm() <= 1e-4 * std::max(1.0, nab(x).norm()));
    }
  }
}

TEST_CASE("E is a homomorphism on random polynomial pairs", "[circle][E][property]") {
  auto y = plane_bundle();
  std::mt19937_64 rng(42);
  for (int k = 0; k < 20; ++k) {
    Expr f = random_polynomial(y.chart(), 3, rng);
    Expr g = random_polynomial(y.chart(), 3, rng);
    auto r = lifted_equal(E_circle(poisson(f, g, y.base()), y), bracket_lifted(E_circle(f, y), E_circle(g, y)),
                          y.chart().sampler());
    CHECK(r.equal);
  }
}

TEST_CASE("E preserves gamma and F inverts it", "[circle][F]") {
  for (auto y : {plane_bundle(), punctured_bundle()}) {
    const Chart& c = y.chart();
    for (const auto& fs : {"p*q", "p^2 + q^2", "sin(p*q)", "exp(p)*cos(q)", "7"}) {
      Expr f = c.parse(fs);
      CircleLiftedVF z = E_circle(f, y);
      CHECK(preserves_gamma(z, y).equal);
      CHECK(expr_equal(F_circle(z, y), f, c.sampler()).equal);
      CHECK(lifted_equal(E_circle(F_circle(z, y), y), z, c.sampler()).equal);
      CircleLiftedVF perturbed = z + Expr(0) * E_circle(c.parse("q"), y);
      CHECK(lifted_equal(E_circle(F_circle(perturbed, y), y), z, c.sampler()).equal);
    }
    CHECK(expr_equal(F_circle(CircleLiftedVF::vertical(c, pow(Expr(2) * pi() * hbar(), Rational(-1))), y), Expr(1),
                     c.sampler())
              .equal);
    // A horizontal lift of a non-Hamiltonian field does not preserve gamma.
    CircleLiftedVF bad = horizontal_lift(VectorField(c, {c.parse("p"), Expr(0)}), y);
    try {
      (void)F_circle(bad, y);
      FAIL("expected NotAQuantomorphismError");
    } catch (const NotAQuantomorphismError& e) {
      CHECK(e.residual() > 0.1);
    }
  }
}

TEST_CASE("connection and operator examples", "[circle][dirac]") {
  auto y = punctured_bundle();
  const Chart& c = y.chart();
  EquivariantSection one{Expr(1)};
  CHECK(connection_nabla(VectorField::zero(c), EquivariantSection{c.parse("p*q")}, y).u.is_zero());
  // beta(d/dp) = -q/2.
  Expr nabla = connection_nabla(VectorField::coordinate(c, 0), one, y).u;
  CHECK(expr_equal(nabla, inv_i_hbar() * c.parse("-q/2"), c.sampler()).equal);

  CHECK(ks_operator(Expr(1), EquivariantSection{c.parse("p*q")}, y).u == c.parse("p*q"));
  CHECK(ks_operator(c.parse("p"), EquivariantSection{Expr(0)}, y).u.is_zero());
  CHECK(max_abs(dirac_defect(c.parse("p"), c.parse("q"), EquivariantSection{c.parse("p*q")}, y), c.sampler()).equal);

  auto s = EquivariantSection{c.parse("sin(p)")};
  CHECK(s.vertical_action().u == -two_pi_i() * s.u);
}

TEST_CASE("operator agrees with the lifted action and the connection", "[circle][dirac][property]") {
  for (auto y : {plane_bundle(), punctured_bundle()}) {
    const Chart& c = y.chart();
    for (const auto& fs : kHamiltonians) {
      for (const auto& us : kSections) {
        Expr f = c.parse(fs);
        EquivariantSection s{c.parse(us)};
        Expr r = ks_operator(f, s, y).u;
        CHECK(expr_equal(r, lifted_action(f, s, y).u, c.sampler()).equal);
        Expr via_nabla = imag_unit() * hbar() * connection_nabla(hamiltonian_vf(f, y.base()), s, y).u + f * s.u;
        CHECK(expr_equal(r, via_nabla, c.sampler()).equal);
      }
    }
  }
}

TEST_CASE("dirac axioms on the hamiltonian by section grid", "[circle][dirac][property]") {
  for (double h : {1.0, 0.37}) {
    auto y = plane_bundle();
    const DomainSampler s = y.chart().sampler().with_hbar(h);
    const Chart& c = y.chart();
    for (const auto& us : kSections) {
      EquivariantSection sec{c.parse(us)};
      CHECK(expr_equal(ks_operator(Expr(1), sec, y).u, sec.u, s).equal);
      for (const auto& fs : kHamiltonians)
        for (const auto& gs : kHamiltonians)
          CHECK(max_abs(dirac_defect(c.parse(fs), c.parse(gs), sec, y), s).equal);
    }
  }
}

TEST_CASE("curvature of the connection", "[circle][curvature]") {
  for (auto y : {plane_bundle(), punctured_bundle()}) {
    const Chart& c = y.chart();
    VectorField dp = VectorField::coordinate(c, 0);
    VectorField dq = VectorField::coordinate(c, 1);
    CHECK(max_abs(curvature_defect(dp, dq, EquivariantSection{Expr(1)}, y), c.sampler()).equal);
    VectorField u(c, {c.parse("q^2"), c.parse("sin(p)")});
    VectorField v(c, {c.parse("p*q"), c.parse("1")});
    for (const auto& us : kSections)
      CHECK(max_abs(curvature_defect(u, v, EquivariantSection{c.parse(us)}, y), c.sampler()).equal);
  }
  // A potential with d beta = -omega flips the curvature sign.
  Chart c = Chart::box({"p", "q"});
  auto broken = PrequantCircle::unchecked(SymplecticChart(c, parse_form("dp^dq", c)), parse_form("-p*dq", c));
  auto r = max_abs(curvature_defect(VectorField::coordinate(c, 0), VectorField::coordinate(c, 1),
                                    EquivariantSection{Expr(1)}, broken),
                   c.sampler());
  CHECK_FALSE(r.equal);
}
