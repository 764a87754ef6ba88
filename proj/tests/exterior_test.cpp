#include <catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "gqw/exterior.hpp"

using namespace gqw;

namespace {

Chart plane() { return Chart::box({"p", "q"}); }

Chart punctured() {
  return Chart::box({"p", "q"}, 2.0, {parse_expr("p^2 + q^2 - 1/100", std::vector<std::string>{"p", "q"})});
}

Chart r3() { return Chart::box({"x", "y", "z"}, 1.5); }

KForm F(const std::string& s, const Chart& c) { return parse_form(s, c); }

VectorField V(const Chart& c, const std::vector<std::string>& comps) {
  std::vector<Expr> e;
  for (const auto& s : comps) e.push_back(c.parse(s));
  return {c, std::move(e)};
}

const std::vector<std::string> kScalars{
    "p^2 + q^2", "sin(p*q)", "exp(p)*cos(q)", "1/2*(p*q - q^3)", "(p + q)^3", "sqrt(p^2 + q^2 + 1)",
    "p/(q^2 + 1)", "cos(p)^2 + sin(q)*p", "exp(-p^2)*sin(2*q)",
};

const std::vector<std::string> kOneForms{
    "1/2*(p*dq - q*dp)", "p^2*dq", "sin(q)*dp + exp(p)*dq", "(p + q)^2*dp - p*q*dq",
};

const std::vector<std::vector<std::string>> kFields{
    {"1", "0"}, {"q", "-p"}, {"p*q", "sin(p)"}, {"exp(q)", "p^2 - q"}, {"cos(p*q)", "q^3"},
};

}  // namespace

TEST_CASE("charts validate their coordinates", "[exterior][chart]") {
  CHECK_THROWS_AS(Chart::box({"p", "p"}), ValidationError);
  CHECK_THROWS_AS(Chart::box({"a", "b", "c", "d", "e", "f", "g"}), ValidationError);
  CHECK_THROWS_AS(Chart::box({"hbar"}), ValidationError);
  CHECK_THROWS_AS(Chart({"p", "q"}, DomainSampler({"p"}, {{-1, 1}})), ValidationError);
  CHECK(plane().dimension() == 2);
  CHECK(plane().index_of("q") == 1);
}

TEST_CASE("form literals", "[exterior][parse]") {
  Chart c = plane();
  KForm w = F("dp^dq", c);
  REQUIRE(w.degree() == 2);
  CHECK(w.coefficients()[0] == Expr(1));
  CHECK(F("dq^dp", c).coefficients()[0] == Expr(-1));
  CHECK(F("dp^dp", c).is_zero());

  KForm beta = F("1/2*(p*dq - q*dp)", c);
  REQUIRE(beta.degree() == 1);
  CHECK(beta.coefficients()[0] == c.parse("-1/2*q"));
  CHECK(beta.coefficients()[1] == c.parse("1/2*p"));

  CHECK(F("p^2 + q", c).degree() == 0);
  CHECK(F("dp/2 + 0", c).coefficients()[0] == Expr(Rational(1, 2)));
  CHECK(parse_form(to_string(beta), c).coefficients() == beta.coefficients());

  CHECK_THROWS_AS(F("dp*dq", c), ParseError);
  CHECK_THROWS_AS(F("dp + p", c), ParseError);
  CHECK_THROWS_AS(F("sin(dp)", c), ParseError);
  CHECK_THROWS_AS(F("p/dq", c), ParseError);
  CHECK_THROWS_AS(F("dx", c), UnknownSymbolError);
  CHECK_THROWS_AS(F("dx^dy^dz", r3()), UnsupportedDegreeError);
}

TEST_CASE("exterior derivative examples", "[exterior][d]") {
  Chart c = punctured();
  auto r = forms_equal(exterior_derivative(F("1/2*(p*dq - q*dp)", c)), F("dp^dq", c));
  CHECK(r.equal);
  CHECK(r.structural);
  CHECK(exterior_derivative(F("7", c)).is_zero());
  CHECK(exterior_derivative(exterior_derivative(F("sin(p*q)", c))).is_zero());
  KForm dw = exterior_derivative(F("dp^dq", c));
  CHECK(dw.degree() == 3);
  CHECK(dw.is_zero());
  CHECK_THROWS_AS(exterior_derivative(dw), UnsupportedDegreeError);
}

TEST_CASE("d squares to zero on the corpus", "[exterior][d][property]") {
  Chart c = plane();
  for (const auto& s : kScalars) {
    INFO(s);
    CHECK(forms_equal(exterior_derivative(exterior_derivative(F(s, c))), KForm::zero(c, 2)).equal);
  }
  Chart c3 = r3();
  for (const auto& s : {"x*y*dz + sin(z)*dx", "exp(x*y)*dy - z^2*dx", "x*dy^dz + y^2*dz^dx"}) {
    KForm a = F(s, c3);
    INFO(s);
    if (a.degree() == 1) CHECK(forms_equal(exterior_derivative(exterior_derivative(a)), KForm::zero(c3, 3)).equal);
    else CHECK_NOTHROW(exterior_derivative(a));
  }
  // d(x dy^dz) = dx^dy^dz.
  CHECK(exterior_derivative(F("x*dy^dz", c3)).coefficients()[0] == Expr(1));
}

TEST_CASE("interior product examples", "[exterior][interior]") {
  Chart c = plane();
  KForm w = F("dp^dq", c);
  VectorField v = V(c, {"2*q", "-2*p"});
  KForm res = interior_product(v, w);
  CHECK(forms_equal(res, F("2*q*dq + 2*p*dp", c)).equal);
  CHECK(forms_equal(res, exterior_derivative(F("p^2 + q^2", c))).equal);
  CHECK_THROWS_AS(interior_product(v, F("p", c)), UnsupportedDegreeError);
  CHECK(interior_product(VectorField::coordinate(c, 0), F("dq", c)).scalar().is_zero());
  CHECK_THROWS_AS(interior_product(VectorField::coordinate(r3(), 0), w), ChartMismatchError);

  for (const auto& comps : kFields) {
    VectorField u = V(c, comps);
    CHECK(interior_product(u, interior_product(u, w)).scalar().is_zero());
  }
  Chart c3 = r3();
  VectorField u3 = V(c3, {"y", "z*x", "1"});
  KForm a3 = F("x*dy^dz + y^2*dz^dx + dx^dy", c3);
  CHECK(forms_equal(interior_product(u3, interior_product(u3, a3)), KForm::zero(c3, 0)).equal);
}

TEST_CASE("lie bracket examples and properties", "[exterior][bracket]") {
  Chart c = plane();
  CHECK(lie_bracket(VectorField::coordinate(c, 0), VectorField::coordinate(c, 1)).is_zero());
  VectorField b = lie_bracket(V(c, {"0", "p"}), V(c, {"q", "0"}));
  CHECK(fields_equal(b, V(c, {"p", "-q"})).equal);

  for (std::size_t a = 0; a < kFields.size(); ++a) {
    for (std::size_t d = 0; d < kFields.size(); ++d) {
      VectorField u = V(c, kFields[a]);
      VectorField v = V(c, kFields[d]);
      CHECK(fields_equal(lie_bracket(u, v), Expr(-1) * lie_bracket(v, u)).equal);
    }
  }
  for (std::size_t a = 0; a + 2 < kFields.size(); ++a) {
    VectorField x = V(c, kFields[a]);
    VectorField y = V(c, kFields[a + 1]);
    VectorField z = V(c, kFields[a + 2]);
    VectorField jac = lie_bracket(x, lie_bracket(y, z)) + lie_bracket(y, lie_bracket(z, x)) +
                      lie_bracket(z, lie_bracket(x, y));
    CHECK(fields_equal(jac, VectorField::zero(c)).equal);
  }
}

TEST_CASE("lie bracket matches the numeric flow commutator", "[exterior][bracket][oracle]") {
  Chart c = plane();
  auto pts = c.sampler().with_samples(8).points();
  for (std::size_t a = 0; a < kFields.size(); ++a) {
    for (std::size_t d = a + 1; d < kFields.size(); ++d) {
      VectorField u = V(c, kFields[a]);
      VectorField v = V(c, kFields[d]);
      NumericField br(lie_bracket(u, v));
      NumericField nu(u);
      NumericField nv(v);
      for (const auto& pt : pts) {
        Eigen::VectorXd x = point_of(c, pt);
        Eigen::VectorXd oracle = flow_commutator(nu, nv, x, 1e-3);
        CHECK((oracle - br(x)).norm() <= 1e-4 * std::max(1.0, br(x).norm()));
      }
    }
  }
}

TEST_CASE("lie derivative examples", "[exterior][lie]") {
  Chart c = plane();
  VectorField xi = V(c, {"p", "-q"});  // Hamiltonian field of p*q for dp^dq
  CHECK(lie_derivative(xi, F("dp^dq", c)).is_zero());
  CHECK(forms_equal(lie_derivative(VectorField::coordinate(c, 0), F("p*dq", c)), F("dq", c)).equal);

  for (const auto& comps : kFields) {
    VectorField v = V(c, comps);
    for (const auto& s : kScalars) {
      KForm f = F(s, c);
      auto r = forms_equal(lie_derivative(v, exterior_derivative(f)), exterior_derivative(lie_derivative(v, f)));
      CHECK(r.equal);
    }
  }
}

TEST_CASE("cartan formula agrees with the pullback-under-flow oracle", "[exterior][lie][oracle]") {
  Chart c = plane();
  auto pts = c.sampler().with_samples(6).points();
  std::vector<std::string> forms = kOneForms;
  forms.emplace_back("(p^2 + 1)*dp^dq");
  forms.emplace_back("sin(p*q)");
  for (const auto& comps : kFields) {
    VectorField v = V(c, comps);
    for (const auto& s : forms) {
      KForm a = F(s, c);
      KForm sym = lie_derivative(v, a);
      for (const auto& pt : pts) {
        auto oracle = flow_lie_derivative(v, a, point_of(c, pt), 1e-4);
        for (std::size_t k = 0; k < oracle.size(); ++k) {
          double exact = evaluate(sym.coefficients()[k], pt).real();
          INFO(s << " component " << k);
          CHECK(std::abs(exact - oracle[k]) <= 1e-5 * std::max(1.0, std::abs(exact)));
        }
      }
    }
  }
}

TEST_CASE("pullback examples and functoriality", "[exterior][pullback]") {
  Chart c = punctured();
  Expr p = symbol("p");
  Expr q = symbol("q");
  // Rotation by the angle with cos = 3/5, sin = 4/5.
  ChartMap rot(c, c, {Rational(3, 5) * p - Rational(4, 5) * q, Rational(4, 5) * p + Rational(3, 5) * q});
  CHECK(forms_equal(pullback(rot, F("dp^dq", c)), F("dp^dq", c)).equal);
  CHECK(forms_equal(pullback(rot, F("1/2*(p*dq - q*dp)", c)), F("1/2*(p*dq - q*dp)", c)).equal);

  ChartMap id = ChartMap::identity(c);
  for (const auto& s : kOneForms) CHECK(forms_equal(pullback(id, F(s, c)), F(s, c)).equal);

  ChartMap phi(c, c, {p + sin(q), q});
  ChartMap psi(c, c, {p, q + Rational(1, 3) * p * p});
  for (const auto& s : kOneForms) {
    KForm a = F(s, c);
    INFO(s);
    CHECK(forms_equal(pullback(compose(phi, psi), a), pullback(psi, pullback(phi, a))).equal);
    CHECK(forms_equal(pullback(phi, exterior_derivative(a)), exterior_derivative(pullback(phi, a))).equal);
  }
  for (const auto& s : kScalars) {
    KForm f = F(s, c);
    CHECK(forms_equal(pullback(psi, exterior_derivative(f)), exterior_derivative(pullback(psi, f))).equal);
  }
  CHECK_THROWS_AS(pullback(phi, F("dx", r3())), ChartMismatchError);
  CHECK_THROWS_AS(ChartMap(c, c, {p}), ChartMismatchError);
}
