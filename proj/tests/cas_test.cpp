#include <catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "gqw/cas.hpp"

using namespace gqw;

namespace {

const std::vector<std::string> kVocab{"p", "q"};

Expr P(const std::string& s) { return parse_expr(s, kVocab); }

DomainSampler plane(std::uint64_t seed = 42) {
  return DomainSampler({"p", "q"}, {{-2, 2}, {-2, 2}}, {}, seed);
}

DomainSampler punctured(std::uint64_t seed = 42) {
  return DomainSampler({"p", "q"}, {{-2, 2}, {-2, 2}}, {P("p^2 + q^2")}, seed);
}

const std::vector<std::string> kCorpus{
    "p^2 + q^2",        "sin(p*q)",           "exp(p)*cos(q)",       "1/2*(p*q - q^3)",
    "(p + q)^3",        "sqrt(p^2 + q^2 + 1)", "p/(q^2 + 1)",         "hbar*i*p + pi*q",
    "cos(p)^2 + sin(q)*p", "exp(-p^2)*sin(2*q)", "(1 + p*q)^(-2)",     "0.25*p - q/3",
};

}  // namespace

TEST_CASE("parse maps the grammar onto canonical trees", "[cas][parse]") {
  Expr e = P("p^2 + q^2");
  REQUIRE(e.is(Kind::Add));
  REQUIRE(e.args().size() == 2);
  CHECK(e.args()[0] == pow(symbol("p"), Rational(2)));
  CHECK(e.args()[1] == pow(symbol("q"), Rational(2)));

  // Products distribute over sums in canonical form.
  Expr half = P("1/2*(p^2+q^2)");
  CHECK(half == mul({Expr(Rational(1, 2)), add({pow(symbol("p"), 2), pow(symbol("q"), 2)})}));
  CHECK(half == add({mul({Expr(Rational(1, 2)), pow(symbol("p"), 2)}),
                     mul({Expr(Rational(1, 2)), pow(symbol("q"), 2)})}));

  CHECK(P("0.5") == Expr(Rational(1, 2)));
  CHECK(P("123/456") == Expr(Rational(41, 152)));
  CHECK(P("-p^2") == -pow(symbol("p"), 2));
  CHECK(P("2^3^2") == Expr(512));
  CHECK(P("p - q - p") == -symbol("q"));
  CHECK(P("i*i") == Expr(-1));
  CHECK(P("1/i") == -imag_unit());
  CHECK(P("sqrt(4)") == Expr(2));
}

TEST_CASE("parse reports syntax errors with offsets and unknown symbols by name", "[cas][parse]") {
  try {
    (void)P("(p*dq - q*dp)");
    FAIL("expected an unknown-symbol error");
  } catch (const UnknownSymbolError& e) {
    CHECK(e.symbol() == "dq");
  }
  try {
    (void)P("(p*dq... ");
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
  }
  CHECK_THROWS_AS(P("(p + q"), ParseError);
  CHECK_THROWS_AS(P("p +"), ParseError);
  CHECK_THROWS_AS(P(""), ParseError);
  CHECK_THROWS_AS(P("p q"), ParseError);
  CHECK_THROWS_AS(P("p^q"), ParseError);
  CHECK_THROWS_AS(P("tan(p)"), ParseError);
  CHECK_THROWS_AS(P("p/0"), ParseError);
}

TEST_CASE("parse-print-parse is a fixed point", "[cas][parse][property]") {
  for (const auto& text : kCorpus) {
    Expr e = P(text);
    std::string printed = to_string(e);
    INFO(text << " -> " << printed);
    Expr again = P(printed);
    CHECK(again == e);
    CHECK(to_string(again) == printed);
  }
}

TEST_CASE("simplify is idempotent", "[cas][simplify][property]") {
  for (const auto& text : kCorpus) {
    Expr e = P(text);
    Expr s1 = simplify(e);
    CHECK(simplify(s1) == s1);
    CHECK(s1 == e);
  }
}

TEST_CASE("canonical simplification rules", "[cas][simplify]") {
  Expr p = symbol("p");
  Expr q = symbol("q");
  CHECK(P("(p+q)^2") == P("p^2 + 2*p*q + q^2"));
  CHECK(P("sin(p)^2 + cos(p)^2") == Expr(1));
  CHECK(P("3*q*sin(p*q)^2 + 3*q*cos(p*q)^2") == 3 * q);
  CHECK(P("p*p^(-1)") == Expr(1));
  CHECK(P("(p^2+q^2)*(p^2+q^2)^(-1)") == Expr(1));
  CHECK(P("sin(-p)") == -sin(p));
  CHECK(P("cos(-p)") == cos(p));
  CHECK(P("(2*p + 2*q)^(-1)") == P("1/2*(p+q)^(-1)"));
  CHECK(P("(-p - q)^(-1)") == P("-(p+q)^(-1)"));
  CHECK(P("exp(0) + sin(0) + cos(0)") == Expr(2));
}

TEST_CASE("rational literals are exact with overflow detection", "[cas][rational]") {
  CHECK(Rational(6, -4) == Rational(-3, 2));
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
  CHECK(Rational(2).pow(-3) == Rational(1, 8));
  CHECK_THROWS_AS(Rational(INT64_MAX) * Rational(2), OverflowError);
  CHECK_THROWS_AS(Rational(1, 0), EvalError);
  CHECK(Rational(9, 4).exact_root(2) == Rational(3, 2));
  CHECK_FALSE(Rational(2).exact_root(2).has_value());
}

TEST_CASE("differentiate follows the power and chain rules", "[cas][diff]") {
  CHECK(differentiate(P("p^2 + q^2"), "p") == P("2*p"));
  CHECK(differentiate(P("sin(p*q)"), "q") == P("p*cos(p*q)"));
  CHECK(differentiate(P("7 + hbar*pi"), "p") == Expr(0));
  CHECK(differentiate(P("exp(p*q)"), "p") == P("q*exp(p*q)"));
  CHECK(differentiate(P("sqrt(p)"), "p") == P("1/2*p^(-1/2)"));
  CHECK(differentiate(P("cos(p)"), "p") == P("-sin(p)"));
}

TEST_CASE("mixed partial derivatives agree structurally", "[cas][diff][property]") {
  for (const auto& text : kCorpus) {
    Expr e = P(text);
    Expr pq = differentiate(differentiate(e, "p"), "q");
    Expr qp = differentiate(differentiate(e, "q"), "p");
    INFO(text);
    CHECK(pq == qp);
  }
}

TEST_CASE("symbolic derivatives match central finite differences", "[cas][diff][oracle]") {
  const double h = 1e-5;
  auto pts = plane(7).with_samples(32).points();
  for (const auto& text : kCorpus) {
    Expr e = P(text);
    for (const std::string v : {"p", "q"}) {
      Expr d = differentiate(e, v);
      for (const auto& pt : pts) {
        Bindings plus = pt;
        Bindings minus = pt;
        plus.values[v] += h;
        minus.values[v] -= h;
        Complex fd = (evaluate(e, plus) - evaluate(e, minus)) / (2 * h);
        Complex sym = evaluate(d, pt);
        INFO(text << " d/d" << v);
        CHECK(std::abs(sym - fd) <= 1e-6 * std::max(1.0, std::abs(sym)));
      }
    }
  }
}

TEST_CASE("differentiate is linear and satisfies the product rule", "[cas][diff][property]") {
  for (std::size_t a = 0; a < kCorpus.size(); ++a) {
    for (std::size_t b = a; b < kCorpus.size(); b += 3) {
      Expr f = P(kCorpus[a]);
      Expr g = P(kCorpus[b]);
      auto r1 = expr_equal(differentiate(f + 3 * g, "p"),
                           differentiate(f, "p") + 3 * differentiate(g, "p"), plane());
      auto r2 = expr_equal(differentiate(f * g, "q"),
                           differentiate(f, "q") * g + f * differentiate(g, "q"), plane());
      CHECK(r1.equal);
      CHECK(r2.equal);
    }
  }
}

TEST_CASE("expr_equal examples", "[cas][equal]") {
  auto r = expr_equal(P("(p+q)^2"), P("p^2 + 2*p*q + q^2"), punctured());
  CHECK(r.equal);
  CHECK(r.residual == 0.0);
  CHECK(r.structural);

  auto distinct = expr_equal(P("p"), P("q"), punctured());
  CHECK_FALSE(distinct.equal);
  CHECK(distinct.residual > 0.1);

  // Coefficient of d(1/2(p dq - q dp)) against dp^dq.
  Expr coeff = differentiate(P("1/2*p"), "p") - differentiate(P("-1/2*q"), "q");
  CHECK(expr_equal(coeff, Expr(1), punctured()).equal);

  // Identities beyond the canonical form are settled by sampling.
  auto sampled = expr_equal(P("sin(2*p)"), P("2*sin(p)*cos(p)"), plane());
  CHECK(sampled.equal);
  CHECK_FALSE(sampled.structural);
  CHECK(sampled.n_samples == 32);
}

TEST_CASE("expr_equal is reflexive, symmetric and deterministic", "[cas][equal][property]") {
  for (const auto& a : kCorpus) {
    CHECK(expr_equal(P(a), P(a), plane()).equal);
    for (const auto& b : kCorpus) {
      auto ab = expr_equal(P(a), P(b), plane(3));
      auto ba = expr_equal(P(b), P(a), plane(3));
      auto ab2 = expr_equal(P(a), P(b), plane(3));
      CHECK(ab.equal == ba.equal);
      CHECK(ab.residual == ab2.residual);
    }
  }
}

TEST_CASE("evaluation errors trigger resampling", "[cas][equal]") {
  // sqrt(p) is undefined for p < 0: those points are redrawn.
  auto r = expr_equal(P("sqrt(p)^2"), P("p"), DomainSampler({"p"}, {{-1, 1}}));
  CHECK(r.equal);
  // No point of the box is admissible: the cap is reached.
  CHECK_THROWS_AS(max_abs(P("sqrt(-1 - p^2)"), DomainSampler({"p"}, {{-1, 1}})),
                  NumericError);
}

TEST_CASE("sampler points respect the domain with margin and are deterministic", "[cas][sampler]") {
  DomainSampler s({"p", "q"}, {{-1, 1}, {-1, 1}}, {P("p^2 + q^2 - 1/4")}, 11, 200);
  auto a = s.points();
  auto b = s.points();
  REQUIRE(a.size() == 200);
  for (std::size_t k = 0; k < a.size(); ++k) {
    double r2 = std::norm(a[k].values.at("p")) + std::norm(a[k].values.at("q"));
    CHECK(r2 - 0.25 > s.tolerance());
    CHECK(a[k].values.at("p") == b[k].values.at("p"));
  }
  DomainSampler empty({"p"}, {{-1, 1}}, {P("-1 - p^2")});
  CHECK_THROWS_AS(empty.points(), ValidationError);
}

TEST_CASE("evaluate binds hbar and complex constants", "[cas][eval]") {
  Bindings b;
  b.set("p", 2.0);
  b.hbar = 0.5;
  CHECK(evaluate(P("hbar*p"), b) == Complex(1.0, 0.0));
  CHECK(std::abs(evaluate(P("exp(i*pi)"), b) - Complex(-1.0, 0.0)) < 1e-15);
  b.set("p", 0.0);
  CHECK_THROWS_AS(evaluate(P("p^(-1)"), b), EvalError);
  CHECK_THROWS_AS(evaluate(P("q"), b), EvalError);
}
