// Prequantum operators on the punctured plane.

#include <iostream>

#include "gqw/circle_prequant.hpp"

int main() {
  using namespace gqw;
  Chart c = Chart::box({"p", "q"}, 2.0, {parse_expr("p^2 + q^2 - 1/100", std::vector<std::string>{"p", "q"})});
  PrequantCircle y(SymplecticChart(c, parse_form("dp^dq", c)), parse_form("1/2*(p*dq - q*dp)", c));

  Expr f = c.parse("p");
  Expr g = c.parse("q");
  EquivariantSection u{c.parse("exp(p)*cos(q)")};

  CircleLiftedVF e = E_circle(f, y);
  std::cout << "E(p)      = " << to_string(e.base) << " + (" << to_string(e.fiber) << ") d_{2 pi i}\n";
  std::cout << "F(E(p))   = " << to_string(F_circle(e, y)) << '\n';
  std::cout << "r(p) u    = " << to_string(ks_operator(f, u, y).u) << '\n';

  auto defect = max_abs(dirac_defect(f, g, u, y), c.sampler());
  std::cout << "[r(p), r(q)] - i hbar r({p,q}) vanishes: " << (defect.equal ? "yes" : "no") << '\n';
}
