// Brackets and Hamiltonian fields on the plane.

#include <iostream>

#include "gqw/symplectic.hpp"

int main() {
  using namespace gqw;
  Chart c = Chart::box({"p", "q"});
  SymplecticChart s(c, parse_form("dp^dq", c));

  Expr h = c.parse("1/2*(p^2 + q^2)");
  Expr l = c.parse("p*q");
  std::cout << "xi_h      = " << to_string(hamiltonian_vf(h, s)) << '\n';
  std::cout << "{h, pq}   = " << to_string(poisson(h, l, s)) << '\n';

  auto lemma = verify_bracket_lemma(h, l, s);
  std::cout << "[xi_h, xi_pq] = xi_{h,pq}: " << (lemma.result.equal ? "yes" : "no") << '\n';

  Expr j = jacobiator(h, l, c.parse("p^3 - q"), s);
  std::cout << "jacobiator canonicalizes to " << to_string(j) << '\n';
}
