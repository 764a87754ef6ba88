// The double cover, the loop mu and the structured lift E(f) on M x Mp^c.

#include <iostream>

#include "gqw/mpc_prequant.hpp"

int main() {
  using namespace gqw;
  MpElement half = exp_mp(MpcAlgebra::rotation_generator(), 2 * kPi);
  MpElement full = exp_mp(MpcAlgebra::rotation_generator(), 4 * kPi);
  std::cout << "R(2 pi) lifts to sheet " << half.sheet << ", R(4 pi) to sheet " << full.sheet << '\n';

  MpcElement a{SpElement::rotation(2 * kPi / 3), std::polar(1.0, 0.3)};
  MpcElement sq = mpc_mul(a, a);
  std::cout << "eta(a^2) = " << eta(sq) << ", eta(a)^2 = " << eta(a) * eta(a) << '\n';

  MpcPrequant p = MpcPrequant::punctured_plane();
  StructuredVF z = E_mpc(p.chart().parse("p*q"), p);
  std::cout << "E(pq): base " << to_string(z.base) << ", tau_R = " << to_string(z.right_phase) << '\n';
  std::cout << "F(E(pq)) = " << to_string(F_mpc(z, p)) << '\n';

  ExampleA1Report a1 = example_A1(p);
  std::cout << "a1: gamma residual " << a1.gamma_residual << ", frames over one fiber differ by "
            << a1.t0_vs_eighth << '\n';
}
