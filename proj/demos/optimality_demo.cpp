// The optimality kernel on S^2: its eigenvalue blocks n^(-2n-1), the
// normalized decay envelope, and the series that converges for alpha_n = 0
// but diverges for the scaled-root exponent.

#include <iostream>

#include "spherespec/spherespec.hpp"

using namespace spherespec;

int main() {
  const Precision p{256};
  const int m = 2;
  const auto e = expand(Optimality{}, m, 100, p);
  const auto s = eigenvalue_blocks(e);

  std::cout << "level  value                      multiplicity\n";
  for (unsigned long n = 0; n <= 6; ++n) {
    const auto& b = s.blocks()[n];
    std::cout << "  " << b.level << "    " << b.value.to_decimal(20) << "   " << b.multiplicity.get_str() << '\n';
  }

  const auto env = decay_envelope_check(s, run_end_indices(s, BigInt(10000)), p);
  std::cout << "\nenvelope s_n n^(sqrt(n)/4) at run ends:\n";
  for (std::size_t i = 0; i < env.values.size(); i += 20) {
    std::cout << "  n = " << env.values[i].first.get_str() << ": " << env.values[i].second.to_decimal(6) << '\n';
  }
  std::cout << "  decreasing beyond window: " << (env.monotone_beyond_window ? "yes" : "no") << '\n';

  const auto conv = series_eval(s, ExponentZero{}, {100, 1000, 10000}, p);
  std::cout << "\nalpha = 0: " << to_string(conv.verdict) << ", sum = " << conv.partial_sums.back().to_decimal(20)
            << '\n';

  const auto dp = divergence_parameters(m, 0.9, p);
  const auto div = series_eval(s, ExponentScaledRoot{dp.kappa}, {100, 1000, 10000}, p);
  std::cout << "beta_n = " << dp.kappa.to_decimal(8) << " sqrt(n): " << to_string(div.verdict);
  if (div.first_term_above_one) std::cout << " (term > 1 at index " << *div.first_term_above_one << ")";
  std::cout << '\n';
}
