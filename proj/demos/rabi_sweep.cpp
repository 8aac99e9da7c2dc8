// sweep a nuclear pi-pulse's carrier across the site-0 resonance of a single
// ion and print the transfer probability: the generalized-Rabi lineshape that
// makes frequency-selective addressing work

#include <iostream>

#include "stmqc/stmqc.hpp"

int main() {
  using namespace stmqc;
  ChainConfig chain = reference_config(1);
  const double f_r = 168.125;
  const std::vector<double> sz = {-0.5};
  const double f0 = nuclear_transition_frequency(chain, 0, sz);

  std::cout << "detuning_hz,transfer_probability\n";
  for (int i = -40; i <= 40; ++i) {
    const double detuning = 25.0 * i;
    const PulseSpec p = pi_pulse(Channel::nuclear, f0 + detuning, f_r);
    const ChainState out = evolve_pulse(all_ground_state(1), p, chain);
    std::cout << detuning << ',' << nuclear_excited_probability(out, 0) << "\n";
  }
  return 0;
}
