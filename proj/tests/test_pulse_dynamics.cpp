// pulse-dynamics checks: the rotating-frame propagator against the two-level
// closed form, frame bookkeeping across composed pulses, selectivity, and
// sequence serialization

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "stmqc/chain.hpp"
#include "stmqc/evolve.hpp"
#include "stmqc/frequency_table.hpp"
#include "stmqc/hamiltonian.hpp"
#include "stmqc/pulse.hpp"
#include "stmqc/state.hpp"

using namespace stmqc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using cd = std::complex<double>;

namespace {

PulseSpec nuclear_pulse(double carrier, double rabi, double phase, double duration) {
  PulseSpec p;
  p.channel = Channel::nuclear;
  p.carrier_frequency = carrier;
  p.rabi_frequency = rabi;
  p.phase = phase;
  p.duration = duration;
  return p;
}

}  // namespace

TEST_CASE("pulse helpers") {
  REQUIRE(pi_pulse_duration(100.0) == 0.005);
  REQUIRE_THROWS_AS(pi_pulse_duration(0.0), std::invalid_argument);
  const PulseSpec p = pi_pulse(Channel::nuclear, 1.88e9, 168.125, 0.5);
  REQUIRE(is_pi_pulse(p));
  REQUIRE(p.phase == 0.5);
  PulseSpec longer = p;
  longer.duration *= 1.5;
  REQUIRE_FALSE(is_pi_pulse(longer));

  PulseSpec bad = p;
  bad.rabi_frequency = 0.0;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.duration = -1.0;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.carrier_frequency = 0.0;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("rabi frequency from drive field amplitude") {
  const IonSpecies te = te125();
  // electron channel: g_e mu_B b / h; 1 uT -> ~28 kHz
  REQUIRE_THAT(rabi_from_field(te, Channel::electron, 1e-6), WithinRel(2.7992489872e4, 1e-9));
  // nuclear channel: |gamma| b; 1 mT -> 13.45 kHz
  REQUIRE_THAT(rabi_from_field(te, Channel::nuclear, 1e-3), WithinRel(1.345e4, 1e-12));
  REQUIRE_THAT(rabi_from_field(te, Channel::nuclear, 2e-3),
               WithinRel(2.0 * rabi_from_field(te, Channel::nuclear, 1e-3), 1e-12));
  REQUIRE_THROWS_AS(rabi_from_field(te, Channel::nuclear, 0.0), std::invalid_argument);
}

TEST_CASE("free evolution applies diagonal phases and advances the clock") {
  const ChainConfig cfg = reference_config(1);
  ChainState s = all_ground_state(1);
  s.amplitudes(0) = 1.0 / std::sqrt(2.0);
  s.amplitudes(3) = cd(0.0, 1.0 / std::sqrt(2.0));

  const double tau = 3.7e-7;
  const ChainState out = evolve_free(s, tau, cfg);
  REQUIRE_THAT(out.time_s, WithinRel(tau, 1e-15));
  for (const std::int64_t idx : {0, 3}) {
    const cd expect =
        s.amplitudes(idx) * std::polar(1.0, -2.0 * oracles::kPi * basis_energy(cfg, idx) * tau);
    REQUIRE_THAT(std::abs(out.amplitudes(idx) - expect), WithinAbs(0.0, 1e-12));
  }
  REQUIRE_THAT(out.norm(), WithinRel(1.0, 1e-14));
  REQUIRE_THROWS_AS(evolve_free(s, -1.0, cfg), std::invalid_argument);

  ChainState wrong = all_ground_state(2);
  REQUIRE_THROWS_AS(evolve_free(wrong, tau, cfg), std::invalid_argument);
}

TEST_CASE("driven two-level dynamics match the closed form on a grid") {
  const ChainConfig cfg = reference_config(1);
  const double f0 = nuclear_transition_frequency(cfg, 0, {-0.5});
  const double f_r = 1e4;
  const double e_g = basis_energy(cfg, 0);
  const double e_e = basis_energy(cfg, 2);  // nucleus excited, electron ground

  double worst = 0.0;
  for (int di = 0; di <= 10; ++di) {
    const double delta = f_r * di;
    for (int tj = 1; tj <= 40; ++tj) {
      const double t = 4.0 * tj / 40.0 / f_r;
      const ChainState out =
          evolve_pulse(all_ground_state(1), nuclear_pulse(f0 + delta, f_r, 0.0, t), cfg);
      const Eigen::Matrix2cd u = oracles::two_level_pulse(e_g, e_e, f0 + delta, f_r, 0.0, 0.0, t);
      worst = std::max(worst, std::abs(out.amplitudes(0) - u(0, 0)));
      worst = std::max(worst, std::abs(out.amplitudes(2) - u(1, 0)));
      worst = std::max(worst,
                       std::abs(nuclear_excited_probability(out, 0) -
                                oracles::rabi_transfer(f_r, delta, t)));
      // the electron-excited manifold must stay empty
      REQUIRE(out.probability(1) <= 1e-24);
      REQUIRE(out.probability(3) <= 1e-24);
    }
  }
  INFO("max amplitude/probability deviation " << worst);
  REQUIRE(worst <= 1e-6);
}

TEST_CASE("drive phase sets the rotation axis as in the closed form") {
  const ChainConfig cfg = reference_config(1);
  const double f0 = nuclear_transition_frequency(cfg, 0, {-0.5});
  const double f_r = 500.0;
  const double e_g = basis_energy(cfg, 0);
  const double e_e = basis_energy(cfg, 2);

  ChainState start = all_ground_state(1);
  start.amplitudes(0) = 0.6;
  start.amplitudes(2) = cd(0.0, 0.8);

  for (const double phase : {0.0, 1.234, -2.1}) {
    const double tau = 1.0 / (4.0 * f_r);
    const ChainState out = evolve_pulse(start, nuclear_pulse(f0 + 210.0, f_r, phase, tau), cfg);
    const Eigen::Matrix2cd u =
        oracles::two_level_pulse(e_g, e_e, f0 + 210.0, f_r, phase, 0.0, tau);
    const cd a0 = u(0, 0) * start.amplitudes(0) + u(0, 1) * start.amplitudes(2);
    const cd a2 = u(1, 0) * start.amplitudes(0) + u(1, 1) * start.amplitudes(2);
    REQUIRE_THAT(std::abs(out.amplitudes(0) - a0), WithinAbs(0.0, 1e-6));
    REQUIRE_THAT(std::abs(out.amplitudes(2) - a2), WithinAbs(0.0, 1e-6));
  }
}

TEST_CASE("resonant pi-pulse inverts; synchronized detunings return exactly") {
  const ChainConfig cfg = reference_config(1);
  const double f0 = nuclear_transition_frequency(cfg, 0, {-0.5});
  const double f_r = 168.125;

  SECTION("on resonance") {
    const ChainState out =
        evolve_pulse(all_ground_state(1), pi_pulse(Channel::nuclear, f0, f_r), cfg);
    REQUIRE(nuclear_excited_probability(out, 0) >= 1.0 - 1e-10);
  }

  SECTION("zero-transfer condition delta = f_r sqrt(4m^2 - 1)") {
    for (const double m : {1.0, 2.0, 4.0}) {
      const double delta = f_r * std::sqrt(4.0 * m * m - 1.0);
      const ChainState out =
          evolve_pulse(all_ground_state(1), pi_pulse(Channel::nuclear, f0 + delta, f_r), cfg);
      REQUIRE(nuclear_excited_probability(out, 0) <= 1e-10);
    }
  }
}

TEST_CASE("composed pulses keep coherent absolute-time frames") {
  const ChainConfig cfg = reference_config(1);
  const double f0 = nuclear_transition_frequency(cfg, 0, {-0.5});
  const double f_r = 250.0;
  const double delta = 37.0;
  const double carrier = f0 + delta;
  const double tau_half = 1.0 / (4.0 * f_r);
  const double wait = 1.3e-3;
  const double e_g = basis_energy(cfg, 0);
  const double e_e = basis_energy(cfg, 2);

  for (const double phase2 : {0.0, oracles::kPi / 2.0}) {
    ChainState s = all_ground_state(1);
    s = evolve_pulse(s, nuclear_pulse(carrier, f_r, 0.0, tau_half), cfg);
    s = evolve_free(s, wait, cfg);
    s = evolve_pulse(s, nuclear_pulse(carrier, f_r, phase2, tau_half), cfg);
    REQUIRE_THAT(s.time_s, WithinRel(2.0 * tau_half + wait, 1e-12));

    const Eigen::Matrix2cd u = oracles::two_level_pulse(e_g, e_e, carrier, f_r, phase2,
                                                        tau_half + wait, tau_half) *
                               oracles::two_level_free(e_g, e_e, wait) *
                               oracles::two_level_pulse(e_g, e_e, carrier, f_r, 0.0, 0.0,
                                                        tau_half);
    REQUIRE_THAT(std::abs(s.amplitudes(0) - u(0, 0)), WithinAbs(0.0, 1e-6));
    REQUIRE_THAT(std::abs(s.amplitudes(2) - u(1, 0)), WithinAbs(0.0, 1e-6));
  }
}

TEST_CASE("norm drift stays below 1e-10 over a thousand operations") {
  const ChainConfig cfg = reference_config(2);
  const FrequencyTable t = build_frequency_table(cfg);
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ChainState s = all_ground_state(2);
  for (int i = 0; i < 1000; ++i) {
    PulseSpec p;
    if (i % 3 == 2) {
      p.channel = Channel::electron;
      p.carrier_frequency = t.f_e0[static_cast<std::size_t>(i % 2)] + (unit(gen) - 0.5) * 2e5;
      p.rabi_frequency = 1e5;
      p.duration = unit(gen) * 2e-5 + 1e-6;
    } else {
      p.channel = Channel::nuclear;
      p.carrier_frequency =
          t.f_n[static_cast<std::size_t>(i % 2)] + 1.75e9 + (unit(gen) - 0.5) * 4e3;
      p.rabi_frequency = 2e3;
      p.duration = unit(gen) * 2e-4 + 1e-6;
    }
    p.phase = unit(gen) * 2.0 * oracles::kPi;
    s = evolve_pulse(s, p, cfg);
  }
  REQUIRE_THAT(s.norm(), WithinAbs(1.0, 1e-10));
}

TEST_CASE("frequency-selective addressing: neighbor transfer bounded by the envelope") {
  const ChainConfig cfg = reference_config(2);
  const double delta_f_n = build_frequency_table(cfg).delta_f_n;
  const double carrier0 = nuclear_transition_frequency(cfg, 0, {-0.5, -0.5});

  double previous_envelope = 1.0;
  for (const double f_r : {3000.0, 1000.0, 300.0}) {
    const ChainState out =
        evolve_pulse(all_ground_state(2), pi_pulse(Channel::nuclear, carrier0, f_r), cfg);
    const double envelope = f_r * f_r / (f_r * f_r + delta_f_n * delta_f_n);
    REQUIRE(nuclear_excited_probability(out, 0) >= 0.99);
    REQUIRE(nuclear_excited_probability(out, 1) <= envelope * 1.05 + 1e-12);
    REQUIRE(envelope < previous_envelope);  // narrower drive, better selectivity
    previous_envelope = envelope;
  }

  SECTION("the 3 kHz working point") {
    const double envelope = 9e6 / (9e6 + delta_f_n * delta_f_n);
    REQUIRE_THAT(envelope, WithinAbs(0.166, 5e-3));
    REQUIRE(envelope < 0.2);
  }
}

TEST_CASE("electron-channel pulse flips the electron and leaves the nucleus") {
  const ChainConfig cfg = reference_config(1);
  const double f_e0 = electron_transition_frequency(cfg, 0, {-0.5});
  const ChainState out =
      evolve_pulse(all_ground_state(1), pi_pulse(Channel::electron, f_e0, 1e5), cfg);
  REQUIRE(electron_excited_probability(out, 0) >= 1.0 - 1e-9);
  REQUIRE(nuclear_excited_probability(out, 0) <= 1e-12);
}

TEST_CASE("run_sequence composes exactly like manual stepping") {
  const ChainConfig cfg = reference_config(1);
  const double f0 = nuclear_transition_frequency(cfg, 0, {-0.5});
  PulseSequence seq;
  seq.steps.emplace_back(pi_pulse(Channel::nuclear, f0, 200.0));
  seq.steps.emplace_back(FreeEvolution{1e-4});
  seq.steps.emplace_back(pi_pulse(Channel::nuclear, f0 + 50.0, 200.0, 0.3));

  const ChainState via_sequence = run_sequence(all_ground_state(1), seq, cfg);
  ChainState manual = all_ground_state(1);
  manual = evolve_pulse(manual, std::get<PulseSpec>(seq.steps[0]), cfg);
  manual = evolve_free(manual, 1e-4, cfg);
  manual = evolve_pulse(manual, std::get<PulseSpec>(seq.steps[2]), cfg);

  REQUIRE((via_sequence.amplitudes - manual.amplitudes).norm() == 0.0);
  REQUIRE(via_sequence.time_s == manual.time_s);
  REQUIRE_THAT(seq.total_duration(), WithinRel(pi_pulse_duration(200.0) * 2.0 + 1e-4, 1e-15));
}

TEST_CASE("sequence text round-trips at 17 significant digits") {
  PulseSequence seq;
  seq.steps.emplace_back(nuclear_pulse(1884499887.7381079, oracles::kPi, 1.0 / 3.0,
                                       1.2345678901234567e-5));
  seq.steps.emplace_back(FreeEvolution{2.5e-3});
  seq.steps.emplace_back(pi_pulse(Channel::electron, 2.7992489872e11, 1e5, -0.25));

  std::ostringstream first;
  write_sequence(first, seq);
  std::istringstream in(first.str());
  const PulseSequence back = read_sequence(in);
  REQUIRE(back.steps.size() == 3);
  const auto& p = std::get<PulseSpec>(back.steps[0]);
  const auto& q = std::get<PulseSpec>(seq.steps[0]);
  REQUIRE(p.carrier_frequency == q.carrier_frequency);
  REQUIRE(p.rabi_frequency == q.rabi_frequency);
  REQUIRE(p.phase == q.phase);
  REQUIRE(p.duration == q.duration);
  REQUIRE(std::get<FreeEvolution>(back.steps[1]).duration == 2.5e-3);
  REQUIRE(std::get<PulseSpec>(back.steps[2]).channel == Channel::electron);

  std::ostringstream second;
  write_sequence(second, back);
  REQUIRE(second.str() == first.str());
}

TEST_CASE("sequence parse errors name the offending line") {
  const auto expect_error = [](const char* text, const char* needle) {
    std::istringstream in(text);
    try {
      read_sequence(in);
      FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
      REQUIRE(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error("# ok\npulse nuclear oops 1 0 1\n", "line 2");
  expect_error("delay -1\n", "line 1");
  expect_error("wiggle 3\n", "unknown step kind");
  expect_error("pulse muon 1e9 100 0 1e-3\n", "unknown channel");

  std::istringstream ok("# comment\n\npulse nuclear 1e9 100 0 1e-3\ndelay 0\n");
  REQUIRE(read_sequence(ok).steps.size() == 2);
}

TEST_CASE("evolve_pulse rejects mismatched or invalid inputs") {
  const ChainConfig cfg = reference_config(2);
  const ChainState one = all_ground_state(1);
  REQUIRE_THROWS_AS(evolve_pulse(one, pi_pulse(Channel::nuclear, 1.88e9, 100.0), cfg),
                    std::invalid_argument);
  PulseSpec bad = pi_pulse(Channel::nuclear, 1.88e9, 100.0);
  bad.duration = 0.0;
  REQUIRE_THROWS_AS(evolve_pulse(all_ground_state(2), bad, cfg), std::invalid_argument);
}
