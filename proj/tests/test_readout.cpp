// readout checks: fft against the direct dft, deterministic noise synthesis,
// periodogram classification of the two electron lines, and the projective
// nuclear measurement built on top

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "stmqc/chain.hpp"
#include "stmqc/fft.hpp"
#include "stmqc/frequency_table.hpp"
#include "stmqc/readout.hpp"
#include "stmqc/rng.hpp"
#include "stmqc/state.hpp"

using namespace stmqc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using cd = std::complex<double>;

namespace {

ReadoutParams clean_params() {
  ReadoutParams p;
  p.modulation_depth = 0.1;
  p.noise_sigma = 0.0;
  return p;
}

}  // namespace

TEST_CASE("next_pow2") {
  REQUIRE(next_pow2(1) == 1);
  REQUIRE(next_pow2(2) == 2);
  REQUIRE(next_pow2(3) == 4);
  REQUIRE(next_pow2(1000) == 1024);
  REQUIRE(next_pow2(16384) == 16384);
}

TEST_CASE("fft matches the direct transform") {
  SeededRng rng(123);
  for (const std::size_t n : {std::size_t{2}, std::size_t{8}, std::size_t{64}, std::size_t{256}}) {
    std::vector<cd> x(n);
    for (auto& v : x) v = cd(rng.uniform() - 0.5, rng.uniform() - 0.5);
    const std::vector<cd> expect = oracles::naive_dft(x);
    std::vector<cd> got = x;
    fft_inplace(got);
    double scale = 0.0;
    for (const auto& v : expect) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < n; ++k)
      REQUIRE(std::abs(got[k] - expect[k]) <= 1e-10 * scale);
  }

  SECTION("impulse gives a flat spectrum") {
    std::vector<cd> x(16, 0.0);
    x[0] = 1.0;
    fft_inplace(x);
    for (const auto& v : x) REQUIRE(std::abs(v - 1.0) <= 1e-14);
  }

  SECTION("length must be a power of two") {
    std::vector<cd> bad(12, 0.0);
    REQUIRE_THROWS_AS(fft_inplace(bad), std::invalid_argument);
    std::vector<cd> empty;
    REQUIRE_THROWS_AS(fft_inplace(empty), std::invalid_argument);
  }
}

TEST_CASE("seeded generator is deterministic with sane moments") {
  SeededRng a(7), b(7), c(8);
  bool all_equal = true, any_differs = false;
  for (int i = 0; i < 32; ++i) {
    const double va = a.uniform();
    all_equal = all_equal && va == b.uniform();
    any_differs = any_differs || va != c.uniform();
    REQUIRE(va >= 0.0);
    REQUIRE(va < 1.0);
  }
  REQUIRE(all_equal);
  REQUIRE(any_differs);

  SeededRng g(99);
  double sum = 0.0, sum2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = g.gaussian();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  REQUIRE_THAT(mean, WithinAbs(0.0, 0.02));
  REQUIRE_THAT(var, WithinAbs(1.0, 0.03));
}

TEST_CASE("trace synthesis is seed-deterministic and guards the alias limit") {
  const ReadoutParams p = clean_params();
  const ReadoutTrace t1 = synthesize_trace(2.0e9, 0.1, 0.5, p.duration(), p.sample_rate, 1.5e9, 42);
  const ReadoutTrace t2 = synthesize_trace(2.0e9, 0.1, 0.5, p.duration(), p.sample_rate, 1.5e9, 42);
  REQUIRE(t1.samples.size() == 16384);
  REQUIRE(t1.samples == t2.samples);
  const ReadoutTrace t3 = synthesize_trace(2.0e9, 0.1, 0.5, p.duration(), p.sample_rate, 1.5e9, 43);
  REQUIRE(t1.samples != t3.samples);

  // beat of 9 GHz cannot be sampled at 16 GHz
  REQUIRE_THROWS_WITH(
      synthesize_trace(10.5e9, 0.1, 0.0, p.duration(), p.sample_rate, 1.5e9, 1),
      Catch::Matchers::ContainsSubstring("Nyquist"));
  REQUIRE_THROWS_AS(synthesize_trace(2.0e9, 0.1, 0.0, 1e-11, p.sample_rate, 1.5e9, 1),
                    std::invalid_argument);
}

TEST_CASE("candidate lines sit one hyperfine splitting apart") {
  const ChainConfig cfg = reference_config(3);
  const ChainState ground = all_ground_state(3);
  const auto [f0, f1] = readout_candidates(cfg, ground, 0);
  REQUIRE(f0 > f1);  // nuclear-ground line is the higher one
  REQUIRE_THAT(f0 - f1, WithinRel(cfg.species.hyperfine_A_over_h, 1e-12));

  // exciting a neighbor nucleus moves both candidates by one dipole coupling;
  // differencing ~287 GHz lines leaves ~2 ulp ~ 6e-5 Hz of cancellation noise
  const ChainState neighbor = nuclear_basis_state(3, {0, 1, 0});
  const auto [g0, g1] = readout_candidates(cfg, neighbor, 0);
  REQUIRE_THAT(g0 - f0, WithinAbs(dipole_coupling(cfg, 0, 1), 1e-4));
  REQUIRE_THAT(g1 - f1, WithinAbs(dipole_coupling(cfg, 0, 1), 1e-4));

  SECTION("default mixdown puts the beats at quarter and five-quarter splittings") {
    const double mix = default_mixdown(f0, f1);
    REQUIRE(mix == f1 - 0.25 * (f0 - f1));
    const double bin = 16e9 / 16384.0;
    REQUIRE_THAT((f1 - mix) / bin, WithinAbs(896.0, 1e-6));
    REQUIRE_THAT((f0 - mix) / bin, WithinAbs(4480.0, 1e-6));
  }
}

TEST_CASE("noiseless traces classify correctly at both candidates") {
  const ChainConfig cfg = reference_config(3);
  const auto [f0, f1] = readout_candidates(cfg, all_ground_state(3), 0);
  const double mix = default_mixdown(f0, f1);
  const ReadoutParams p = clean_params();
  const double bin = p.sample_rate / static_cast<double>(p.n_samples);

  const ReadoutTrace trace0 =
      synthesize_trace(f0, p.modulation_depth, 0.0, p.duration(), p.sample_rate, mix, 5);
  const DetectionResult r0 = detect_larmor(trace0, f0, f1, p.snr_threshold);
  REQUIRE(r0.decided_state == NuclearReading::ground);
  REQUIRE(std::abs(r0.estimated_frequency - f0) <= 0.5 * bin);
  REQUIRE(r0.peak_snr >= 1e6);

  const ReadoutTrace trace1 =
      synthesize_trace(f1, p.modulation_depth, 0.0, p.duration(), p.sample_rate, mix, 5);
  const DetectionResult r1 = detect_larmor(trace1, f0, f1, p.snr_threshold);
  REQUIRE(r1.decided_state == NuclearReading::excited);
  REQUIRE(std::abs(r1.estimated_frequency - f1) <= 0.5 * bin);
}

TEST_CASE("classification survives noise ten times the modulation depth") {
  const ChainConfig cfg = reference_config(3);
  const auto [f0, f1] = readout_candidates(cfg, all_ground_state(3), 0);
  const double mix = default_mixdown(f0, f1);
  const ReadoutParams p = clean_params();

  for (const int truth_bit : {0, 1}) {
    const double truth = truth_bit ? f1 : f0;
    int correct = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
      const ReadoutTrace trace =
          synthesize_trace(truth, 0.1, 1.0, p.duration(), p.sample_rate, mix, seed);
      const DetectionResult r = detect_larmor(trace, f0, f1, p.snr_threshold);
      const auto want = truth_bit ? NuclearReading::excited : NuclearReading::ground;
      if (r.decided_state == want) ++correct;
    }
    REQUIRE(correct >= 198);
  }
}

TEST_CASE("zero modulation yields an indeterminate reading") {
  const ChainConfig cfg = reference_config(3);
  const auto [f0, f1] = readout_candidates(cfg, all_ground_state(3), 0);
  const ReadoutParams p = clean_params();
  const ReadoutTrace flat =
      synthesize_trace(f0, 0.0, 0.0, p.duration(), p.sample_rate, default_mixdown(f0, f1), 3);
  const DetectionResult r = detect_larmor(flat, f0, f1, p.snr_threshold);
  REQUIRE(r.decided_state == NuclearReading::indeterminate);
  REQUIRE(r.peak_snr == 0.0);

  REQUIRE_THROWS_AS(detect_larmor(flat, f0, f0, p.snr_threshold), std::invalid_argument);
}

TEST_CASE("sub-bin interpolation beats nearest-bin rounding off the grid") {
  const ChainConfig cfg = reference_config(3);
  const auto [f0, f1] = readout_candidates(cfg, all_ground_state(3), 0);
  const double mix = default_mixdown(f0, f1);
  const ReadoutParams p = clean_params();
  const double bin = p.sample_rate / static_cast<double>(p.n_samples);

  const double offset = 0.3;  // fractional bins away from the grid
  const double truth = mix + (896.0 + offset) * bin;
  const ReadoutTrace trace =
      synthesize_trace(truth, p.modulation_depth, 0.0, p.duration(), p.sample_rate, mix, 9);
  const DetectionResult r = detect_larmor(trace, f0, f1, p.snr_threshold);
  REQUIRE(r.decided_state == NuclearReading::excited);
  const double err = std::abs(r.estimated_frequency - truth);
  REQUIRE(err <= 0.2 * bin);
  REQUIRE(err < offset * bin);  // strictly better than taking the peak bin
}

TEST_CASE("projective nuclear measurement") {
  const ChainConfig cfg = reference_config(1);
  const ReadoutParams p = clean_params();

  SECTION("basis states read back deterministically under any seed") {
    for (const std::uint64_t seed : {1ull, 17ull, 905ull}) {
      const MeasurementResult r0 = measure_nuclear(all_ground_state(1), 0, cfg, p, seed);
      REQUIRE(r0.valid);
      REQUIRE(r0.bit == 0);
      REQUIRE(r0.drawn_bit == 0);
      REQUIRE_THAT(r0.state.probability(0), WithinAbs(1.0, 1e-12));

      const MeasurementResult r1 =
          measure_nuclear(nuclear_basis_state(1, {1}), 0, cfg, p, seed);
      REQUIRE(r1.valid);
      REQUIRE(r1.bit == 1);
      REQUIRE_THAT(r1.state.probability(2), WithinAbs(1.0, 1e-12));
    }
  }

  SECTION("superposition statistics follow the born rule") {
    ChainState s = all_ground_state(1);
    s.amplitudes(0) = 0.6;
    s.amplitudes(2) = cd(0.0, 0.8);
    int excited = 0;
    const int trials = 400;
    for (int i = 0; i < trials; ++i) {
      const MeasurementResult r = measure_nuclear(s, 0, cfg, p, static_cast<std::uint64_t>(100 + i));
      REQUIRE(r.valid);
      REQUIRE(r.bit == r.drawn_bit);  // clean traces never misclassify
      // posterior collapses onto the drawn outcome with unit norm
      REQUIRE_THAT(r.state.probability(r.drawn_bit ? 2 : 0), WithinAbs(1.0, 1e-12));
      REQUIRE_THAT(r.state.norm(), WithinAbs(1.0, 1e-12));
      excited += r.bit;
    }
    // p = 0.64, 3 sigma ~ 29 over 400 trials
    REQUIRE(excited >= 256 - 29);
    REQUIRE(excited <= 256 + 29);
  }

  SECTION("indeterminate detection leaves the state untouched") {
    ReadoutParams dark = p;
    dark.modulation_depth = 0.0;
    ChainState s = all_ground_state(1);
    s.amplitudes(0) = 0.6;
    s.amplitudes(2) = cd(0.0, 0.8);
    const MeasurementResult r = measure_nuclear(s, 0, cfg, dark, 4);
    REQUIRE_FALSE(r.valid);
    REQUIRE((r.state.amplitudes - s.amplitudes).norm() == 0.0);
  }

  SECTION("monitored electron is pumped back to ground") {
    ChainState s = all_ground_state(1);
    s.amplitudes(0) = 1.0 / std::sqrt(2.0);
    s.amplitudes(1) = 1.0 / std::sqrt(2.0);  // half-excited electron, nucleus down
    const MeasurementResult r = measure_nuclear(s, 0, cfg, p, 6);
    REQUIRE(r.valid);
    REQUIRE(electron_excited_probability(r.state, 0) <= 1e-12);
    REQUIRE_THAT(r.state.norm(), WithinAbs(1.0, 1e-12));
  }

  SECTION("site must be in range") {
    REQUIRE_THROWS_AS(measure_nuclear(all_ground_state(1), 1, cfg, p, 1),
                      std::out_of_range);
  }
}
