#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stmqc/chain.hpp"
#include "stmqc/fft.hpp"
#include "stmqc/frequency_table.hpp"
#include "stmqc/rng.hpp"
#include "stmqc/state.hpp"

namespace stmqc {

// synthesized tunneling-current record, stored as the beat against a local
// oscillator at mixdown_frequency (heterodyne detection; raw electron
// precession sits near 280 GHz and is not sampled directly)
struct ReadoutTrace {
  std::vector<double> samples;     // current, arbitrary units
  double sample_rate = 0.0;        // Hz
  double mixdown_frequency = 0.0;  // Hz
};

enum class NuclearReading { ground, excited, indeterminate };

inline const char* reading_name(NuclearReading r) {
  switch (r) {
    case NuclearReading::ground: return "nuclear-ground";
    case NuclearReading::excited: return "nuclear-excited";
    default: return "indeterminate";
  }
}

struct DetectionResult {
  double estimated_frequency = 0.0;  // Hz, absolute (mixdown added back)
  NuclearReading decided_state = NuclearReading::indeterminate;
  double peak_snr = 0.0;
};

struct ReadoutParams {
  double sample_rate = 16e9;       // Hz
  int n_samples = 16384;
  double modulation_depth = 0.1;   // fraction of the mean current
  double noise_sigma = 0.0;        // additive gaussian, same units
  double mixdown_frequency = -1.0; // Hz; negative = derive from candidates
  double snr_threshold = 5.0;

  double duration() const { return n_samples / sample_rate; }
};

// local oscillator placed a quarter-splitting below the lower candidate, so
// the two beats (0.25 and 1.25 splittings) stay distinct; an oscillator at
// the mean electron frequency would alias both candidates onto one beat
inline double default_mixdown(double f_cand0, double f_cand1) {
  const double lo = std::min(f_cand0, f_cand1);
  return lo - 0.25 * std::abs(f_cand0 - f_cand1);
}

// samples_i = 1 + depth cos(2 pi (f - mixdown) t_i + phi0) + N(0, sigma),
// phi0 = 2 pi u with u the generator's first draw
inline ReadoutTrace synthesize_trace(double true_frequency, double modulation_depth,
                                     double noise_sigma, double duration, double sample_rate,
                                     double mixdown_frequency, SeededRng& rng) {
  const auto n = static_cast<std::int64_t>(std::floor(duration * sample_rate + 0.5));
  if (n < 2) throw std::invalid_argument("readout: duration * sample_rate must be >= 2");
  const double beat = true_frequency - mixdown_frequency;
  if (sample_rate <= 2.0 * std::abs(beat))
    throw std::invalid_argument(
        "readout: sample_rate " + std::to_string(sample_rate) +
        " Hz violates the Nyquist condition; need > " + std::to_string(2.0 * std::abs(beat)) +
        " Hz for the beat of " + std::to_string(beat) + " Hz");
  ReadoutTrace trace;
  trace.sample_rate = sample_rate;
  trace.mixdown_frequency = mixdown_frequency;
  trace.samples.resize(static_cast<std::size_t>(n));
  const double phi0 = 2.0 * constants::pi * rng.uniform();
  for (std::int64_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    double v = 1.0 + modulation_depth * std::cos(2.0 * constants::pi * beat * t + phi0);
    if (noise_sigma > 0) v += noise_sigma * rng.gaussian();
    trace.samples[static_cast<std::size_t>(i)] = v;
  }
  return trace;
}

inline ReadoutTrace synthesize_trace(double true_frequency, double modulation_depth,
                                     double noise_sigma, double duration, double sample_rate,
                                     double mixdown_frequency, std::uint64_t seed) {
  SeededRng rng(seed);
  return synthesize_trace(true_frequency, modulation_depth, noise_sigma, duration, sample_rate,
                          mixdown_frequency, rng);
}

// periodogram peak search with local quadratic (log-power) interpolation.
// decision: nearest candidate, accepted only when within half the candidate
// separation and the peak rises snr_threshold-fold above the median bin.
inline DetectionResult detect_larmor(const ReadoutTrace& trace, double f_cand0, double f_cand1,
                                     double snr_threshold = 5.0) {
  if (trace.samples.size() < 2) throw std::invalid_argument("readout: trace too short");
  if (f_cand0 == f_cand1) throw std::invalid_argument("readout: candidates must be distinct");
  DetectionResult result;

  const std::size_t n_raw = trace.samples.size();
  double mean = 0.0;
  for (double v : trace.samples) mean += v;
  mean /= static_cast<double>(n_raw);

  const std::size_t n = next_pow2(n_raw);
  std::vector<std::complex<double>> buf(n, 0.0);
  for (std::size_t i = 0; i < n_raw; ++i) buf[i] = trace.samples[i] - mean;
  fft_inplace(buf);

  const std::size_t half = n / 2;
  std::vector<double> power(half + 1);
  for (std::size_t k = 0; k <= half; ++k) power[k] = std::norm(buf[k]);

  std::size_t peak = 1;
  for (std::size_t k = 2; k <= half; ++k)
    if (power[k] > power[peak]) peak = k;

  std::vector<double> tail(power.begin() + 1, power.end());
  std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
  const double med = tail[tail.size() / 2];
  result.peak_snr = med > 0 ? power[peak] / med : 0.0;

  if (power[peak] <= 0.0 || result.peak_snr < snr_threshold) return result;

  // quadratic vertex through log-power of the peak and its neighbors
  double delta = 0.0;
  if (peak > 1 && peak < half && power[peak - 1] > 0 && power[peak + 1] > 0) {
    const double lm = std::log(power[peak - 1]);
    const double l0 = std::log(power[peak]);
    const double lp = std::log(power[peak + 1]);
    const double denom = lm - 2.0 * l0 + lp;
    if (denom < 0) delta = 0.5 * (lm - lp) / denom;
  }
  const double bin_hz = trace.sample_rate / static_cast<double>(n);
  const double beat = (static_cast<double>(peak) + delta) * bin_hz;
  result.estimated_frequency = trace.mixdown_frequency + beat;

  const double separation = std::abs(f_cand0 - f_cand1);
  const double d0 = std::abs(result.estimated_frequency - f_cand0);
  const double d1 = std::abs(result.estimated_frequency - f_cand1);
  if (std::min(d0, d1) <= separation / 2.0)
    result.decided_state = d0 <= d1 ? NuclearReading::ground : NuclearReading::excited;
  return result;
}

// candidate electron transition frequencies for reading out ion k: nuclear
// ground/excited at k, other nuclei entering through their <I_z> dipole shifts
inline std::pair<double, double> readout_candidates(const ChainConfig& config,
                                                    const ChainState& state, int site) {
  std::vector<double> iz(static_cast<std::size_t>(config.n_ions));
  for (int j = 0; j < config.n_ions; ++j) iz[static_cast<std::size_t>(j)] =
      nuclear_iz_expectation(state, j);
  auto iz0 = iz, iz1 = iz;
  iz0[static_cast<std::size_t>(site)] = -0.5;
  iz1[static_cast<std::size_t>(site)] = +0.5;
  return {electron_transition_frequency(config, site, iz0),
          electron_transition_frequency(config, site, iz1)};
}

struct MeasurementResult {
  bool valid = false;   // false when the detector returned indeterminate
  int bit = 0;          // decided nuclear bit when valid
  int drawn_bit = 0;    // the underlying projective outcome
  DetectionResult detection;
  ChainState state;     // projected when valid; input state otherwise
};

// projective nuclear measurement of one site via the synthesized trace. the
// nuclear outcome is drawn from the state; the trace is synthesized at the
// outcome's electron transition frequency and classified against the two
// candidates. on a valid detection the returned state has the nucleus
// projected onto the DRAWN bit and the monitored electron pumped to ground;
// the reported bit is the classifier's decision, which can disagree with the
// draw only at pathological signal-to-noise. an indeterminate detection
// leaves the state untouched (a failed readout yields no information).
inline MeasurementResult measure_nuclear(const ChainState& state, int site,
                                         const ChainConfig& config, const ReadoutParams& params,
                                         SeededRng& rng) {
  if (site < 0 || site >= config.n_ions)
    throw std::out_of_range("measure_nuclear: site out of range");
  MeasurementResult res;
  res.state = state;

  const double p1 = nuclear_excited_probability(state, site);
  res.drawn_bit = rng.uniform() < p1 ? 1 : 0;

  const auto [f0, f1] = readout_candidates(config, state, site);
  const double truth = res.drawn_bit ? f1 : f0;
  const double mixdown =
      params.mixdown_frequency >= 0 ? params.mixdown_frequency : default_mixdown(f0, f1);
  const ReadoutTrace trace =
      synthesize_trace(truth, params.modulation_depth, params.noise_sigma, params.duration(),
                       params.sample_rate, mixdown, rng);
  res.detection = detect_larmor(trace, f0, f1, params.snr_threshold);
  if (res.detection.decided_state == NuclearReading::indeterminate) return res;

  res.valid = true;
  res.bit = res.detection.decided_state == NuclearReading::excited ? 1 : 0;
  ChainState projected = project_nucleus(state, site, res.drawn_bit);
  // the monitored electron is pumped back to its ground state, unless that
  // subspace is numerically empty
  if (electron_excited_probability(projected, site) < 1.0 - 1e-12)
    projected = project_electron(projected, site, 0);
  res.state = std::move(projected);
  return res;
}

inline MeasurementResult measure_nuclear(const ChainState& state, int site,
                                         const ChainConfig& config, const ReadoutParams& params,
                                         std::uint64_t seed) {
  SeededRng rng(seed);
  return measure_nuclear(state, site, config, params, rng);
}

}  // namespace stmqc
