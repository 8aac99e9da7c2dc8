// command-line front end: frequency planning, pulse simulation, gate and
// readout runs on chains of electron-nuclear spin pairs

#include <CLI11.hpp>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "stmqc/stmqc.hpp"

namespace fs = std::filesystem;
using namespace stmqc;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

ResolvedConfig load_config(const GlobalArgs& g) {
  RawConfig raw = parse_ini_file(g.config_path);
  for (const auto& s : g.overrides) apply_override(raw, s);
  return resolve_config(raw);
}

std::ofstream open_artifact(const GlobalArgs& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  const fs::path path = fs::path(g.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<int> parse_bits(const std::string& s, int n_ions, const char* what) {
  if (static_cast<int>(s.size()) != n_ions)
    throw std::runtime_error(std::string(what) + ": expected " + std::to_string(n_ions) +
                             " bits, got '" + s + "'");
  std::vector<int> bits;
  for (const char c : s) {
    if (c != '0' && c != '1')
      throw std::runtime_error(std::string(what) + ": '" + s + "' is not a bit string");
    bits.push_back(c - '0');
  }
  return bits;
}

// ---------------------------------------------------------------------------

int cmd_plan(const GlobalArgs& g) {
  const ResolvedConfig cfg = load_config(g);
  const std::vector<std::string> prov = {provenance_comment(cfg.hash, g.seed)};
  const FrequencyTable table = build_frequency_table(cfg.chain);
  const ConstraintReport report = check_budget(cfg.chain, cfg.plan, cfg.t1e);

  { auto f = open_artifact(g, "frequency_table.csv"); write_frequency_table_csv(f, table, prov); }
  {
    auto f = open_artifact(g, "constraints.txt");
    f << "# " << prov.front() << "\n" << render_constraint_report_text(report);
  }
  { auto f = open_artifact(g, "constraints.csv"); write_constraint_report_csv(f, report, prov); }
  {
    auto f = open_artifact(g, "collisions.csv");
    auto hits = scan_frequency_collisions(cfg.chain, cfg.plan.f_eR);
    const double lw_n = std::max(cfg.plan.f_nR_onequbit, cfg.plan.f_nR_gate);
    for (auto& h : scan_nuclear_collisions(cfg.chain, lw_n)) hits.push_back(h);
    write_collisions_csv(f, hits, prov);
  }

  std::cout << "chain of " << cfg.chain.n_ions << " site(s), spacing "
            << detail::fmt17(cfg.chain.spacing_a) << " m, field " << cfg.chain.b0
            << " T, gradient " << cfg.chain.gradient_dB0_dx << " T/m\n"
            << "delta_f_e = " << detail::fmt17(table.delta_f_e)
            << " Hz, delta_f_n = " << detail::fmt17(table.delta_f_n)
            << " Hz, f_nd = " << detail::fmt17(table.f_nd)
            << " Hz, f_nd' = " << detail::fmt17(table.f_nd_prime) << " Hz\n\n"
            << render_constraint_report_text(report);
  return report.exit_status();
}

int cmd_simulate(const GlobalArgs& g, const std::string& sequence_path,
                 const std::string& initial_bits) {
  const ResolvedConfig cfg = load_config(g);
  cfg.chain.validate_simulable();
  std::ifstream in(sequence_path);
  if (!in) throw std::runtime_error("cannot open sequence file " + sequence_path);
  const PulseSequence seq = read_sequence(in);

  ChainState state = all_ground_state(cfg.chain.n_ions);
  if (!initial_bits.empty())
    state = nuclear_basis_state(cfg.chain.n_ions,
                                parse_bits(initial_bits, cfg.chain.n_ions, "--initial"));
  const ChainState out = run_sequence(state, seq, cfg.chain);

  {
    auto f = open_artifact(g, "state.csv");
    f << "# " << provenance_comment(cfg.hash, g.seed) << "\n";
    f << "index";
    for (int k = 0; k < cfg.chain.n_ions; ++k) f << ",e" << k << ",n" << k;
    f << ",probability\n";
    for (std::int64_t idx = 0; idx < out.dimension(); ++idx) {
      f << idx;
      for (int k = 0; k < cfg.chain.n_ions; ++k)
        f << ',' << electron_bit(idx, k) << ',' << nuclear_bit(idx, k);
      f << ',' << detail::fmt17(out.probability(idx)) << "\n";
    }
  }

  std::cout << "applied " << seq.steps.size() << " step(s), total duration "
            << detail::fmt17(seq.total_duration()) << " s\n";
  for (int k = 0; k < cfg.chain.n_ions; ++k)
    std::cout << "site " << k << ": P(electron excited) = "
              << detail::fmt17(electron_excited_probability(out, k))
              << ", P(nucleus excited) = "
              << detail::fmt17(nuclear_excited_probability(out, k)) << "\n";
  return 0;
}

int cmd_gate(const GlobalArgs& g, int control, int target, bool naive_step3, double f_nr,
             double f_er) {
  const ResolvedConfig cfg = load_config(g);
  GateSpec gate;
  gate.control_site = control;
  gate.target_site = target;
  gate.step3_naive = naive_step3;
  if (f_nr > 0) gate.nuclear_rabi_frequency = f_nr;
  if (f_er > 0) gate.electron_rabi_frequency = f_er;

  const ChainState ground = all_ground_state(cfg.chain.n_ions);
  const GateResult run = cn_gate(ground, gate, cfg.chain);

  // truth table: apply the recorded pulse sequence to each nuclear basis
  // input on (control, target)
  auto f = open_artifact(g, "truth_table.csv");
  f << "# " << provenance_comment(cfg.hash, g.seed) << "\n";
  f << "in_control,in_target,p00,p01,p10,p11\n";
  for (int ic = 0; ic < 2; ++ic) {
    for (int it = 0; it < 2; ++it) {
      std::vector<int> bits(static_cast<std::size_t>(cfg.chain.n_ions), 0);
      bits[static_cast<std::size_t>(control)] = ic;
      bits[static_cast<std::size_t>(target)] = it;
      const ChainState out =
          run_sequence(nuclear_basis_state(cfg.chain.n_ions, bits), run.report.sequence,
                       cfg.chain);
      double p[2][2] = {{0, 0}, {0, 0}};
      for (std::int64_t idx = 0; idx < out.dimension(); ++idx)
        p[nuclear_bit(idx, control)][nuclear_bit(idx, target)] += out.probability(idx);
      f << ic << ',' << it << ',' << detail::fmt17(p[0][0]) << ',' << detail::fmt17(p[0][1])
        << ',' << detail::fmt17(p[1][0]) << ',' << detail::fmt17(p[1][1]) << "\n";
    }
  }

  std::cout << render_protocol_report_text(run.report);
  return 0;
}

int cmd_readout(const GlobalArgs& g, int site, int truth, int sweep_trials) {
  const ResolvedConfig cfg = load_config(g);
  cfg.chain.validate_simulable();
  std::vector<int> bits(static_cast<std::size_t>(cfg.chain.n_ions), 0);
  bits[static_cast<std::size_t>(site)] = truth;
  const ChainState state = nuclear_basis_state(cfg.chain.n_ions, bits);
  const auto [f_ground, f_excited] = readout_candidates(cfg.chain, state, site);

  SeededRng rng(g.seed);
  ReadoutParams params = cfg.readout;
  if (params.mixdown_frequency < 0)
    params.mixdown_frequency = default_mixdown(f_ground, f_excited);
  const double f_truth = truth ? f_excited : f_ground;
  const ReadoutTrace trace =
      synthesize_trace(f_truth, params.modulation_depth, params.noise_sigma, params.duration(),
                       params.sample_rate, params.mixdown_frequency, rng);
  const DetectionResult det =
      detect_larmor(trace, f_ground, f_excited, params.snr_threshold);

  {
    auto f = open_artifact(g, "trace.csv");
    write_trace_csv(f, trace, {provenance_comment(cfg.hash, g.seed)});
  }

  std::cout << "candidates: ground " << detail::fmt17(f_ground) << " Hz, excited "
            << detail::fmt17(f_excited) << " Hz\n"
            << "estimated " << detail::fmt17(det.estimated_frequency) << " Hz, peak snr "
            << detail::fmt17(det.peak_snr) << ", decided " << reading_name(det.decided_state)
            << " (truth " << (truth ? "nuclear-excited" : "nuclear-ground") << ")\n";

  if (sweep_trials > 0) {
    // each noise level evolves its own generator seeded from (seed, level),
    // so the levels run concurrently yet the csv is byte-stable
    struct SweepRow {
      double sigma = 0.0;
      int correct = 0, wrong = 0, indet = 0;
    };
    const std::array<double, 6> mults = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::vector<SweepRow> rows(mults.size());
    std::vector<std::future<void>> jobs;
    for (std::size_t li = 0; li < mults.size(); ++li) {
      jobs.push_back(std::async(std::launch::async, [&, li] {
        SweepRow& row = rows[li];
        row.sigma = mults[li] * params.modulation_depth;
        SeededRng level_rng(g.seed + 1000003 * (static_cast<std::uint64_t>(li) + 1));
        for (int i = 0; i < sweep_trials; ++i) {
          const ReadoutTrace t =
              synthesize_trace(f_truth, params.modulation_depth, row.sigma, params.duration(),
                               params.sample_rate, params.mixdown_frequency, level_rng);
          const DetectionResult d = detect_larmor(t, f_ground, f_excited, params.snr_threshold);
          if (d.decided_state == NuclearReading::indeterminate)
            ++row.indet;
          else if ((d.decided_state == NuclearReading::excited) == (truth == 1))
            ++row.correct;
          else
            ++row.wrong;
        }
      }));
    }
    for (auto& j : jobs) j.get();

    auto f = open_artifact(g, "readout_sweep.csv");
    f << "# " << provenance_comment(cfg.hash, g.seed) << "\n";
    f << "noise_sigma,trials,correct,wrong,indeterminate\n";
    for (const SweepRow& row : rows)
      f << detail::fmt17(row.sigma) << ',' << sweep_trials << ',' << row.correct << ','
        << row.wrong << ',' << row.indet << "\n";
  }
  return 0;
}

int cmd_init(const GlobalArgs& g, const std::string& initial_bits) {
  const ResolvedConfig cfg = load_config(g);
  cfg.chain.validate_simulable();
  ChainState state = all_ground_state(cfg.chain.n_ions);
  if (!initial_bits.empty())
    state = nuclear_basis_state(cfg.chain.n_ions,
                                parse_bits(initial_bits, cfg.chain.n_ions, "--initial"));
  InitParams params;
  params.readout = cfg.readout;
  params.nuclear_rabi_frequency = cfg.plan.f_nR_onequbit;
  const InitializationResult res = initialize_chain(state, cfg.chain, params, g.seed);
  {
    auto f = open_artifact(g, "init_report.txt");
    f << "# " << provenance_comment(cfg.hash, g.seed) << "\n"
      << render_protocol_report_text(res.report);
  }
  std::cout << render_protocol_report_text(res.report);
  return res.report.aborted ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "frequency-budget planner and pulse-level simulator for chains of "
      "electron-nuclear spin pairs in a graded magnetic field"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs g;
  app.add_option("--config", g.config_path, "ini configuration file")->required();
  app.add_option("--set", g.overrides,
                 "override a config field as section.key=value (repeatable, applied after the "
                 "file is parsed)");
  app.add_option("--seed", g.seed, "random seed recorded in every artifact");
  app.add_option("--out", g.out_dir, "directory for output artifacts");

  auto* plan = app.add_subcommand(
      "plan", "frequency table and budget audit; exit 0 pass / 1 fail / 2 warnings");

  auto* simulate = app.add_subcommand("simulate", "run a pulse sequence file");
  std::string sequence_path, initial_bits;
  simulate->add_option("--sequence", sequence_path, "pulse sequence file")->required();
  simulate->add_option("--initial", initial_bits,
                       "initial nuclear bits, one per site (default all ground)");

  auto* gate = app.add_subcommand("gate", "run the Control-Not gate and report fidelity");
  int control = 0, target = 1;
  bool naive_step3 = false;
  double f_nr = 0, f_er = 0;
  gate->add_option("--control", control, "control site index");
  gate->add_option("--target", target, "target site index");
  gate->add_flag("--naive-step3", naive_step3,
                 "repeat the step-1 carrier for the restoring pulse");
  gate->add_option("--f-nr", f_nr, "gate nuclear Rabi frequency, Hz (default synchronized)");
  gate->add_option("--f-er", f_er, "electron Rabi frequency, Hz");

  auto* readout = app.add_subcommand("readout", "synthesize and classify one readout trace");
  int site = 0, truth = 0, sweep_trials = 0;
  readout->add_option("--site", site, "site to read");
  readout->add_option("--truth", truth, "actual nuclear bit behind the trace")
      ->check(CLI::Range(0, 1));
  readout->add_option("--sweep", sweep_trials,
                      "also run a noise sweep with this many trials per level");

  auto* init = app.add_subcommand("init", "measure and pump every nuclear spin to ground");
  std::string init_bits;
  init->add_option("--initial", init_bits, "starting nuclear bits (default all ground)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) return cmd_plan(g);
    if (simulate->parsed()) return cmd_simulate(g, sequence_path, initial_bits);
    if (gate->parsed()) return cmd_gate(g, control, target, naive_step3, f_nr, f_er);
    if (readout->parsed()) return cmd_readout(g, site, truth, sweep_trials);
    if (init->parsed()) return cmd_init(g, init_bits);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
