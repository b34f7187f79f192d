// Command-line front end for the dual-band relay-aided uplink toolkit:
// Monte Carlo sweeps, convergence traces, signaling-overhead counts and a
// single-draw feasibility audit.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "raca/harness.hpp"
#include "raca/protocol.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  int trials = 200;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string systems = "raca_wmmse,raca_svd_wf,ca_svd_wf,ra_wmmse,mimo_svd_wf";
  int threads = 0;
  int t_max = 3000;
};

void add_common_flags(CLI::App* cmd, CommonOpts* opts, bool with_systems) {
  cmd->add_option("--config", opts->config_path,
                  "JSON config file (defaults used when omitted)");
  cmd->add_option("--trials", opts->trials, "Monte Carlo trials per grid point")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts->seed, "master RNG seed");
  cmd->add_option("--out", opts->out_path,
                  "output CSV path (stdout when omitted)");
  if (with_systems)
    cmd->add_option("--systems", opts->systems,
                    "comma-separated system list (raca_wmmse, raca_svd_wf, "
                    "raca_svd, ca_svd_wf, ra_wmmse, mimo_svd_wf)");
  cmd->add_option("--threads", opts->threads,
                  "worker threads (0 = hardware concurrency)");
  cmd->add_option("--t-max", opts->t_max,
                  "iteration cap for the alternating solvers")
      ->check(CLI::PositiveNumber);
}

std::vector<raca::Algorithm> parse_systems(const std::string& csv) {
  std::vector<raca::Algorithm> out;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) out.push_back(raca::algorithm_from_name(token));
  }
  if (out.empty()) throw std::invalid_argument("empty --systems list");
  return out;
}

raca::ExperimentSpec build_spec(const CommonOpts& opts) {
  raca::ExperimentSpec spec;
  if (!opts.config_path.empty())
    spec.base_config = raca::SystemConfig::load(opts.config_path);
  spec.n_trials = opts.trials;
  spec.seed = opts.seed;
  spec.systems = parse_systems(opts.systems);
  spec.threads = opts.threads;
  spec.wmmse.t_max = opts.t_max;
  return spec;
}

void emit(const std::string& csv, const std::string& out_path,
          const char* what) {
  if (out_path.empty()) {
    std::cout << csv;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot open output file: " + out_path);
  f << csv;
  if (!f) throw std::runtime_error("write failed: " + out_path);
  std::cout << what << " written to " << out_path << "\n";
}

int cmd_run(const CommonOpts& opts, const std::string& experiment) {
  raca::ExperimentSpec spec = build_spec(opts);
  spec.kind = raca::experiment_kind_from_name(experiment);
  spec.sweep_values = raca::default_sweep_values(spec.kind);
  const raca::ExperimentResult result = raca::run_experiment(spec);
  emit(result.to_csv(), opts.out_path, "sweep results");
  return 0;
}

int cmd_convergence(const CommonOpts& opts) {
  raca::ExperimentSpec spec = build_spec(opts);
  spec.kind = raca::ExperimentSpec::Kind::convergence;
  spec.sweep_values = {0.0};
  const raca::ConvergenceResult result = raca::run_convergence_study(spec);
  char line[256];
  for (const raca::ConvergenceCurve& c : result.curves) {
    std::snprintf(line, sizeof(line),
                  "%-10s final rate %.10g bits, iterations to 99%%: %.10g, "
                  "to 98%%: %.10g\n",
                  c.init.c_str(), c.mean_final_rate, c.mean_iters_to_99,
                  c.mean_iters_to_98);
    std::cerr << line;
  }
  std::snprintf(line, sizeof(line),
                "start-rate ordering svdwf >= svd_equal >= random on %.1f%% "
                "of %d trials (%d failures)\n",
                100.0 * result.init_ordering_fraction, result.trials_ok,
                result.failures);
  std::cerr << line;
  emit(result.to_csv(), opts.out_path, "convergence curves");
  return 0;
}

int cmd_overhead(const CommonOpts& opts) {
  raca::SystemConfig config;
  if (!opts.config_path.empty())
    config = raca::SystemConfig::load(opts.config_path);
  const raca::OverheadReport rep = raca::overhead(config);
  if (!opts.out_path.empty()) {
    std::string csv = raca::OverheadReport::csv_header();
    csv += '\n';
    csv += rep.csv_row();
    csv += '\n';
    emit(csv, opts.out_path, "overhead counts");
  }
  std::cout << rep.table();
  return 0;
}

void print_constraint(const raca::ConstraintSlack& c) {
  char line[256];
  std::snprintf(line, sizeof(line), "  %-22s used %-14.8g budget %-14.8g %s\n",
                c.name.c_str(), c.used, c.budget,
                c.satisfied ? "ok" : "VIOLATED");
  std::cout << line;
}

void print_budget_row(const char* name, double used, double budget) {
  raca::ConstraintSlack c;
  c.name = name;
  c.used = used;
  c.budget = budget;
  c.slack = budget - used;
  c.satisfied = used <= budget + 1e-9 * std::max(budget, 1e-30);
  print_constraint(c);
}

int cmd_validate(const CommonOpts& opts) {
  raca::SystemConfig config;
  if (!opts.config_path.empty())
    config = raca::SystemConfig::load(opts.config_path);
  config.validate();
  std::cout << "config ok: " << config.to_json() << "\n";

  const std::uint64_t seed = raca::trial_seed(opts.seed, 0);
  const raca::ChannelSet ch = raca::generate_channels(config, seed);
  raca::WmmseSettings ws;
  ws.t_max = opts.t_max;
  ws.init_seed = seed;
  char line[128];
  for (raca::Algorithm algo : parse_systems(opts.systems)) {
    const raca::TrialOutcome o =
        raca::run_single(algo, ch, config, ws, raca::SvdwfSettings{});
    std::snprintf(line, sizeof(line), "%s: rate %.10g bits, %g streams\n",
                  raca::algorithm_name(algo).c_str(), o.rate_bits, o.streams);
    std::cout << line;
    switch (algo) {
      case raca::Algorithm::raca_wmmse:
      case raca::Algorithm::raca_svd_wf:
      case raca::Algorithm::raca_svd: {
        // re-derive the design to audit it against the exact constraint set
        raca::BeamformerSolution sol;
        if (algo == raca::Algorithm::raca_wmmse)
          sol = raca::solve_wmmse(ch, config, ws).solution;
        else if (algo == raca::Algorithm::raca_svd_wf)
          sol = raca::solve_svdwf(ch, config).solution;
        else
          sol = raca::svd_equal_power(ch, config);
        const raca::FeasibilityReport rep =
            raca::validate_solution(ch, sol, config);
        for (const raca::ConstraintSlack& c : rep.constraints)
          print_constraint(c);
        break;
      }
      case raca::Algorithm::ca_svd_wf:
        print_budget_row("ue_low_band_power", o.powers.ue_low_w,
                         config.p_ua_fl_w);
        print_budget_row("ue_high_band_power", o.powers.ue_high_w,
                         config.p_ur_fh_w + config.p_relay_w);
        break;
      case raca::Algorithm::ra_wmmse:
        print_budget_row("ue_power", o.powers.ue_low_w,
                         config.p_ua_fl_w + config.p_ur_fh_w);
        print_budget_row("relay_forward_power", o.powers.relay_w,
                         config.p_relay_w);
        break;
      case raca::Algorithm::mimo_svd_wf:
        print_budget_row("ue_power", o.powers.ue_low_w,
                         config.p_ua_fl_w + config.p_ur_fh_w + config.p_relay_w);
        break;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-band relay-aided MIMO uplink simulation toolkit"};
  app.require_subcommand(1);

  CommonOpts run_opts, conv_opts, over_opts, val_opts;
  std::string experiment;

  CLI::App* run = app.add_subcommand("run", "Monte Carlo parameter sweep");
  run->add_option("experiment", experiment,
                  "one of: rate_vs_noise, streams_vs_noise, energy, "
                  "freq_sweep, ratio_ue_relay, ratio_fl_fh")
      ->required();
  add_common_flags(run, &run_opts, true);

  CLI::App* conv = app.add_subcommand(
      "convergence", "iteration traces under three initializations");
  add_common_flags(conv, &conv_opts, false);

  CLI::App* over =
      app.add_subcommand("overhead", "CSI signaling cost per coherence window");
  over->add_option("--config", over_opts.config_path, "JSON config file");
  over->add_option("--out", over_opts.out_path, "also write counts as CSV");

  CLI::App* val = app.add_subcommand(
      "validate", "solve one channel draw and audit every power constraint");
  add_common_flags(val, &val_opts, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts, experiment);
    if (conv->parsed()) return cmd_convergence(conv_opts);
    if (over->parsed()) return cmd_overhead(over_opts);
    if (val->parsed()) return cmd_validate(val_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
