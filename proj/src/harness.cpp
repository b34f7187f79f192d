#include "raca/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace raca {

namespace {

const char* kAlgorithmNames[] = {
    "raca_wmmse", "raca_svd_wf", "raca_svd", "ca_svd_wf", "ra_wmmse", "mimo_svd_wf",
};

const char* kKindNames[] = {
    "convergence",    "rate_vs_noise",  "streams_vs_noise", "energy",
    "freq_sweep",     "ratio_ue_relay", "ratio_fl_fh",
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string algorithm_name(Algorithm a) {
  return kAlgorithmNames[static_cast<int>(a)];
}

Algorithm algorithm_from_name(const std::string& name) {
  for (int i = 0; i < 6; ++i)
    if (name == kAlgorithmNames[i]) return static_cast<Algorithm>(i);
  throw std::invalid_argument("unknown system name: " + name);
}

std::vector<Algorithm> default_algorithms() {
  return {Algorithm::raca_wmmse, Algorithm::raca_svd_wf, Algorithm::ca_svd_wf,
          Algorithm::ra_wmmse, Algorithm::mimo_svd_wf};
}

ExperimentSpec::Kind experiment_kind_from_name(const std::string& name) {
  for (int i = 0; i < 7; ++i)
    if (name == kKindNames[i]) return static_cast<ExperimentSpec::Kind>(i);
  throw std::invalid_argument("unknown experiment name: " + name);
}

std::string experiment_kind_name(ExperimentSpec::Kind kind) {
  return kKindNames[static_cast<int>(kind)];
}

std::vector<double> default_sweep_values(ExperimentSpec::Kind kind) {
  using Kind = ExperimentSpec::Kind;
  switch (kind) {
    case Kind::convergence:
      return {0.0};
    case Kind::rate_vs_noise:
    case Kind::streams_vs_noise:
    case Kind::energy: {
      std::vector<double> v;
      for (int dbm = -110; dbm <= -70; dbm += 5) v.push_back(dbm);
      return v;
    }
    case Kind::freq_sweep:
      return {10.0, 20.0, 28.0, 40.0, 60.0, 80.0, 100.0};
    case Kind::ratio_ue_relay:
    case Kind::ratio_fl_fh: {
      std::vector<double> v;
      for (int i = 0; i <= 20; ++i) v.push_back(i / 20.0);
      return v;
    }
  }
  throw std::invalid_argument("unknown experiment kind");
}

namespace {

// Splits `total` into shares (ratio, 1 - ratio). The larger share comes from
// the multiplication, the smaller from subtracting it off the total, so the
// two add back to `total` without rounding (Sterbenz).
void split_total(double total, double ratio, double* big_is_first,
                 double* rest) {
  if (!(ratio >= 0.0 && ratio <= 1.0))
    throw std::invalid_argument("ratio sweep values must lie in [0, 1]");
  if (ratio >= 0.5) {
    *big_is_first = ratio * total;
    *rest = total - *big_is_first;
  } else {
    *rest = (1.0 - ratio) * total;
    *big_is_first = total - *rest;
  }
}

}  // namespace

SystemConfig config_for_sweep_value(const ExperimentSpec& spec, double value) {
  using Kind = ExperimentSpec::Kind;
  SystemConfig cfg = spec.base_config;
  switch (spec.kind) {
    case Kind::convergence:
      break;
    case Kind::rate_vs_noise:
    case Kind::streams_vs_noise:
    case Kind::energy:
      cfg.noise_relay_w = dbm_to_watt(value);
      cfg.noise_ap_w = dbm_to_watt(value);
      break;
    case Kind::freq_sweep:
      cfg.f_high_ghz = value;
      break;
    case Kind::ratio_ue_relay:
      split_total(spec.base_config.p_ur_fh_w + spec.base_config.p_relay_w,
                  value, &cfg.p_ur_fh_w, &cfg.p_relay_w);
      break;
    case Kind::ratio_fl_fh:
      split_total(spec.base_config.p_ua_fl_w + spec.base_config.p_ur_fh_w,
                  value, &cfg.p_ua_fl_w, &cfg.p_ur_fh_w);
      break;
  }
  cfg.validate();
  return cfg;
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial) {
  // Stream ids here never collide with the link substreams because the
  // result is used as a fresh seed, not as a stream of base_seed.
  RngStream s(base_seed, 0x4D43ULL + static_cast<std::uint64_t>(trial));
  return s.next_u64();
}

int effective_stream_count(const CMatrix& h_eff, const CMatrix& noise_cov,
                           double min_bits) {
  if (h_eff.cols() == 0 || h_eff.rows() == 0) return 0;
  const CMatrix x = hermitian_solve(noise_cov, h_eff);
  CMatrix g = h_eff.adjoint() * x;
  g = 0.5 * (g + CMatrix(g.adjoint()));
  const EigResult eig = hermitian_eig(g);
  int count = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const double lam = eig.eigenvalues(i);
    if (lam > 0.0 && std::log2(1.0 + lam) > min_bits) ++count;
  }
  return count;
}

int count_streams(const ChannelSet& ch, const BeamformerSolution& sol,
                  const SystemConfig& config, double min_bits) {
  return effective_stream_count(effective_channel(ch, sol),
                                noise_covariance(ch, sol, config), min_bits);
}

namespace {

CMatrix scaled_identity(Eigen::Index n, double value) {
  return value * CMatrix::Identity(n, n);
}

TrialOutcome finish(SystemKind kind, double rate, double streams,
                    const TransmitPowers& powers) {
  TrialOutcome out;
  out.ok = true;
  out.rate_bits = rate;
  out.streams = streams;
  out.powers = powers;
  const EnergyReport rep = energy_report(kind, rate, powers);
  out.ee_total = rep.ee_total;
  out.ee_ue = rep.ee_ue;
  return out;
}

}  // namespace

TrialOutcome run_single(Algorithm algo, const ChannelSet& ch,
                        const SystemConfig& config,
                        const WmmseSettings& wmmse_settings,
                        const SvdwfSettings& svdwf_settings) {
  switch (algo) {
    case Algorithm::raca_wmmse: {
      const WmmseResult r = solve_wmmse(ch, config, wmmse_settings);
      return finish(SystemKind::raca, r.rate_bits,
                    count_streams(ch, r.solution, config),
                    actual_powers(ch, r.solution, config));
    }
    case Algorithm::raca_svd_wf: {
      const SvdwfResult r = solve_svdwf(ch, config, svdwf_settings);
      return finish(SystemKind::raca, r.combined_rate_bits,
                    count_streams(ch, r.solution, config),
                    actual_powers(ch, r.solution, config));
    }
    case Algorithm::raca_svd: {
      const BeamformerSolution sol = svd_equal_power(ch, config);
      const double rate = achievable_rate(ch, sol, config, false);
      return finish(SystemKind::raca, rate, count_streams(ch, sol, config),
                    actual_powers(ch, sol, config));
    }
    case Algorithm::ca_svd_wf: {
      const CaResult r = solve_ca(ch, config);
      const CMatrix eye = scaled_identity(config.n_ap, config.noise_ap_w);
      const int streams =
          effective_stream_count(ch.h_ua_fl * r.low.w, eye) +
          effective_stream_count(ch.h_ua_fh * r.high.w, eye);
      TransmitPowers p;
      p.ue_low_w = frob2(r.low.w);
      p.ue_high_w = frob2(r.high.w);
      return finish(SystemKind::ca, r.rate_bits, streams, p);
    }
    case Algorithm::ra_wmmse: {
      const RaResult r = solve_ra(ch, config, wmmse_settings);
      const CMatrix fwd = r.solution.psi * ch.h_ur_fl;
      const CMatrix combined = ch.h_ra_fl * fwd + ch.h_ua_fl;
      const CMatrix amp = ch.h_ra_fl * r.solution.psi;
      CMatrix j = config.noise_relay_w * (amp * amp.adjoint());
      j += scaled_identity(config.n_ap, config.noise_ap_w);
      j = 0.5 * (j + CMatrix(j.adjoint()));
      const int streams = effective_stream_count(combined * r.solution.w_u, j);
      TransmitPowers p;
      p.ue_low_w = frob2(r.solution.w_u);
      p.relay_w = frob2(fwd * r.solution.w_u) +
                  config.noise_relay_w * frob2(r.solution.psi);
      return finish(SystemKind::ra, r.rate_bits, streams, p);
    }
    case Algorithm::mimo_svd_wf: {
      const MimoResult r = solve_mimo(ch, config);
      const CMatrix eye = scaled_identity(config.n_ap, config.noise_ap_w);
      const int streams = effective_stream_count(ch.h_ua_fl * r.link.w, eye);
      TransmitPowers p;
      p.ue_low_w = frob2(r.link.w);
      return finish(SystemKind::mimo, r.rate_bits, streams, p);
    }
  }
  throw std::invalid_argument("unknown algorithm");
}

const char* ExperimentResult::csv_header() {
  return "sweep_value,system,mean_rate,stderr,mean_streams,mean_ee_sys,"
         "mean_ee_ue,mean_p_ue_low_w,mean_p_ue_high_w,mean_p_relay_w,"
         "trials_ok,failures";
}

std::string ExperimentResult::to_csv() const {
  std::string out = csv_header();
  out += '\n';
  for (const ResultRow& r : rows) {
    out += fmt(r.sweep_value);
    out += ',';
    out += r.system;
    out += ',';
    out += fmt(r.mean_rate);
    out += ',';
    out += fmt(r.stderr_rate);
    out += ',';
    out += fmt(r.mean_streams);
    out += ',';
    out += fmt(r.mean_ee_sys);
    out += ',';
    out += fmt(r.mean_ee_ue);
    out += ',';
    out += fmt(r.mean_p_ue_low_w);
    out += ',';
    out += fmt(r.mean_p_ue_high_w);
    out += ',';
    out += fmt(r.mean_p_relay_w);
    out += ',';
    out += std::to_string(r.trials_ok);
    out += ',';
    out += std::to_string(r.failures);
    out += '\n';
  }
  return out;
}

void ExperimentResult::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << to_csv();
  if (!f) throw std::runtime_error("write failed: " + path);
}

namespace {

struct TaskResult {
  std::vector<TrialOutcome> by_system;
};

void check_spec(const ExperimentSpec& spec) {
  if (spec.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  if (spec.sweep_values.empty())
    throw std::invalid_argument("sweep_values must be nonempty");
  if (!std::is_sorted(spec.sweep_values.begin(), spec.sweep_values.end()))
    throw std::invalid_argument("sweep_values must be sorted ascending");
  if (spec.systems.empty())
    throw std::invalid_argument("systems must be nonempty");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Claims work items off an atomic counter until they run out. `body` must
/// not throw; it owns its slot of the result array exclusively.
template <typename Body>
void run_pool(int n_tasks, int n_threads, const Body& body) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int task = next.fetch_add(1, std::memory_order_relaxed);
      if (task >= n_tasks) return;
      body(task);
    }
  };
  const int use = std::min(n_threads, n_tasks);
  if (use <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(use);
  for (int i = 0; i < use; ++i) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.kind == ExperimentSpec::Kind::convergence)
    throw std::invalid_argument(
        "convergence studies use run_convergence_study, not run_experiment");
  check_spec(spec);

  const int n_sweep = static_cast<int>(spec.sweep_values.size());
  const int n_systems = static_cast<int>(spec.systems.size());
  std::vector<SystemConfig> configs;
  configs.reserve(n_sweep);
  for (double v : spec.sweep_values)
    configs.push_back(config_for_sweep_value(spec, v));

  const int n_tasks = n_sweep * spec.n_trials;
  std::vector<TaskResult> results(n_tasks);
  for (TaskResult& r : results) r.by_system.resize(n_systems);

  run_pool(n_tasks, resolve_threads(spec.threads), [&](int task) {
    const int sweep_idx = task / spec.n_trials;
    const int trial = task % spec.n_trials;
    const SystemConfig& cfg = configs[sweep_idx];
    TaskResult& slot = results[task];
    try {
      const std::uint64_t seed = trial_seed(spec.seed, trial);
      const ChannelSet ch = generate_channels(cfg, seed);
      WmmseSettings ws = spec.wmmse;
      ws.init_seed = seed;
      for (int k = 0; k < n_systems; ++k) {
        try {
          slot.by_system[k] =
              run_single(spec.systems[k], ch, cfg, ws, spec.svdwf);
        } catch (const std::exception&) {
          slot.by_system[k] = TrialOutcome{};
        }
      }
    } catch (const std::exception&) {
      // channel generation failed; every system of this trial is a failure
    }
  });

  ExperimentResult out;
  out.rows.reserve(static_cast<std::size_t>(n_sweep) * n_systems);
  for (int s = 0; s < n_sweep; ++s) {
    for (int k = 0; k < n_systems; ++k) {
      ResultRow row;
      row.sweep_value = spec.sweep_values[s];
      row.system = algorithm_name(spec.systems[k]);
      std::vector<double> rates;
      rates.reserve(spec.n_trials);
      double sum_streams = 0, sum_ee_sys = 0, sum_ee_ue = 0;
      double sum_pl = 0, sum_ph = 0, sum_pr = 0;
      for (int t = 0; t < spec.n_trials; ++t) {
        const TrialOutcome& o = results[s * spec.n_trials + t].by_system[k];
        if (!o.ok) {
          ++row.failures;
          continue;
        }
        rates.push_back(o.rate_bits);
        sum_streams += o.streams;
        sum_ee_sys += o.ee_total;
        sum_ee_ue += o.ee_ue;
        sum_pl += o.powers.ue_low_w;
        sum_ph += o.powers.ue_high_w;
        sum_pr += o.powers.relay_w;
      }
      const int n = static_cast<int>(rates.size());
      row.trials_ok = n;
      if (n > 0) {
        double sum = 0;
        for (double r : rates) sum += r;
        row.mean_rate = sum / n;
        if (n > 1) {
          double ss = 0;
          for (double r : rates) ss += (r - row.mean_rate) * (r - row.mean_rate);
          row.stderr_rate = std::sqrt(ss / (static_cast<double>(n) * (n - 1)));
        }
        row.mean_streams = sum_streams / n;
        row.mean_ee_sys = sum_ee_sys / n;
        row.mean_ee_ue = sum_ee_ue / n;
        row.mean_p_ue_low_w = sum_pl / n;
        row.mean_p_ue_high_w = sum_ph / n;
        row.mean_p_relay_w = sum_pr / n;
      }
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

const char* ConvergenceResult::csv_header() { return "init,iteration,mean_rate"; }

std::string ConvergenceResult::to_csv() const {
  std::string out = csv_header();
  out += '\n';
  for (const ConvergenceCurve& c : curves) {
    for (std::size_t i = 0; i < c.mean_rate.size(); ++i) {
      out += c.init;
      out += ',';
      out += std::to_string(i);
      out += ',';
      out += fmt(c.mean_rate[i]);
      out += '\n';
    }
  }
  return out;
}

void ConvergenceResult::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << to_csv();
  if (!f) throw std::runtime_error("write failed: " + path);
}

namespace {

/// First iteration index whose rate reaches `frac` of the history's final
/// value. Entry 0 is the initial point, so the result counts iterations.
int iters_to_fraction(const std::vector<double>& history, double frac) {
  const double target = frac * history.back();
  for (std::size_t i = 0; i < history.size(); ++i)
    if (history[i] >= target) return static_cast<int>(i);
  return static_cast<int>(history.size()) - 1;
}

}  // namespace

ConvergenceResult run_convergence_study(const ExperimentSpec& spec) {
  if (spec.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  spec.base_config.validate();

  constexpr int kInits = 3;
  const WmmseSettings::Init init_modes[kInits] = {
      WmmseSettings::Init::random,
      WmmseSettings::Init::svd_equal,
      WmmseSettings::Init::svdwf,
  };
  const char* init_names[kInits] = {"random", "svd_equal", "svdwf"};

  struct TrialCurves {
    bool ok = false;
    std::vector<double> history[kInits];
  };
  std::vector<TrialCurves> per_trial(spec.n_trials);

  run_pool(spec.n_trials, resolve_threads(spec.threads), [&](int trial) {
    TrialCurves& slot = per_trial[trial];
    try {
      const std::uint64_t seed = trial_seed(spec.seed, trial);
      const ChannelSet ch = generate_channels(spec.base_config, seed);
      for (int m = 0; m < kInits; ++m) {
        WmmseSettings ws = spec.wmmse;
        ws.init = init_modes[m];
        ws.init_seed = seed;
        slot.history[m] = solve_wmmse(ch, spec.base_config, ws).rate_history;
      }
      slot.ok = true;
    } catch (const std::exception&) {
      slot.ok = false;
    }
  });

  ConvergenceResult out;
  out.curves.resize(kInits);
  int ordering_hits = 0;
  for (const TrialCurves& t : per_trial) {
    if (!t.ok) {
      ++out.failures;
      continue;
    }
    ++out.trials_ok;
    if (t.history[2][0] >= t.history[1][0] && t.history[1][0] >= t.history[0][0])
      ++ordering_hits;
  }
  if (out.trials_ok > 0)
    out.init_ordering_fraction =
        static_cast<double>(ordering_hits) / out.trials_ok;

  for (int m = 0; m < kInits; ++m) {
    ConvergenceCurve& curve = out.curves[m];
    curve.init = init_names[m];
    std::size_t max_len = 1;
    for (const TrialCurves& t : per_trial)
      if (t.ok) max_len = std::max(max_len, t.history[m].size());
    curve.mean_rate.assign(max_len, 0.0);
    double sum99 = 0, sum98 = 0, sum_final = 0;
    for (const TrialCurves& t : per_trial) {
      if (!t.ok) continue;
      const std::vector<double>& h = t.history[m];
      for (std::size_t i = 0; i < max_len; ++i)
        curve.mean_rate[i] += i < h.size() ? h[i] : h.back();
      sum99 += iters_to_fraction(h, 0.99);
      sum98 += iters_to_fraction(h, 0.98);
      sum_final += h.back();
    }
    if (out.trials_ok > 0) {
      for (double& v : curve.mean_rate) v /= out.trials_ok;
      curve.mean_iters_to_99 = sum99 / out.trials_ok;
      curve.mean_iters_to_98 = sum98 / out.trials_ok;
      curve.mean_final_rate = sum_final / out.trials_ok;
    }
  }
  return out;
}

}  // namespace raca
