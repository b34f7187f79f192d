#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "raca/baselines.hpp"
#include "raca/metrics.hpp"
#include "raca/svdwf.hpp"
#include "raca/system.hpp"
#include "raca/wmmse.hpp"

namespace raca {

/// Everything the experiment driver can run: the dual-band relay-aided
/// design under its two solvers plus an equal-power eigenmode variant, and
/// the three reference architectures.
enum class Algorithm {
  raca_wmmse,
  raca_svd_wf,
  raca_svd,
  ca_svd_wf,
  ra_wmmse,
  mimo_svd_wf,
};

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

/// The five systems the comparison studies plot (raca_svd is opt-in).
std::vector<Algorithm> default_algorithms();

struct ExperimentSpec {
  enum class Kind {
    convergence,
    rate_vs_noise,
    streams_vs_noise,
    energy,
    freq_sweep,
    ratio_ue_relay,
    ratio_fl_fh,
  };
  Kind kind = Kind::rate_vs_noise;
  SystemConfig base_config{};
  std::vector<double> sweep_values;  // nonempty, sorted ascending
  int n_trials = 200;
  std::uint64_t seed = 1;
  std::vector<Algorithm> systems = default_algorithms();
  int threads = 1;  // 0 = hardware concurrency
  WmmseSettings wmmse{};
  SvdwfSettings svdwf{};
};

ExperimentSpec::Kind experiment_kind_from_name(const std::string& name);
std::string experiment_kind_name(ExperimentSpec::Kind kind);

/// The grids the comparison studies use: noise sweeps -110..-70 dBm step 5,
/// high-band carriers {10,20,28,40,60,80,100} GHz, ratio grids 0..1 step
/// 0.05. convergence gets a single dummy value.
std::vector<double> default_sweep_values(ExperimentSpec::Kind kind);

/// Base config adjusted for one grid point. Noise sweeps set both noise
/// variances to the dBm value; freq_sweep sets the high-band carrier (GHz);
/// the ratio sweeps split a fixed watt total between two budgets so that
/// the two shares sum to the total exactly in floating point.
SystemConfig config_for_sweep_value(const ExperimentSpec& spec, double value);

/// Channel seed for one trial. Depends only on (base_seed, trial): a trial
/// keeps its fading realization across sweep values, pairing the samples.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial);

/// Number of streams carrying a meaningful rate: eigenvalues lambda of
/// H^H J^-1 H with log2(1 + lambda) above min_bits.
int effective_stream_count(const CMatrix& h_eff, const CMatrix& noise_cov,
                           double min_bits = 0.05);
int count_streams(const ChannelSet& ch, const BeamformerSolution& sol,
                  const SystemConfig& config, double min_bits = 0.05);

/// Per-trial record of one system run.
struct TrialOutcome {
  bool ok = false;
  double rate_bits = 0.0;
  double streams = 0.0;
  TransmitPowers powers{};
  double ee_total = 0.0;
  double ee_ue = 0.0;
};

/// Runs one system on one channel draw, including stream count and the
/// energy figures for its architecture.
TrialOutcome run_single(Algorithm algo, const ChannelSet& ch,
                        const SystemConfig& config,
                        const WmmseSettings& wmmse_settings,
                        const SvdwfSettings& svdwf_settings);

struct ResultRow {
  double sweep_value = 0.0;
  std::string system;
  double mean_rate = 0.0;
  double stderr_rate = 0.0;  // standard error of the mean
  double mean_streams = 0.0;
  double mean_ee_sys = 0.0;
  double mean_ee_ue = 0.0;
  double mean_p_ue_low_w = 0.0;
  double mean_p_ue_high_w = 0.0;
  double mean_p_relay_w = 0.0;
  int trials_ok = 0;
  int failures = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // one per (sweep_value, system), sweep-major

  static const char* csv_header();
  std::string to_csv() const;
  void write_csv(const std::string& path) const;
};

/// Monte Carlo sweep driver. Work items are (sweep value, trial) pairs
/// claimed by a bounded worker pool; aggregation replays results in trial
/// order, so the output is identical for any thread count. A failing trial
/// increments the row's failure count and never aborts the sweep.
/// convergence specs are rejected here; use run_convergence_study.
ExperimentResult run_experiment(const ExperimentSpec& spec);

struct ConvergenceCurve {
  std::string init;
  std::vector<double> mean_rate;  // per iteration, curves padded to length
  double mean_iters_to_99 = 0.0;  // iterations to 99% of own converged rate
  double mean_iters_to_98 = 0.0;
  double mean_final_rate = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceCurve> curves;  // order: random, svd_equal, svdwf
  /// Fraction of trials whose starting rates order svdwf >= svd_equal >= random.
  double init_ordering_fraction = 0.0;
  int trials_ok = 0;
  int failures = 0;

  static const char* csv_header();
  std::string to_csv() const;
  void write_csv(const std::string& path) const;
};

/// Convergence comparison of the alternating solver under its three
/// initializations, same channels for all three. Uses spec.base_config,
/// n_trials, seed, threads and wmmse settings (init/init_seed overridden).
ConvergenceResult run_convergence_study(const ExperimentSpec& spec);

}  // namespace raca
