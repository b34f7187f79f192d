#pragma once

#include <cstdint>
#include <vector>

#include "raca/system.hpp"
#include "raca/trace.hpp"

namespace raca {

struct WmmseSettings {
  double eps_min = 1e-7;    // relative rate-change stopping threshold
  int t_max = 10000;
  double bisect_tol = 1e-10;
  int bisect_max_iter = 200;

  enum class Init { svdwf, svd_equal, random };
  Init init = Init::svdwf;
  std::uint64_t init_seed = 0;  // stream for the random init
};

/// Mutable state of the alternating minimization. The weight z and the
/// receiver inside sol evolve together with the precoders.
struct WmmseState {
  BeamformerSolution sol;  // w_a engaged once the first receiver update ran
  CMatrix z;               // 2N_s x 2N_s Hermitian PD weight
  int iteration = 0;
  std::vector<double> rate_history;  // entry 0 is the initial point's rate
};

/// (W_a H - I)(W_a H - I)^H + W_a J W_a^H; requires sol.w_a.
CMatrix mse_matrix(const ChannelSet& ch, const BeamformerSolution& sol,
                   const SystemConfig& config);

/// MMSE receiver H^H (H H^H + J)^-1 for the current precoders.
CMatrix update_receiver(const ChannelSet& ch, const BeamformerSolution& sol,
                        const SystemConfig& config);

/// Weight update Z = E^-1. A failed factorization is retried once with a
/// diagonal jitter of 1e-12 tr(E)/(2N_s); a second failure is fatal.
CMatrix update_weight(const ChannelSet& ch, const BeamformerSolution& sol,
                      const SystemConfig& config);

/// Low-band UE precoder update: quadratic program in the eigenbasis of the
/// regularized normal matrix, multiplier by bisection.
CMatrix update_precoder_direct(const ChannelSet& ch, const WmmseState& state,
                               const SystemConfig& config,
                               const WmmseSettings& settings = {});

/// High-band UE precoder update; carries both its own power budget and the
/// forwarded-power coupling with the relay matrix (two multipliers).
CMatrix update_precoder_relaylink(const ChannelSet& ch, const WmmseState& state,
                                  const SystemConfig& config,
                                  const WmmseSettings& settings = {});

/// Relay amplify-matrix update under the forwarding power budget.
CMatrix update_relay_matrix(const ChannelSet& ch, const WmmseState& state,
                            const SystemConfig& config,
                            const WmmseSettings& settings = {});

/// tr(Z E) - ln det Z, the value the alternation minimizes.
double wmmse_objective(const ChannelSet& ch, const WmmseState& state,
                       const SystemConfig& config);

/// Initial precoders for the requested init mode, scaled onto the power
/// constraints.
BeamformerSolution wmmse_initial_point(const ChannelSet& ch,
                                       const SystemConfig& config,
                                       const WmmseSettings& settings);

struct WmmseResult {
  BeamformerSolution solution;  // includes the final receiver
  double rate_bits = 0.0;
  int iterations = 0;           // full alternation rounds executed
  OptimizerTrace trace;         // row 0 is the initial point
  std::vector<double> rate_history;
};

/// Runs the alternation receiver -> weight -> precoders until the relative
/// rate change drops below eps_min or t_max rounds pass. The per-round rate
/// sequence is nondecreasing; a drop beyond 1e-9 aborts with a diagnostic.
WmmseResult solve_wmmse(const ChannelSet& ch, const SystemConfig& config,
                        const WmmseSettings& settings = {});

}  // namespace raca
