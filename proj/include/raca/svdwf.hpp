#pragma once

#include "raca/system.hpp"
#include "raca/trace.hpp"

namespace raca {

struct SvdwfSettings {
  double eps_min = 1e-7;  // L1 change threshold for the relay-link alternation
  int t_max = 100;
  double wf_tol = 1e-10;
};

struct WaterfillResult {
  RVector power;       // same length as cnr, nonnegative
  double nu = 0.0;     // multiplier; gamma_i/(1+gamma_i p_i) = nu on active modes
  bool all_zero = false;  // set when every cnr entry is zero
};

/// Water-filling over parallel channels: maximize sum log(1 + cnr_i p_i)
/// subject to sum p_i <= budget. Exact active-set closed form.
WaterfillResult waterfill(const RVector& cnr, double budget, double tol = 1e-10);

/// Eigenmode transmission on one point-to-point link: precoder from the
/// leading right singular vectors, powers by water-filling.
struct SingleLinkSolution {
  CMatrix w;          // cols(h) x n_streams
  double rate_bits = 0.0;
  RVector cnr;        // per-mode lambda_i^2 / noise
  RVector power;
};

SingleLinkSolution optimize_link(const CMatrix& h, double noise_w,
                                 double budget_w, int n_streams,
                                 double tol = 1e-10);

/// Low-band UE->AP link of the dual-band design.
SingleLinkSolution optimize_direct(const ChannelSet& ch,
                                   const SystemConfig& config);

struct AllocationResult {
  RVector power;
  double nu = 0.0;
};

/// maximize sum log(1 + a_i b_i p_i / (1 + a_i + b_i p_i)) s.t. sum p_i <=
/// budget, p >= 0. Closed-form per-mode solution, scalar bisection on the
/// multiplier. Modes with a_i = 0 or b_i = 0 get zero power.
AllocationResult allocate_subproblem(const RVector& a, const RVector& b,
                                     double budget, double tol = 1e-10);

/// Two-hop UE->relay->AP design: both hop channels diagonalized by their
/// SVDs, per-mode powers by alternating the two coupled allocations.
struct RelayLinkSolution {
  CMatrix w_ur;   // N_u x N_s
  CMatrix psi;    // N_r x N_r
  double rate_bits = 0.0;
  RVector p_ue;       // UE high-band per-mode powers
  RVector p_relay;    // relay per-mode gains (original variables)
  OptimizerTrace trace;
  int iterations = 0;
};

RelayLinkSolution optimize_relaylink(const ChannelSet& ch,
                                     const SystemConfig& config,
                                     const SvdwfSettings& settings = {});

struct SvdwfResult {
  BeamformerSolution solution;  // w_a left unset; receiver is the evaluator's
  double direct_rate_bits = 0.0;
  double relay_rate_bits = 0.0;
  double combined_rate_bits = 0.0;  // full MIMO rate of the stacked design
  OptimizerTrace trace;
};

SvdwfResult solve_svdwf(const ChannelSet& ch, const SystemConfig& config,
                        const SvdwfSettings& settings = {});

/// Eigenmode precoders with equal (not water-filled) per-mode powers on
/// every budget; the cheap initializer variant.
BeamformerSolution svd_equal_power(const ChannelSet& ch,
                                   const SystemConfig& config);

}  // namespace raca
