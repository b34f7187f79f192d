#pragma once

#include "raca/svdwf.hpp"
#include "raca/system.hpp"
#include "raca/trace.hpp"
#include "raca/wmmse.hpp"

namespace raca {

/// Reference schemes sharing the dual-band design's total transmit budget
/// p_ua_fl + p_ur_fh + p_relay, redistributed to fit each architecture.

/// Plain carrier aggregation: both bands go UE->AP directly. Low band keeps
/// p_ua_fl, the high band absorbs p_ur_fh + p_relay.
struct CaResult {
  double rate_bits = 0.0;
  SingleLinkSolution low;   // on h_ua_fl
  SingleLinkSolution high;  // on h_ua_fh
};

CaResult solve_ca(const ChannelSet& ch, const SystemConfig& config);

/// Single-carrier relay-aided uplink: one low-band transmit signal reaches
/// the AP directly and through the amplifying relay, N_s streams. The UE
/// budget pools p_ua_fl + p_ur_fh; the relay keeps p_relay.
struct RaOptions {
  bool force_psi_zero = false;  // diagnostics: relay silenced
};

struct RaSolution {
  CMatrix w_u;   // N_u x N_s
  CMatrix psi;   // N_r x N_r
  CMatrix w_a;   // N_s x N_a
};

struct RaResult {
  double rate_bits = 0.0;
  RaSolution solution;
  int iterations = 0;
  OptimizerTrace trace;
  std::vector<double> rate_history;
};

RaResult solve_ra(const ChannelSet& ch, const SystemConfig& config,
                  const WmmseSettings& settings = {},
                  const RaOptions& options = {});

/// Low-band point-to-point MIMO with the whole pooled budget.
struct MimoResult {
  double rate_bits = 0.0;
  SingleLinkSolution link;
};

MimoResult solve_mimo(const ChannelSet& ch, const SystemConfig& config);

}  // namespace raca
