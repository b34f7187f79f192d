#pragma once

#include <optional>
#include <string>
#include <vector>

#include "raca/channel.hpp"
#include "raca/linalg.hpp"

namespace raca {

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Antenna counts, carrier frequencies, power budgets (watts), noise
/// variances (watts) and node geometry for one scenario.
struct SystemConfig {
  int n_ue = 2;
  int n_relay = 4;
  int n_ap = 4;
  int n_streams = 2;
  double f_low_ghz = 6.0;
  double f_high_ghz = 28.0;
  double p_ua_fl_w = dbm_to_watt(10.0);   // UE low-band budget
  double p_ur_fh_w = dbm_to_watt(10.0);   // UE high-band budget
  double p_relay_w = dbm_to_watt(10.0);   // relay forwarding budget
  double noise_relay_w = dbm_to_watt(-90.0);
  double noise_ap_w = dbm_to_watt(-90.0);
  Geometry geometry{};
  PathLossModel path_loss = PathLossModel::inh_nlos;

  /// Throws std::invalid_argument when a field is out of range
  /// (stream count vs antenna counts, nonpositive noise, ...).
  void validate() const;

  std::string to_json() const;
  static SystemConfig from_json(const std::string& text);
  static SystemConfig load(const std::string& path);
};

/// Transmit-side design for the dual-band relay-aided uplink.
/// w_a is optional: the MMSE receiver can always be recomputed from the rest.
struct BeamformerSolution {
  CMatrix w_ua;              // N_u x N_s, UE low-band precoder
  CMatrix w_ur;              // N_u x N_s, UE high-band precoder
  CMatrix psi;               // N_r x N_r, relay amplify matrix
  std::optional<CMatrix> w_a; // 2N_s x N_a receive filter
};

/// Zero-initialized solution with the right shapes for `config`.
BeamformerSolution zero_solution(const SystemConfig& config);

/// [H_ua W_ua, H_ra Psi H_ur W_ur], N_a x 2N_s.
CMatrix effective_channel(const ChannelSet& ch, const BeamformerSolution& sol);

/// sigma_r^2 (H_ra Psi)(H_ra Psi)^H + sigma_a^2 I, N_a x N_a.
CMatrix noise_covariance(const ChannelSet& ch, const BeamformerSolution& sol,
                         const SystemConfig& config);

/// ||Psi H_ur W_ur||_F^2 + sigma_r^2 ||Psi||_F^2 (watts actually radiated
/// by the relay).
double relay_transmit_power(const ChannelSet& ch, const BeamformerSolution& sol,
                            const SystemConfig& config);

/// log2 det(I + H^H J^-1 H) in bits per channel use. J is solved, not
/// inverted. Works for any effective channel / noise covariance pair.
double rate_from_effective(const CMatrix& h_eff, const CMatrix& j);

struct ConstraintSlack {
  std::string name;
  double used = 0.0;
  double budget = 0.0;
  double slack = 0.0;  // budget - used
  bool satisfied = true;
};

struct FeasibilityReport {
  std::vector<ConstraintSlack> constraints;
  bool feasible = true;
  double rel_tolerance = 1e-9;
};

/// Checks the three power constraints with relative tolerance 1e-9.
FeasibilityReport validate_solution(const ChannelSet& ch,
                                    const BeamformerSolution& sol,
                                    const SystemConfig& config);

/// Rate of `sol` on `ch`. With check_feasible, throws std::invalid_argument
/// if a power constraint is violated beyond tolerance.
double achievable_rate(const ChannelSet& ch, const BeamformerSolution& sol,
                       const SystemConfig& config, bool check_feasible = true);

}  // namespace raca
