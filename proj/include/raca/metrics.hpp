#pragma once

#include "raca/system.hpp"

namespace raca {

enum class SystemKind { raca, ca, ra, mimo };

/// Power-amplifier efficiency and per-node circuit draws.
struct PowerModel {
  double pa_efficiency = 1.2;
  double pc_ue_w = dbm_to_watt(13.0);
  double pc_relay_w = dbm_to_watt(16.0);
  double pc_ap_w = dbm_to_watt(16.0);
};

/// Radiated powers actually used by a design (watts). Slots unused by a
/// given architecture stay zero: ca puts its high-band direct power in
/// ue_high_w, ra puts the pooled low-band UE power in ue_low_w.
struct TransmitPowers {
  double ue_low_w = 0.0;
  double ue_high_w = 0.0;
  double relay_w = 0.0;
};

/// Radiated powers of a dual-band relay-aided solution.
TransmitPowers actual_powers(const ChannelSet& ch, const BeamformerSolution& sol,
                             const SystemConfig& config);

struct EnergyReport {
  double rate_bits = 0.0;
  double p_total_w = 0.0;  // PA draws plus every involved node's circuits
  double p_ue_w = 0.0;     // UE-side PA draw plus UE circuits
  double ee_total = 0.0;   // rate / p_total
  double ee_ue = 0.0;      // rate / p_ue
};

/// Composes the architecture's power bill: PA terms are radiated power over
/// the PA efficiency; circuit terms cover exactly the nodes the
/// architecture engages (the relay circuits only when a relay transmits).
EnergyReport energy_report(SystemKind kind, double rate_bits,
                           const TransmitPowers& powers,
                           const PowerModel& model = {});

}  // namespace raca
