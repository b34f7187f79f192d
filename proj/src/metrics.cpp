#include "raca/metrics.hpp"

#include <stdexcept>

namespace raca {

TransmitPowers actual_powers(const ChannelSet& ch, const BeamformerSolution& sol,
                             const SystemConfig& config) {
  TransmitPowers p;
  p.ue_low_w = frob2(sol.w_ua);
  p.ue_high_w = frob2(sol.w_ur);
  p.relay_w = relay_transmit_power(ch, sol, config);
  return p;
}

EnergyReport energy_report(SystemKind kind, double rate_bits,
                           const TransmitPowers& powers, const PowerModel& model) {
  if (model.pa_efficiency <= 0.0) {
    throw std::invalid_argument("pa_efficiency must be positive");
  }
  const double eta = model.pa_efficiency;
  EnergyReport rep;
  rep.rate_bits = rate_bits;
  switch (kind) {
    case SystemKind::raca:
      rep.p_total_w = (powers.ue_low_w + powers.ue_high_w + powers.relay_w) / eta +
                      model.pc_ue_w + model.pc_relay_w + model.pc_ap_w;
      rep.p_ue_w = (powers.ue_low_w + powers.ue_high_w) / eta + model.pc_ue_w;
      break;
    case SystemKind::ca:
      rep.p_total_w = (powers.ue_low_w + powers.ue_high_w) / eta + model.pc_ue_w +
                      model.pc_ap_w;
      rep.p_ue_w = (powers.ue_low_w + powers.ue_high_w) / eta + model.pc_ue_w;
      break;
    case SystemKind::ra:
      rep.p_total_w = (powers.ue_low_w + powers.relay_w) / eta + model.pc_ue_w +
                      model.pc_relay_w + model.pc_ap_w;
      rep.p_ue_w = powers.ue_low_w / eta + model.pc_ue_w;
      break;
    case SystemKind::mimo:
      rep.p_total_w = powers.ue_low_w / eta + model.pc_ue_w + model.pc_ap_w;
      rep.p_ue_w = powers.ue_low_w / eta + model.pc_ue_w;
      break;
  }
  rep.ee_total = rate_bits / rep.p_total_w;
  rep.ee_ue = rate_bits / rep.p_ue_w;
  return rep;
}

}  // namespace raca
