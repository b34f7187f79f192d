#include "raca/system.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace raca {

void SystemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("SystemConfig: " + msg); };
  if (n_ue < 1 || n_relay < 1 || n_ap < 1 || n_streams < 1)
    fail("antenna/stream counts must be positive");
  if (n_streams > std::min({n_ue, n_relay, n_ap}))
    fail("n_streams exceeds min(n_ue, n_relay, n_ap)");
  if (n_ap < 2 * n_streams)
    fail("n_ap must be at least 2*n_streams to separate both stream blocks");
  if (!(f_low_ghz > 0.0) || !(f_high_ghz > 0.0)) fail("carrier frequencies must be positive");
  if (p_ua_fl_w < 0.0 || p_ur_fh_w < 0.0 || p_relay_w < 0.0)
    fail("power budgets must be nonnegative");
  if (!(noise_relay_w > 0.0) || !(noise_ap_w > 0.0)) fail("noise variances must be positive");
  if (!(geometry.d_ua_m >= 1.0) || !(geometry.d_ur_m >= 1.0) || !(geometry.d_ra_m >= 1.0))
    fail("link distances must be at least 1 m");
}

namespace {

using nlohmann::json;

const char* model_name(PathLossModel m) {
  return m == PathLossModel::inh_nlos ? "inh_nlos" : "inh_los";
}

PathLossModel model_from_name(const std::string& s) {
  if (s == "inh_nlos") return PathLossModel::inh_nlos;
  if (s == "inh_los") return PathLossModel::inh_los;
  throw std::invalid_argument("SystemConfig: unknown path_loss model " + s);
}

}  // namespace

std::string SystemConfig::to_json() const {
  json j;
  j["n_ue"] = n_ue;
  j["n_relay"] = n_relay;
  j["n_ap"] = n_ap;
  j["n_streams"] = n_streams;
  j["f_low_ghz"] = f_low_ghz;
  j["f_high_ghz"] = f_high_ghz;
  j["p_ua_fl_dbm"] = watt_to_dbm(p_ua_fl_w);
  j["p_ur_fh_dbm"] = watt_to_dbm(p_ur_fh_w);
  j["p_relay_dbm"] = watt_to_dbm(p_relay_w);
  j["noise_relay_dbm"] = watt_to_dbm(noise_relay_w);
  j["noise_ap_dbm"] = watt_to_dbm(noise_ap_w);
  j["d_ua_m"] = geometry.d_ua_m;
  j["d_ur_m"] = geometry.d_ur_m;
  j["d_ra_m"] = geometry.d_ra_m;
  j["path_loss"] = model_name(path_loss);
  return j.dump(2);
}

SystemConfig SystemConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  SystemConfig c;
  c.n_ue = j.value("n_ue", c.n_ue);
  c.n_relay = j.value("n_relay", c.n_relay);
  c.n_ap = j.value("n_ap", c.n_ap);
  c.n_streams = j.value("n_streams", c.n_streams);
  c.f_low_ghz = j.value("f_low_ghz", c.f_low_ghz);
  c.f_high_ghz = j.value("f_high_ghz", c.f_high_ghz);
  if (j.contains("p_ua_fl_dbm")) c.p_ua_fl_w = dbm_to_watt(j["p_ua_fl_dbm"].get<double>());
  if (j.contains("p_ur_fh_dbm")) c.p_ur_fh_w = dbm_to_watt(j["p_ur_fh_dbm"].get<double>());
  if (j.contains("p_relay_dbm")) c.p_relay_w = dbm_to_watt(j["p_relay_dbm"].get<double>());
  if (j.contains("noise_relay_dbm")) c.noise_relay_w = dbm_to_watt(j["noise_relay_dbm"].get<double>());
  if (j.contains("noise_ap_dbm")) c.noise_ap_w = dbm_to_watt(j["noise_ap_dbm"].get<double>());
  c.geometry.d_ua_m = j.value("d_ua_m", c.geometry.d_ua_m);
  c.geometry.d_ur_m = j.value("d_ur_m", c.geometry.d_ur_m);
  c.geometry.d_ra_m = j.value("d_ra_m", c.geometry.d_ra_m);
  if (j.contains("path_loss")) c.path_loss = model_from_name(j["path_loss"].get<std::string>());
  c.validate();
  return c;
}

SystemConfig SystemConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("SystemConfig: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

BeamformerSolution zero_solution(const SystemConfig& c) {
  BeamformerSolution s;
  s.w_ua = CMatrix::Zero(c.n_ue, c.n_streams);
  s.w_ur = CMatrix::Zero(c.n_ue, c.n_streams);
  s.psi = CMatrix::Zero(c.n_relay, c.n_relay);
  return s;
}

namespace {

void check_shapes(const ChannelSet& ch, const BeamformerSolution& sol) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("shape mismatch: ") + what);
  };
  need(sol.w_ua.rows() == ch.h_ua_fl.cols(), "w_ua rows vs h_ua_fl cols");
  need(sol.w_ur.rows() == ch.h_ur_fh.cols(), "w_ur rows vs h_ur_fh cols");
  need(sol.psi.rows() == ch.h_ra_fl.cols(), "psi rows vs h_ra_fl cols");
  need(sol.psi.cols() == ch.h_ur_fh.rows(), "psi cols vs h_ur_fh rows");
  need(sol.w_ua.cols() == sol.w_ur.cols(), "w_ua cols vs w_ur cols");
  require_finite(sol.w_ua, "w_ua");
  require_finite(sol.w_ur, "w_ur");
  require_finite(sol.psi, "psi");
}

}  // namespace

CMatrix effective_channel(const ChannelSet& ch, const BeamformerSolution& sol) {
  check_shapes(ch, sol);
  const Eigen::Index ns = sol.w_ua.cols();
  CMatrix h(ch.h_ua_fl.rows(), 2 * ns);
  h.leftCols(ns) = ch.h_ua_fl * sol.w_ua;
  h.rightCols(ns) = ch.h_ra_fl * (sol.psi * (ch.h_ur_fh * sol.w_ur));
  return h;
}

CMatrix noise_covariance(const ChannelSet& ch, const BeamformerSolution& sol,
                         const SystemConfig& config) {
  const CMatrix hp = ch.h_ra_fl * sol.psi;  // N_a x N_r
  CMatrix j = config.noise_relay_w * (hp * hp.adjoint());
  j += config.noise_ap_w * CMatrix::Identity(j.rows(), j.cols());
  return (j + j.adjoint()) / 2.0;
}

double relay_transmit_power(const ChannelSet& ch, const BeamformerSolution& sol,
                            const SystemConfig& config) {
  const CMatrix fwd = sol.psi * (ch.h_ur_fh * sol.w_ur);
  return frob2(fwd) + config.noise_relay_w * frob2(sol.psi);
}

double rate_from_effective(const CMatrix& h_eff, const CMatrix& j) {
  const CMatrix x = hermitian_solve(j, h_eff);  // J^-1 H
  const Eigen::Index m = h_eff.cols();
  CMatrix a = CMatrix::Identity(m, m) + h_eff.adjoint() * x;
  a = (a + a.adjoint()) / 2.0;
  return logdet_hermitian(a, LogBase::two);
}

FeasibilityReport validate_solution(const ChannelSet& ch,
                                    const BeamformerSolution& sol,
                                    const SystemConfig& config) {
  check_shapes(ch, sol);
  FeasibilityReport rep;
  auto add = [&rep](const char* name, double used, double budget) {
    ConstraintSlack c;
    c.name = name;
    c.used = used;
    c.budget = budget;
    c.slack = budget - used;
    c.satisfied = used <= budget + rep.rel_tolerance * std::max(budget, 1e-30);
    rep.feasible = rep.feasible && c.satisfied;
    rep.constraints.push_back(std::move(c));
  };
  add("ue_low_band_power", frob2(sol.w_ua), config.p_ua_fl_w);
  add("ue_high_band_power", frob2(sol.w_ur), config.p_ur_fh_w);
  add("relay_forward_power", relay_transmit_power(ch, sol, config), config.p_relay_w);
  return rep;
}

double achievable_rate(const ChannelSet& ch, const BeamformerSolution& sol,
                       const SystemConfig& config, bool check_feasible) {
  if (check_feasible) {
    const FeasibilityReport rep = validate_solution(ch, sol, config);
    if (!rep.feasible) {
      std::string msg = "achievable_rate: infeasible solution:";
      for (const auto& c : rep.constraints)
        if (!c.satisfied)
          msg += " " + c.name + " used " + std::to_string(c.used) + " > budget " +
                 std::to_string(c.budget);
      throw std::invalid_argument(msg);
    }
  }
  const CMatrix h = effective_channel(ch, sol);
  const CMatrix j = noise_covariance(ch, sol, config);
  return rate_from_effective(h, j);
}

}  // namespace raca
