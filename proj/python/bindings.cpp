#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "raca/baselines.hpp"
#include "raca/harness.hpp"
#include "raca/metrics.hpp"
#include "raca/protocol.hpp"
#include "raca/svdwf.hpp"
#include "raca/system.hpp"
#include "raca/wmmse.hpp"

namespace py = pybind11;
using namespace raca;

PYBIND11_MODULE(_core, m) {
  m.doc() = "dual-band relay-aided MIMO uplink toolkit";

  py::register_exception<NumericError>(m, "NumericError");

  m.def("dbm_to_watt", &dbm_to_watt, py::arg("dbm"));
  m.def("watt_to_dbm", &watt_to_dbm, py::arg("watt"));

  py::enum_<PathLossModel>(m, "PathLossModel")
      .value("inh_nlos", PathLossModel::inh_nlos)
      .value("inh_los", PathLossModel::inh_los);

  m.def("path_loss_db", &path_loss_db, py::arg("distance_m"), py::arg("fc_ghz"),
        py::arg("model") = PathLossModel::inh_nlos);

  py::class_<Geometry>(m, "Geometry")
      .def(py::init<>())
      .def_readwrite("d_ua_m", &Geometry::d_ua_m)
      .def_readwrite("d_ur_m", &Geometry::d_ur_m)
      .def_readwrite("d_ra_m", &Geometry::d_ra_m);

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("n_ue", &SystemConfig::n_ue)
      .def_readwrite("n_relay", &SystemConfig::n_relay)
      .def_readwrite("n_ap", &SystemConfig::n_ap)
      .def_readwrite("n_streams", &SystemConfig::n_streams)
      .def_readwrite("f_low_ghz", &SystemConfig::f_low_ghz)
      .def_readwrite("f_high_ghz", &SystemConfig::f_high_ghz)
      .def_readwrite("p_ua_fl_w", &SystemConfig::p_ua_fl_w)
      .def_readwrite("p_ur_fh_w", &SystemConfig::p_ur_fh_w)
      .def_readwrite("p_relay_w", &SystemConfig::p_relay_w)
      .def_readwrite("noise_relay_w", &SystemConfig::noise_relay_w)
      .def_readwrite("noise_ap_w", &SystemConfig::noise_ap_w)
      .def_readwrite("geometry", &SystemConfig::geometry)
      .def_readwrite("path_loss", &SystemConfig::path_loss)
      .def("validate", &SystemConfig::validate)
      .def("to_json", &SystemConfig::to_json)
      .def_static("from_json", &SystemConfig::from_json, py::arg("text"))
      .def_static("load", &SystemConfig::load, py::arg("path"));

  py::class_<ChannelSet>(m, "ChannelSet")
      .def(py::init<>())
      .def_readwrite("h_ua_fl", &ChannelSet::h_ua_fl)
      .def_readwrite("h_ur_fh", &ChannelSet::h_ur_fh)
      .def_readwrite("h_ra_fl", &ChannelSet::h_ra_fl)
      .def_readwrite("h_ua_fh", &ChannelSet::h_ua_fh)
      .def_readwrite("h_ur_fl", &ChannelSet::h_ur_fl)
      .def_readwrite("seed", &ChannelSet::seed);

  m.def("generate_channels", &generate_channels, py::arg("config"),
        py::arg("seed"));
  m.def("channelset_to_json", &channelset_to_json, py::arg("channels"));
  m.def("channelset_from_json", &channelset_from_json, py::arg("text"));

  py::class_<BeamformerSolution>(m, "BeamformerSolution")
      .def(py::init<>())
      .def_readwrite("w_ua", &BeamformerSolution::w_ua)
      .def_readwrite("w_ur", &BeamformerSolution::w_ur)
      .def_readwrite("psi", &BeamformerSolution::psi)
      .def_readwrite("w_a", &BeamformerSolution::w_a);

  m.def("zero_solution", &zero_solution, py::arg("config"));
  m.def("effective_channel", &effective_channel, py::arg("channels"),
        py::arg("solution"));
  m.def("noise_covariance", &noise_covariance, py::arg("channels"),
        py::arg("solution"), py::arg("config"));
  m.def("achievable_rate", &achievable_rate, py::arg("channels"),
        py::arg("solution"), py::arg("config"), py::arg("check_feasible") = true);

  py::class_<ConstraintSlack>(m, "ConstraintSlack")
      .def_readonly("name", &ConstraintSlack::name)
      .def_readonly("used", &ConstraintSlack::used)
      .def_readonly("budget", &ConstraintSlack::budget)
      .def_readonly("slack", &ConstraintSlack::slack)
      .def_readonly("satisfied", &ConstraintSlack::satisfied);

  py::class_<FeasibilityReport>(m, "FeasibilityReport")
      .def_readonly("constraints", &FeasibilityReport::constraints)
      .def_readonly("feasible", &FeasibilityReport::feasible);

  m.def("validate_solution", &validate_solution, py::arg("channels"),
        py::arg("solution"), py::arg("config"));

  py::class_<WmmseSettings> settings(m, "WmmseSettings");
  py::enum_<WmmseSettings::Init>(settings, "Init")
      .value("svdwf", WmmseSettings::Init::svdwf)
      .value("svd_equal", WmmseSettings::Init::svd_equal)
      .value("random", WmmseSettings::Init::random);
  settings.def(py::init<>())
      .def_readwrite("eps_min", &WmmseSettings::eps_min)
      .def_readwrite("t_max", &WmmseSettings::t_max)
      .def_readwrite("init", &WmmseSettings::init)
      .def_readwrite("init_seed", &WmmseSettings::init_seed);

  py::class_<WmmseResult>(m, "WmmseResult")
      .def_readonly("solution", &WmmseResult::solution)
      .def_readonly("rate_bits", &WmmseResult::rate_bits)
      .def_readonly("iterations", &WmmseResult::iterations)
      .def_readonly("rate_history", &WmmseResult::rate_history);

  m.def("solve_wmmse", &solve_wmmse, py::arg("channels"), py::arg("config"),
        py::arg("settings") = WmmseSettings{});

  py::class_<SvdwfSettings>(m, "SvdwfSettings")
      .def(py::init<>())
      .def_readwrite("eps_min", &SvdwfSettings::eps_min)
      .def_readwrite("t_max", &SvdwfSettings::t_max);

  py::class_<WaterfillResult>(m, "WaterfillResult")
      .def_readonly("power", &WaterfillResult::power)
      .def_readonly("nu", &WaterfillResult::nu)
      .def_readonly("all_zero", &WaterfillResult::all_zero);

  m.def("waterfill", &waterfill, py::arg("cnr"), py::arg("budget"),
        py::arg("tol") = 1e-10);

  py::class_<SvdwfResult>(m, "SvdwfResult")
      .def_readonly("solution", &SvdwfResult::solution)
      .def_readonly("direct_rate_bits", &SvdwfResult::direct_rate_bits)
      .def_readonly("relay_rate_bits", &SvdwfResult::relay_rate_bits)
      .def_readonly("combined_rate_bits", &SvdwfResult::combined_rate_bits);

  m.def("solve_svdwf", &solve_svdwf, py::arg("channels"), py::arg("config"),
        py::arg("settings") = SvdwfSettings{});
  m.def("svd_equal_power", &svd_equal_power, py::arg("channels"),
        py::arg("config"));

  py::class_<CaResult>(m, "CaResult")
      .def_readonly("rate_bits", &CaResult::rate_bits);
  m.def("solve_ca", &solve_ca, py::arg("channels"), py::arg("config"));

  py::class_<RaSolution>(m, "RaSolution")
      .def_readonly("w_u", &RaSolution::w_u)
      .def_readonly("psi", &RaSolution::psi)
      .def_readonly("w_a", &RaSolution::w_a);
  py::class_<RaResult>(m, "RaResult")
      .def_readonly("rate_bits", &RaResult::rate_bits)
      .def_readonly("solution", &RaResult::solution)
      .def_readonly("iterations", &RaResult::iterations)
      .def_readonly("rate_history", &RaResult::rate_history);
  m.def(
      "solve_ra",
      [](const ChannelSet& ch, const SystemConfig& cfg,
         const WmmseSettings& settings) { return solve_ra(ch, cfg, settings); },
      py::arg("channels"), py::arg("config"),
      py::arg("settings") = WmmseSettings{});

  py::class_<MimoResult>(m, "MimoResult")
      .def_readonly("rate_bits", &MimoResult::rate_bits);
  m.def("solve_mimo", &solve_mimo, py::arg("channels"), py::arg("config"));

  py::class_<OverheadReport>(m, "OverheadReport")
      .def_readonly("centralized", &OverheadReport::centralized)
      .def_readonly("distributed", &OverheadReport::distributed)
      .def_readonly("async_saving", &OverheadReport::async_saving)
      .def_readonly("breakeven_coherence_ratio",
                    &OverheadReport::breakeven_coherence_ratio);
  m.def("overhead", &overhead, py::arg("config"));
  m.def("overhead_counts", &overhead_counts, py::arg("n_ue"), py::arg("n_relay"),
        py::arg("n_ap"), py::arg("n_streams"));

  py::enum_<SystemKind>(m, "SystemKind")
      .value("raca", SystemKind::raca)
      .value("ca", SystemKind::ca)
      .value("ra", SystemKind::ra)
      .value("mimo", SystemKind::mimo);

  py::class_<TransmitPowers>(m, "TransmitPowers")
      .def(py::init<>())
      .def_readwrite("ue_low_w", &TransmitPowers::ue_low_w)
      .def_readwrite("ue_high_w", &TransmitPowers::ue_high_w)
      .def_readwrite("relay_w", &TransmitPowers::relay_w);
  m.def("actual_powers", &actual_powers, py::arg("channels"),
        py::arg("solution"), py::arg("config"));

  py::class_<PowerModel>(m, "PowerModel")
      .def(py::init<>())
      .def_readwrite("pa_efficiency", &PowerModel::pa_efficiency)
      .def_readwrite("pc_ue_w", &PowerModel::pc_ue_w)
      .def_readwrite("pc_relay_w", &PowerModel::pc_relay_w)
      .def_readwrite("pc_ap_w", &PowerModel::pc_ap_w);

  py::class_<EnergyReport>(m, "EnergyReport")
      .def_readonly("rate_bits", &EnergyReport::rate_bits)
      .def_readonly("p_total_w", &EnergyReport::p_total_w)
      .def_readonly("p_ue_w", &EnergyReport::p_ue_w)
      .def_readonly("ee_total", &EnergyReport::ee_total)
      .def_readonly("ee_ue", &EnergyReport::ee_ue);
  m.def("energy_report", &energy_report, py::arg("kind"), py::arg("rate_bits"),
        py::arg("powers"), py::arg("model") = PowerModel{});

  m.def("count_streams", &count_streams, py::arg("channels"),
        py::arg("solution"), py::arg("config"), py::arg("min_bits") = 0.05);
  m.def("trial_seed", &trial_seed, py::arg("base_seed"), py::arg("trial"));
}
