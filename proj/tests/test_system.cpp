#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "raca/channel.hpp"
#include "raca/system.hpp"
#include "support/oracles.hpp"

using namespace raca;
using raca::testing::chol_logdet_natural;
using raca::testing::randn_complex;

TEST_CASE("dbm and watt conversions invert each other") {
  CHECK(dbm_to_watt(10.0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dbm_to_watt(-90.0) == doctest::Approx(1e-12).epsilon(1e-12));
  for (double dbm : {-90.0, -13.7, 0.0, 10.0, 23.5}) {
    CHECK(watt_to_dbm(dbm_to_watt(dbm)) == doctest::Approx(dbm).epsilon(1e-12));
  }
}

TEST_CASE("config defaults pass validation and survive a json round trip") {
  SystemConfig a;
  a.validate();
  a.n_streams = 1;
  a.f_high_ghz = 60.0;
  a.p_relay_w = dbm_to_watt(7.0);
  a.noise_ap_w = dbm_to_watt(-84.0);
  a.geometry.d_ur_m = 2.5;
  a.path_loss = PathLossModel::inh_los;

  const SystemConfig b = SystemConfig::from_json(a.to_json());
  CHECK(b.n_ue == a.n_ue);
  CHECK(b.n_relay == a.n_relay);
  CHECK(b.n_ap == a.n_ap);
  CHECK(b.n_streams == a.n_streams);
  CHECK(b.f_low_ghz == a.f_low_ghz);
  CHECK(b.f_high_ghz == a.f_high_ghz);
  CHECK(b.p_ua_fl_w == doctest::Approx(a.p_ua_fl_w).epsilon(1e-12));
  CHECK(b.p_ur_fh_w == doctest::Approx(a.p_ur_fh_w).epsilon(1e-12));
  CHECK(b.p_relay_w == doctest::Approx(a.p_relay_w).epsilon(1e-12));
  CHECK(b.noise_relay_w == doctest::Approx(a.noise_relay_w).epsilon(1e-12));
  CHECK(b.noise_ap_w == doctest::Approx(a.noise_ap_w).epsilon(1e-12));
  CHECK(b.geometry.d_ua_m == a.geometry.d_ua_m);
  CHECK(b.geometry.d_ur_m == a.geometry.d_ur_m);
  CHECK(b.geometry.d_ra_m == a.geometry.d_ra_m);
  CHECK(b.path_loss == a.path_loss);
}

TEST_CASE("config json accepts partial documents and rejects bad ones") {
  const SystemConfig c = SystemConfig::from_json(R"({"n_streams": 1})");
  CHECK(c.n_streams == 1);
  CHECK(c.n_ue == 2);

  CHECK_THROWS_AS(SystemConfig::from_json(R"({"n_streams": 5})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(SystemConfig::from_json(R"({"path_loss": "free_space"})"),
                  std::invalid_argument);
  CHECK_THROWS(SystemConfig::from_json("not json"));
  CHECK_THROWS_AS(SystemConfig::load("/nonexistent/config.json"),
                  std::invalid_argument);
}

TEST_CASE("config validation rejects each out-of-range field") {
  auto broken = [](auto&& mutate) {
    SystemConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(broken([](SystemConfig& c) { c.n_ue = 0; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](SystemConfig& c) { c.n_streams = 3; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](SystemConfig& c) { c.n_ap = 3; }).validate(),
                  std::invalid_argument);  // cannot carry both stream blocks
  CHECK_THROWS_AS(broken([](SystemConfig& c) { c.f_low_ghz = 0.0; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](SystemConfig& c) { c.p_relay_w = -1.0; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(broken([](SystemConfig& c) { c.noise_ap_w = 0.0; }).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      broken([](SystemConfig& c) { c.geometry.d_ur_m = 0.5; }).validate(),
      std::invalid_argument);
}

TEST_CASE("zero solution has the right shapes and zero rate") {
  SystemConfig cfg;
  const ChannelSet ch = generate_channels(cfg, 1);
  const BeamformerSolution sol = zero_solution(cfg);
  CHECK(sol.w_ua.rows() == cfg.n_ue);
  CHECK(sol.w_ua.cols() == cfg.n_streams);
  CHECK(sol.psi.rows() == cfg.n_relay);
  CHECK(!sol.w_a.has_value());

  const CMatrix h = effective_channel(ch, sol);
  CHECK(h.rows() == cfg.n_ap);
  CHECK(h.cols() == 2 * cfg.n_streams);
  CHECK(h.norm() == 0.0);

  const CMatrix j = noise_covariance(ch, sol, cfg);
  CHECK((j - cfg.noise_ap_w * CMatrix::Identity(cfg.n_ap, cfg.n_ap)).norm() ==
        0.0);
  CHECK(achievable_rate(ch, sol, cfg) == doctest::Approx(0.0));
}

TEST_CASE("effective channel rejects mismatched shapes") {
  SystemConfig cfg;
  const ChannelSet ch = generate_channels(cfg, 2);
  BeamformerSolution sol = zero_solution(cfg);
  sol.w_ua = CMatrix::Zero(3, cfg.n_streams);
  CHECK_THROWS_AS(effective_channel(ch, sol), std::invalid_argument);
}

TEST_CASE("rate is invariant under a unitary receive-side rotation") {
  SystemConfig cfg;
  const ChannelSet ch = generate_channels(cfg, 3);
  std::mt19937_64 gen(17);
  BeamformerSolution sol = zero_solution(cfg);
  sol.w_ua = 0.05 * randn_complex(cfg.n_ue, cfg.n_streams, gen);
  sol.w_ur = 0.05 * randn_complex(cfg.n_ue, cfg.n_streams, gen);
  sol.psi = 10.0 * randn_complex(cfg.n_relay, cfg.n_relay, gen);

  const CMatrix h = effective_channel(ch, sol);
  const CMatrix j = noise_covariance(ch, sol, cfg);
  const double base = rate_from_effective(h, j);

  const SvdResult qdec = svd(randn_complex(cfg.n_ap, cfg.n_ap, gen));
  const CMatrix q = qdec.u;
  CMatrix jq = q * j * q.adjoint();
  jq = (jq + jq.adjoint()) / 2.0;
  CHECK(rate_from_effective(q * h, jq) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("rate matches an independent log-determinant evaluation") {
  SystemConfig cfg;
  std::mt19937_64 gen(29);
  for (int rep = 0; rep < 5; ++rep) {
    const ChannelSet ch = generate_channels(cfg, 50 + rep);
    BeamformerSolution sol = zero_solution(cfg);
    sol.w_ua = 0.05 * randn_complex(cfg.n_ue, cfg.n_streams, gen);
    sol.w_ur = 0.05 * randn_complex(cfg.n_ue, cfg.n_streams, gen);
    sol.psi = 20.0 * randn_complex(cfg.n_relay, cfg.n_relay, gen);
    const CMatrix h = effective_channel(ch, sol);
    const CMatrix j = noise_covariance(ch, sol, cfg);

    const CMatrix k = CMatrix::Identity(h.cols(), h.cols()) +
                      h.adjoint() * j.inverse() * h;
    const double want =
        chol_logdet_natural((k + k.adjoint()) / 2.0) / std::log(2.0);
    CHECK(rate_from_effective(h, j) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("rate decreases when the receiver noise floor rises") {
  SystemConfig cfg;
  const ChannelSet ch = generate_channels(cfg, 4);
  std::mt19937_64 gen(5);
  BeamformerSolution sol = zero_solution(cfg);
  sol.w_ua = 0.05 * randn_complex(cfg.n_ue, cfg.n_streams, gen);
  const double quiet = achievable_rate(ch, sol, cfg, false);
  SystemConfig loud = cfg;
  loud.noise_ap_w *= 100.0;
  CHECK(achievable_rate(ch, sol, loud, false) < quiet);
}

TEST_CASE("feasibility report flags each violated budget") {
  SystemConfig cfg;
  const ChannelSet ch = generate_channels(cfg, 5);
  BeamformerSolution sol = zero_solution(cfg);
  sol.w_ua = CMatrix::Constant(cfg.n_ue, cfg.n_streams,
                               Complex(std::sqrt(cfg.p_ua_fl_w), 0.0));
  const FeasibilityReport rep = validate_solution(ch, sol, cfg);
  REQUIRE(rep.constraints.size() == 3);
  CHECK(rep.constraints[0].name == "ue_low_band_power");
  CHECK(!rep.constraints[0].satisfied);
  CHECK(rep.constraints[0].slack < 0.0);
  CHECK(rep.constraints[1].satisfied);
  CHECK(rep.constraints[2].satisfied);
  CHECK(!rep.feasible);
  CHECK_THROWS_AS(achievable_rate(ch, sol, cfg, true), std::invalid_argument);
  CHECK(achievable_rate(ch, sol, cfg, false) > 0.0);
}

TEST_CASE("relay transmit power combines forwarded signal and amplified noise") {
  SystemConfig cfg;
  const ChannelSet ch = generate_channels(cfg, 6);
  BeamformerSolution sol = zero_solution(cfg);
  std::mt19937_64 gen(13);
  sol.w_ur = 0.03 * randn_complex(cfg.n_ue, cfg.n_streams, gen);
  sol.psi = 5.0 * randn_complex(cfg.n_relay, cfg.n_relay, gen);
  const double want = (sol.psi * ch.h_ur_fh * sol.w_ur).squaredNorm() +
                      cfg.noise_relay_w * sol.psi.squaredNorm();
  CHECK(relay_transmit_power(ch, sol, cfg) == doctest::Approx(want).epsilon(1e-12));
}
