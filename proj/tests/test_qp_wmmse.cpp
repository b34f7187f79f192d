#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "raca/channel.hpp"
#include "raca/qp_solvers.hpp"
#include "raca/system.hpp"
#include "raca/wmmse.hpp"
#include "support/oracles.hpp"

using namespace raca;
using namespace raca::testing;

namespace {

constexpr double kTol = 1e-12;
constexpr int kIters = 300;

double relay_objective(const CMatrix& b, const CMatrix& c, const CMatrix& m,
                       const CMatrix& psi) {
  return (psi.adjoint() * b * psi * m).trace().real() -
         2.0 * (psi.adjoint() * c.adjoint()).trace().real();
}

// Reference solution of the weighted relay program via a change of variables:
// with M = L L^H and Theta = Psi L the problem is a plain trace-constrained
// program in Theta, which the single-constraint solver handles. Restricting
// Theta to the range of B is lossless when the linear term lies in that range.
CMatrix relay_reference(const CMatrix& b, const CMatrix& c, const CMatrix& m,
                        double budget) {
  Eigen::LLT<CMatrix> llt((m + m.adjoint()) / 2.0);
  REQUIRE(llt.info() == Eigen::Success);
  const CMatrix ctil = llt.matrixL().solve(c);  // L^-1 C
  const EigResult eig = hermitian_eig((b + b.adjoint()) / 2.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues(i) > 1e-8 * eig.eigenvalues(0)) ++rank;
  REQUIRE(rank > 0);
  const CMatrix q = eig.u.leftCols(rank);
  const CMatrix br = q.adjoint() * b * q;
  const QpStepResult inner = minimize_power_constrained(
      (br + br.adjoint()) / 2.0, ctil * q, budget, 1e-13, kIters);
  const CMatrix theta = q * inner.w;
  return llt.matrixU().solve(theta.adjoint()).adjoint();  // Theta L^-1
}

}  // namespace

TEST_CASE("single-budget solver satisfies the optimality conditions") {
  std::mt19937_64 gen(101);
  for (int n : {2, 4, 6}) {
    for (int k : {1, 2, 4}) {
      for (double budget : {1e-2, 1.0, 37.5}) {
        for (int deficient : {0, 1}) {
          const Eigen::Index inner = deficient ? std::max(1, n - 2) : n;
          const CMatrix b = random_gram(n, inner, gen);
          const CMatrix c = randn_complex(k, n, gen);
          const QpStepResult res =
              minimize_power_constrained(b, c, budget, kTol, kIters);
          const KktReport rep = kkt_single(b, c, budget, res.w, res.nu);
          CAPTURE(n);
          CAPTURE(k);
          CAPTURE(budget);
          CAPTURE(deficient);
          CHECK(rep.worst() < 1e-6);
          CHECK(rep.multiplier_ok);
          CHECK(res.power <= budget * (1.0 + 1e-9));
          CHECK(std::abs(res.power - res.w.squaredNorm()) <=
                1e-9 * std::max(1.0, res.power));
        }
      }
    }
  }
}

TEST_CASE("single-budget solver handles degenerate inputs") {
  std::mt19937_64 gen(7);
  const CMatrix b = random_gram(4, 4, gen);
  const CMatrix c = randn_complex(2, 4, gen);

  SUBCASE("zero budget returns the zero matrix") {
    const QpStepResult res = minimize_power_constrained(b, c, 0.0, kTol, kIters);
    CHECK(res.w.norm() == 0.0);
    CHECK(res.nu == 0.0);
    CHECK(res.power == 0.0);
  }
  SUBCASE("zero linear term returns the zero matrix") {
    const CMatrix c0 = CMatrix::Zero(2, 4);
    const QpStepResult res = minimize_power_constrained(b, c0, 1.0, kTol, kIters);
    CHECK(res.w.norm() == 0.0);
    CHECK(res.nu == 0.0);
  }
  SUBCASE("mismatched shapes are rejected") {
    CHECK_THROWS_AS(minimize_power_constrained(b, randn_complex(2, 3, gen), 1.0,
                                               kTol, kIters),
                    std::invalid_argument);
  }
}

TEST_CASE("slack budget deactivates the constraint") {
  std::mt19937_64 gen(11);
  const CMatrix b = random_gram(4, 6, gen, 0.5);  // safely positive definite
  const CMatrix c = randn_complex(2, 4, gen);
  const QpStepResult res = minimize_power_constrained(b, c, 1e9, kTol, kIters);
  CHECK(res.nu == 0.0);
  CHECK((b * res.w - c.adjoint()).norm() <= 1e-9 * std::max(1.0, c.norm()));
}

TEST_CASE("two-budget solver satisfies the optimality conditions") {
  std::mt19937_64 gen(211);
  for (double budget1 : {5e-3, 1.0}) {
    for (double budget2 : {1e-3, 0.5}) {
      for (int rep_i = 0; rep_i < 4; ++rep_i) {
        const int n = 4;
        const CMatrix b = random_gram(n, n, gen);
        const CMatrix b2 = random_gram(n, n, gen);
        const CMatrix c = randn_complex(2, n, gen);
        const QpStep2Result res = minimize_two_power_constrained(
            b, b2, c, budget1, budget2, kTol, kIters);
        const KktReport rep =
            kkt_two(b, b2, c, budget1, budget2, res.w, res.nu1, res.nu2);
        CAPTURE(budget1);
        CAPTURE(budget2);
        CHECK(rep.worst() < 1e-6);
        CHECK(rep.multiplier_ok);
        CHECK(res.power1 <= budget1 * (1.0 + 1e-9));
        CHECK(res.power2 <= budget2 * (1.0 + 1e-9));
      }
    }
  }
}

TEST_CASE("two-budget solver with both constraints slack hits the free optimum") {
  std::mt19937_64 gen(19);
  const CMatrix b = random_gram(4, 6, gen, 0.5);
  const CMatrix b2 = random_gram(4, 4, gen);
  const CMatrix c = randn_complex(2, 4, gen);
  const QpStep2Result res =
      minimize_two_power_constrained(b, b2, c, 1e9, 1e9, kTol, kIters);
  CHECK(res.nu1 == 0.0);
  CHECK(res.nu2 == 0.0);
  CHECK((b * res.w - c.adjoint()).norm() <= 1e-9 * std::max(1.0, c.norm()));
}

TEST_CASE("zero weighted budget restricts the solution to the null space") {
  std::mt19937_64 gen(23);
  const int n = 5;
  const CMatrix b = random_gram(n, n, gen);
  const CMatrix b2 = random_gram(n, n - 2, gen);  // rank n-2, null dim 2
  const CMatrix c = randn_complex(2, n, gen);
  const double budget1 = 0.5;
  const QpStep2Result res =
      minimize_two_power_constrained(b, b2, c, budget1, 0.0, kTol, kIters);

  CHECK(res.w.norm() > 0.0);
  CHECK(res.power1 <= budget1 * (1.0 + 1e-9));
  CHECK(res.power2 <= 1e-10 * b2.norm() * std::max(1.0, res.power1));

  // Stationarity restricted to the feasible subspace.
  const EigResult eig = hermitian_eig(b2);
  const CMatrix null_basis = eig.u.rightCols(2);
  const CMatrix grad = b * res.w + res.nu1 * res.w - c.adjoint();
  CHECK((null_basis.adjoint() * grad).norm() <= 1e-7 * std::max(1.0, c.norm()));
  // And the solution itself lives there.
  CHECK((res.w - null_basis * (null_basis.adjoint() * res.w)).norm() <=
        1e-8 * std::max(1.0, res.w.norm()));
}

TEST_CASE("zero weighted budget with a full-rank weight forces zero") {
  std::mt19937_64 gen(29);
  const CMatrix b = random_gram(4, 4, gen);
  const CMatrix b2 = random_gram(4, 6, gen, 0.1);  // positive definite
  const CMatrix c = randn_complex(2, 4, gen);
  const QpStep2Result res =
      minimize_two_power_constrained(b, b2, c, 1.0, 0.0, kTol, kIters);
  CHECK(res.w.norm() == 0.0);
}

TEST_CASE("relay solver satisfies the optimality conditions") {
  std::mt19937_64 gen(307);
  for (double budget : {1e-2, 1.0}) {
    for (int rep_i = 0; rep_i < 5; ++rep_i) {
      const int n = 4;
      const CMatrix b = random_gram(n, n, gen);
      const CMatrix m = random_gram(n, 6, gen, 0.1);  // positive definite
      const CMatrix c = randn_complex(n, n, gen);
      const RelayQpResult res =
          minimize_relay_constrained(b, c, m, budget, kTol, kIters);
      const KktReport rep = kkt_relay(b, c, m, budget, res.psi, res.nu);
      CAPTURE(budget);
      CHECK(rep.worst() < 1e-6);
      CHECK(rep.multiplier_ok);
      const double used = (res.psi * m * res.psi.adjoint()).trace().real();
      CHECK(used <= budget * (1.0 + 1e-9));
      CHECK(std::abs(res.power - used) <= 1e-9 * std::max(1.0, used));
    }
  }
}

TEST_CASE("relay solver with a slack budget hits the free optimum") {
  std::mt19937_64 gen(31);
  const CMatrix b = random_gram(4, 6, gen, 0.5);
  const CMatrix m = random_gram(4, 6, gen, 0.5);
  const CMatrix c = randn_complex(4, 4, gen);
  const RelayQpResult res =
      minimize_relay_constrained(b, c, m, 1e9, kTol, kIters);
  CHECK(res.nu == 0.0);
  CHECK((b * res.psi * m - c.adjoint()).norm() <=
        1e-8 * std::max(1.0, c.norm()));
}

TEST_CASE("relay solver rejects an indefinite weighting matrix") {
  std::mt19937_64 gen(37);
  const CMatrix b = random_gram(3, 3, gen);
  const CMatrix c = randn_complex(3, 3, gen);
  CMatrix m = CMatrix::Identity(3, 3);
  m(2, 2) = -1.0;
  CHECK_THROWS_AS(minimize_relay_constrained(b, c, m, 1.0, kTol, kIters),
                  NumericError);
}

TEST_CASE("relay solver matches the reduced reference on singular forms") {
  std::mt19937_64 gen(401);
  for (int rep_i = 0; rep_i < 6; ++rep_i) {
    const int n = 4;
    // Quadratic form of rank 2 with the linear term inside its range, and an
    // ill-conditioned positive definite weight: the regime where naive
    // spectral division radiates noise.
    const CMatrix a = randn_complex(2, n, gen);
    const CMatrix z = random_gram(2, 3, gen, 0.05);
    const CMatrix b0 = a.adjoint() * z * a;
    const CMatrix b = (b0 + b0.adjoint()) / 2.0;
    const CMatrix r = randn_complex(n, n, gen);
    const CMatrix c = (b * r).adjoint();  // C^H = B R lies in range(B)
    const CMatrix d = randn_complex(n, 2, gen);
    const CMatrix m = d * d.adjoint() +
                      1e-6 * d.squaredNorm() * CMatrix::Identity(n, n);
    const double budget = 1e-2;

    const RelayQpResult res =
        minimize_relay_constrained(b, c, m, budget, kTol, kIters);
    CHECK(res.power <= budget * (1.0 + 1e-6));

    const CMatrix ref = relay_reference(b, c, m, budget);
    CHECK((ref * m * ref.adjoint()).trace().real() <= budget * (1.0 + 1e-6));

    const double got = relay_objective(b, c, m, res.psi);
    const double want = relay_objective(b, c, m, ref);
    CAPTURE(rep_i);
    CHECK(got <= 1e-12);  // no worse than radiating nothing
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("mmse receiver and inverse weight reach the known fixed points") {
  SystemConfig cfg;
  WmmseSettings st;
  st.init = WmmseSettings::Init::random;
  for (int trial = 0; trial < 10; ++trial) {
    const ChannelSet ch = generate_channels(cfg, 600 + trial);
    st.init_seed = 40 + trial;
    WmmseState state;
    state.sol = wmmse_initial_point(ch, cfg, st);
    state.sol.w_a = update_receiver(ch, state.sol, cfg);
    state.z = update_weight(ch, state.sol, cfg);

    const CMatrix e = mse_matrix(ch, state.sol, cfg);
    const double ns2 = 2.0 * cfg.n_streams;
    CHECK((state.z * e).trace().real() == doctest::Approx(ns2).epsilon(1e-9));

    // With the mmse receiver in place the rate is the negated log-det of the
    // error matrix, checked against an independent factorization.
    const double rate = achievable_rate(ch, state.sol, cfg, false);
    const double logdet2 = chol_logdet_natural(e) / std::log(2.0);
    CHECK(std::abs(rate + logdet2) <= 1e-8);
  }
}

TEST_CASE("mse matrix requires a receiver") {
  SystemConfig cfg;
  const ChannelSet ch = generate_channels(cfg, 8);
  const BeamformerSolution sol = zero_solution(cfg);
  CHECK_THROWS_AS(mse_matrix(ch, sol, cfg), std::invalid_argument);
}

TEST_CASE("every block update lowers the surrogate objective") {
  SystemConfig cfg;
  WmmseSettings st;
  st.init = WmmseSettings::Init::random;
  const double slack = 1e-9;
  for (int trial = 0; trial < 10; ++trial) {
    const ChannelSet ch = generate_channels(cfg, 700 + trial);
    st.init_seed = trial;
    WmmseState state;
    state.sol = wmmse_initial_point(ch, cfg, st);
    state.sol.w_a = update_receiver(ch, state.sol, cfg);
    state.z = update_weight(ch, state.sol, cfg);
    double obj = wmmse_objective(ch, state, cfg);

    auto step = [&](const char* label, auto&& apply) {
      apply();
      const double next = wmmse_objective(ch, state, cfg);
      CAPTURE(trial);
      CAPTURE(label);
      CHECK(next <= obj + slack * std::max(1.0, std::abs(obj)));
      CHECK(validate_solution(ch, state.sol, cfg).feasible);
      obj = next;
    };

    for (int round = 0; round < 15; ++round) {
      step("receiver", [&] { state.sol.w_a = update_receiver(ch, state.sol, cfg); });
      step("weight", [&] { state.z = update_weight(ch, state.sol, cfg); });
      step("ue_low", [&] { state.sol.w_ua = update_precoder_direct(ch, state, cfg, st); });
      step("ue_high", [&] { state.sol.w_ur = update_precoder_relaylink(ch, state, cfg, st); });
      step("relay", [&] { state.sol.psi = update_relay_matrix(ch, state, cfg, st); });
    }
  }
}

TEST_CASE("full solve produces a monotone, feasible, reproducible run") {
  SystemConfig cfg;
  const ChannelSet ch = generate_channels(cfg, 42);
  WmmseSettings st;
  st.eps_min = 1e-4;
  st.init = WmmseSettings::Init::random;
  st.init_seed = 7;

  const WmmseResult res = solve_wmmse(ch, cfg, st);
  REQUIRE(res.iterations >= 1);
  REQUIRE(res.rate_history.size() ==
          static_cast<std::size_t>(res.iterations) + 1);
  CHECK(res.trace.records.size() == res.rate_history.size());
  for (std::size_t i = 0; i < res.rate_history.size(); ++i) {
    CHECK(res.trace.records[i].iteration == static_cast<int>(i));
    CHECK(res.trace.records[i].rate_bits ==
          doctest::Approx(res.rate_history[i]));
    if (i > 0) CHECK(res.rate_history[i] >= res.rate_history[i - 1] - 1e-9);
  }
  CHECK(res.rate_bits == res.rate_history.back());
  CHECK(res.trace.records[0].objective ==
        doctest::Approx(2.0 * cfg.n_streams -
                        std::log(2.0) * res.rate_history[0]));
  REQUIRE(res.solution.w_a.has_value());
  CHECK(validate_solution(ch, res.solution, cfg).feasible);
  CHECK(achievable_rate(ch, res.solution, cfg) ==
        doctest::Approx(res.rate_bits).epsilon(1e-9));

  const WmmseResult again = solve_wmmse(ch, cfg, st);
  CHECK(again.rate_bits == res.rate_bits);
  CHECK(again.iterations == res.iterations);

  WmmseSettings coarse = st;
  coarse.eps_min = 1e-2;
  const WmmseResult quick = solve_wmmse(ch, cfg, coarse);
  CHECK(quick.iterations <= res.iterations);
  CHECK(quick.rate_bits <= res.rate_bits + 1e-9);
}

TEST_CASE("default and equal-power starts are feasible and distinct") {
  SystemConfig cfg;
  const ChannelSet ch = generate_channels(cfg, 43);
  for (auto init : {WmmseSettings::Init::svdwf, WmmseSettings::Init::svd_equal,
                    WmmseSettings::Init::random}) {
    WmmseSettings st;
    st.init = init;
    const BeamformerSolution sol = wmmse_initial_point(ch, cfg, st);
    CHECK(sol.w_ua.norm() > 0.0);
    CHECK(validate_solution(ch, sol, cfg).feasible);
  }
}

TEST_CASE("solver stays stable when the noise floor swamps the signal") {
  SystemConfig cfg;
  cfg.noise_relay_w = dbm_to_watt(-30.0);
  cfg.noise_ap_w = dbm_to_watt(-30.0);
  const ChannelSet ch = generate_channels(cfg, 44);
  WmmseSettings st;
  st.eps_min = 1e-4;
  const WmmseResult res = solve_wmmse(ch, cfg, st);
  CHECK(res.rate_bits >= 0.0);
  CHECK(validate_solution(ch, res.solution, cfg).feasible);
}
