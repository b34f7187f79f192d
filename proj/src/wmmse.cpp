#include "raca/wmmse.hpp"

#include <cmath>

#include "raca/qp_solvers.hpp"
#include "raca/svdwf.hpp"

namespace raca {

namespace {

CMatrix symmetrize(const CMatrix& a) { return (a + a.adjoint()) / 2.0; }

void require_receiver(const BeamformerSolution& sol) {
  if (!sol.w_a)
    throw std::invalid_argument("receiver w_a not set; run update_receiver first");
}

}  // namespace

CMatrix mse_matrix(const ChannelSet& ch, const BeamformerSolution& sol,
                   const SystemConfig& config) {
  require_receiver(sol);
  const CMatrix h = effective_channel(ch, sol);
  const CMatrix j = noise_covariance(ch, sol, config);
  const CMatrix& wa = *sol.w_a;
  const Eigen::Index m = h.cols();
  const CMatrix d = wa * h - CMatrix::Identity(m, m);
  return symmetrize(d * d.adjoint() + wa * j * wa.adjoint());
}

CMatrix update_receiver(const ChannelSet& ch, const BeamformerSolution& sol,
                        const SystemConfig& config) {
  const CMatrix h = effective_channel(ch, sol);
  const CMatrix j = noise_covariance(ch, sol, config);
  const CMatrix gram = symmetrize(h * h.adjoint() + j);
  return hermitian_solve(gram, h).adjoint();  // (G^-1 H)^H = H^H G^-1
}

CMatrix update_weight(const ChannelSet& ch, const BeamformerSolution& sol,
                      const SystemConfig& config) {
  const CMatrix e = mse_matrix(ch, sol, config);
  const Eigen::Index m = e.rows();
  const CMatrix eye = CMatrix::Identity(m, m);
  try {
    return symmetrize(hermitian_solve(e, eye));
  } catch (const NumericError&) {
    const double jitter = 1e-12 * e.trace().real() / static_cast<double>(m);
    try {
      return symmetrize(hermitian_solve(e + jitter * eye, eye));
    } catch (const NumericError&) {
      throw NumericError("update_weight: mse matrix not invertible even after jitter");
    }
  }
}

CMatrix update_precoder_direct(const ChannelSet& ch, const WmmseState& state,
                               const SystemConfig& config,
                               const WmmseSettings& settings) {
  require_receiver(state.sol);
  const int ns = config.n_streams;
  const CMatrix a = (*state.sol.w_a) * ch.h_ua_fl;       // 2N_s x N_u
  const CMatrix b = symmetrize(a.adjoint() * state.z * a);
  const CMatrix c = state.z.topRows(ns) * a;             // N_s x N_u
  return minimize_power_constrained(b, c, config.p_ua_fl_w,
                                    settings.bisect_tol,
                                    settings.bisect_max_iter)
      .w;
}

CMatrix update_precoder_relaylink(const ChannelSet& ch, const WmmseState& state,
                                  const SystemConfig& config,
                                  const WmmseSettings& settings) {
  require_receiver(state.sol);
  const int ns = config.n_streams;
  const CMatrix fwd = state.sol.psi * ch.h_ur_fh;        // N_r x N_u
  const CMatrix a = (*state.sol.w_a) * (ch.h_ra_fl * fwd);  // 2N_s x N_u
  const CMatrix b = symmetrize(a.adjoint() * state.z * a);
  const CMatrix c = state.z.bottomRows(ns) * a;
  const CMatrix b2 = symmetrize(fwd.adjoint() * fwd);
  const double residual =
      config.p_relay_w - config.noise_relay_w * frob2(state.sol.psi);
  if (residual < -1e-9 * std::max(config.p_relay_w, 1e-30))
    throw NumericError(
        "update_precoder_relaylink: relay noise power alone exceeds the relay "
        "budget; re-run the relay matrix update first");
  return minimize_two_power_constrained(b, b2, c, config.p_ur_fh_w,
                                        std::max(residual, 0.0),
                                        settings.bisect_tol,
                                        settings.bisect_max_iter)
      .w;
}

CMatrix update_relay_matrix(const ChannelSet& ch, const WmmseState& state,
                            const SystemConfig& config,
                            const WmmseSettings& settings) {
  require_receiver(state.sol);
  const int ns = config.n_streams;
  const CMatrix a = (*state.sol.w_a) * ch.h_ra_fl;       // 2N_s x N_r
  const CMatrix b = symmetrize(a.adjoint() * state.z * a);
  const CMatrix d = ch.h_ur_fh * state.sol.w_ur;         // N_r x N_s
  const CMatrix c = d * state.z.bottomRows(ns) * a;      // N_r x N_r
  const CMatrix m = symmetrize(
      d * d.adjoint() +
      config.noise_relay_w * CMatrix::Identity(d.rows(), d.rows()));
  return minimize_relay_constrained(b, c, m, config.p_relay_w,
                                    settings.bisect_tol,
                                    settings.bisect_max_iter)
      .psi;
}

double wmmse_objective(const ChannelSet& ch, const WmmseState& state,
                       const SystemConfig& config) {
  const CMatrix e = mse_matrix(ch, state.sol, config);
  return (state.z * e).trace().real() -
         logdet_hermitian(state.z, LogBase::natural);
}

BeamformerSolution wmmse_initial_point(const ChannelSet& ch,
                                       const SystemConfig& config,
                                       const WmmseSettings& settings) {
  switch (settings.init) {
    case WmmseSettings::Init::svdwf:
      return solve_svdwf(ch, config).solution;
    case WmmseSettings::Init::svd_equal:
      return svd_equal_power(ch, config);
    case WmmseSettings::Init::random:
      break;
  }
  // Random entries rescaled so each budget is met with equality.
  RngStream rng(settings.init_seed, 0x77AA);
  BeamformerSolution sol = zero_solution(config);
  auto scaled = [](CMatrix m, double budget) {
    const double p = m.squaredNorm();
    if (budget <= 0.0 || p == 0.0) return CMatrix(CMatrix::Zero(m.rows(), m.cols()));
    return CMatrix(m * std::sqrt(budget / p));
  };
  sol.w_ua = scaled(rayleigh_matrix(config.n_ue, config.n_streams, rng),
                    config.p_ua_fl_w);
  sol.w_ur = scaled(rayleigh_matrix(config.n_ue, config.n_streams, rng),
                    config.p_ur_fh_w);
  const CMatrix psi0 = rayleigh_matrix(config.n_relay, config.n_relay, rng);
  const double used = (psi0 * (ch.h_ur_fh * sol.w_ur)).squaredNorm() +
                      config.noise_relay_w * psi0.squaredNorm();
  sol.psi = (config.p_relay_w > 0.0 && used > 0.0)
                ? CMatrix(psi0 * std::sqrt(config.p_relay_w / used))
                : CMatrix(CMatrix::Zero(config.n_relay, config.n_relay));
  return sol;
}

WmmseResult solve_wmmse(const ChannelSet& ch, const SystemConfig& config,
                        const WmmseSettings& settings) {
  config.validate();
  WmmseState state;
  state.sol = wmmse_initial_point(ch, config, settings);

  auto record = [&](int iter, double rate, double objective) {
    const FeasibilityReport rep = validate_solution(ch, state.sol, config);
    if (!rep.feasible)
      throw NumericError("solve_wmmse: infeasible iterate at round " +
                         std::to_string(iter));
    IterationRecord rec;
    rec.iteration = iter;
    rec.rate_bits = rate;
    rec.objective = objective;
    rec.slack_ua = rep.constraints[0].slack;
    rec.slack_ur = rep.constraints[1].slack;
    rec.slack_r = rep.constraints[2].slack;
    return rec;
  };

  WmmseResult out;
  double rate = achievable_rate(ch, state.sol, config, false);
  state.rate_history.push_back(rate);
  // Objective at the initial point, evaluated at the jointly minimizing
  // receiver/weight pair: 2N_s - ln(2) * rate.
  out.trace.records.push_back(
      record(0, rate, 2.0 * config.n_streams - std::log(2.0) * rate));

  int t = 0;
  for (; t < settings.t_max; ++t) {
    state.sol.w_a = update_receiver(ch, state.sol, config);
    state.z = update_weight(ch, state.sol, config);
    state.sol.w_ua = update_precoder_direct(ch, state, config, settings);
    state.sol.w_ur = update_precoder_relaylink(ch, state, config, settings);
    state.sol.psi = update_relay_matrix(ch, state, config, settings);
    state.iteration = t + 1;

    const double prev = rate;
    rate = achievable_rate(ch, state.sol, config, false);
    state.rate_history.push_back(rate);
    out.trace.records.push_back(
        record(t + 1, rate, wmmse_objective(ch, state, config)));
    if (rate < prev - 1e-9)
      throw NumericError("solve_wmmse: rate decreased at round " +
                         std::to_string(t + 1) + " (" + std::to_string(prev) +
                         " -> " + std::to_string(rate) + ")");
    if (rate - prev < settings.eps_min * std::max(rate, 1e-300)) {
      ++t;
      break;
    }
  }

  out.solution = state.sol;
  out.solution.w_a = update_receiver(ch, state.sol, config);
  out.rate_bits = rate;
  out.iterations = t;
  out.rate_history = state.rate_history;
  return out;
}

}  // namespace raca
