#include "raca/baselines.hpp"

#include <cmath>

#include "raca/qp_solvers.hpp"

namespace raca {

CaResult solve_ca(const ChannelSet& ch, const SystemConfig& config) {
  config.validate();
  CaResult out;
  out.low = optimize_link(ch.h_ua_fl, config.noise_ap_w, config.p_ua_fl_w,
                          config.n_streams);
  out.high = optimize_link(ch.h_ua_fh, config.noise_ap_w,
                           config.p_ur_fh_w + config.p_relay_w,
                           config.n_streams);
  out.rate_bits = out.low.rate_bits + out.high.rate_bits;
  return out;
}

MimoResult solve_mimo(const ChannelSet& ch, const SystemConfig& config) {
  config.validate();
  MimoResult out;
  out.link = optimize_link(
      ch.h_ua_fl, config.noise_ap_w,
      config.p_ua_fl_w + config.p_ur_fh_w + config.p_relay_w,
      config.n_streams);
  out.rate_bits = out.link.rate_bits;
  return out;
}

namespace {

CMatrix symmetrize(const CMatrix& a) { return (a + a.adjoint()) / 2.0; }

struct RaWorkspace {
  const ChannelSet& ch;
  const SystemConfig& cfg;
  double p_ue;  // pooled UE budget

  CMatrix combined(const CMatrix& psi) const {
    return ch.h_ra_fl * psi * ch.h_ur_fl + ch.h_ua_fl;  // N_a x N_u
  }
  CMatrix noise_cov(const CMatrix& psi) const {
    const CMatrix hp = ch.h_ra_fl * psi;
    CMatrix j = cfg.noise_relay_w * (hp * hp.adjoint());
    j += cfg.noise_ap_w * CMatrix::Identity(j.rows(), j.cols());
    return symmetrize(j);
  }
  double relay_power(const RaSolution& s) const {
    return (s.psi * (ch.h_ur_fl * s.w_u)).squaredNorm() +
           cfg.noise_relay_w * s.psi.squaredNorm();
  }
  double rate(const RaSolution& s) const {
    return rate_from_effective(combined(s.psi) * s.w_u, noise_cov(s.psi));
  }
};

CMatrix inverse_of_mse(const CMatrix& e) {
  const Eigen::Index m = e.rows();
  const CMatrix eye = CMatrix::Identity(m, m);
  try {
    return symmetrize(hermitian_solve(e, eye));
  } catch (const NumericError&) {
    const double jitter = 1e-12 * e.trace().real() / static_cast<double>(m);
    return symmetrize(hermitian_solve(e + jitter * eye, eye));
  }
}

}  // namespace

RaResult solve_ra(const ChannelSet& ch, const SystemConfig& config,
                  const WmmseSettings& settings, const RaOptions& options) {
  config.validate();
  const int ns = config.n_streams;
  RaWorkspace ws{ch, config, config.p_ua_fl_w + config.p_ur_fh_w};

  RaResult out;
  RaSolution s;
  // Deterministic start: direct-link eigenmode waterfilling for the UE,
  // scaled identity on the relay budget.
  s.w_u = optimize_link(ch.h_ua_fl, config.noise_ap_w, ws.p_ue, ns).w;
  if (options.force_psi_zero) {
    s.psi = CMatrix::Zero(config.n_relay, config.n_relay);
  } else {
    const double used = (ch.h_ur_fl * s.w_u).squaredNorm() +
                        config.noise_relay_w * config.n_relay;
    s.psi = (config.p_relay_w > 0.0 && used > 0.0)
                ? CMatrix(std::sqrt(config.p_relay_w / used) *
                          CMatrix::Identity(config.n_relay, config.n_relay))
                : CMatrix(CMatrix::Zero(config.n_relay, config.n_relay));
  }

  auto record = [&](int iter, double rate_bits, double objective) {
    IterationRecord rec;
    rec.iteration = iter;
    rec.rate_bits = rate_bits;
    rec.objective = objective;
    rec.slack_ua = ws.p_ue - s.w_u.squaredNorm();
    rec.slack_ur = 0.0;
    rec.slack_r = config.p_relay_w - ws.relay_power(s);
    return rec;
  };

  double rate = ws.rate(s);
  out.rate_history.push_back(rate);
  out.trace.records.push_back(record(0, rate, 2.0 * ns - std::log(2.0) * rate));

  CMatrix z = CMatrix::Identity(ns, ns);
  int t = 0;
  for (; t < settings.t_max; ++t) {
    const CMatrix g = ws.combined(s.psi);       // N_a x N_u
    const CMatrix h_eff = g * s.w_u;            // N_a x N_s
    const CMatrix j = ws.noise_cov(s.psi);
    s.w_a = hermitian_solve(symmetrize(h_eff * h_eff.adjoint() + j), h_eff)
                .adjoint();
    const CMatrix delta = s.w_a * h_eff - CMatrix::Identity(ns, ns);
    const CMatrix e =
        symmetrize(delta * delta.adjoint() + s.w_a * j * s.w_a.adjoint());
    z = inverse_of_mse(e);

    {  // UE precoder: both the pooled budget and the forwarded power bind it.
      const CMatrix a = s.w_a * g;              // N_s x N_u
      const CMatrix b = symmetrize(a.adjoint() * z * a);
      const CMatrix c = z * a;
      const CMatrix fwd = s.psi * ch.h_ur_fl;   // N_r x N_u
      const CMatrix b2 = symmetrize(fwd.adjoint() * fwd);
      const double residual =
          config.p_relay_w - config.noise_relay_w * frob2(s.psi);
      s.w_u = minimize_two_power_constrained(
                  b, b2, c, ws.p_ue, std::max(residual, 0.0),
                  settings.bisect_tol, settings.bisect_max_iter)
                  .w;
    }

    if (!options.force_psi_zero) {
      const CMatrix a_ra = s.w_a * ch.h_ra_fl;  // N_s x N_r
      const CMatrix b = symmetrize(a_ra.adjoint() * z * a_ra);
      const CMatrix d = ch.h_ur_fl * s.w_u;     // N_r x N_s
      // Linear term from the direct path riding on the same streams:
      // C = D (I - W_a H_ua W_u)^H Z W_a H_ra.
      const CMatrix k =
          CMatrix::Identity(ns, ns) - s.w_a * ch.h_ua_fl * s.w_u;
      const CMatrix c = d * k.adjoint() * z * a_ra;
      const CMatrix m = symmetrize(
          d * d.adjoint() +
          config.noise_relay_w * CMatrix::Identity(d.rows(), d.rows()));
      s.psi = minimize_relay_constrained(b, c, m, config.p_relay_w,
                                         settings.bisect_tol,
                                         settings.bisect_max_iter)
                  .psi;
    }

    const double prev = rate;
    rate = ws.rate(s);
    out.rate_history.push_back(rate);
    {
      const CMatrix h2 = ws.combined(s.psi) * s.w_u;
      const CMatrix d2 = s.w_a * h2 - CMatrix::Identity(ns, ns);
      const CMatrix e2 = symmetrize(d2 * d2.adjoint() +
                                    s.w_a * ws.noise_cov(s.psi) * s.w_a.adjoint());
      const double obj =
          (z * e2).trace().real() - logdet_hermitian(z, LogBase::natural);
      out.trace.records.push_back(record(t + 1, rate, obj));
    }
    if (rate < prev - 1e-9)
      throw NumericError("solve_ra: rate decreased at round " +
                         std::to_string(t + 1));
    if (rate - prev < settings.eps_min * std::max(rate, 1e-300)) {
      ++t;
      break;
    }
  }

  // Final receiver for the final precoders.
  const CMatrix h_eff = ws.combined(s.psi) * s.w_u;
  const CMatrix j = ws.noise_cov(s.psi);
  s.w_a =
      hermitian_solve(symmetrize(h_eff * h_eff.adjoint() + j), h_eff).adjoint();
  out.solution = s;
  out.rate_bits = rate;
  out.iterations = t;
  return out;
}

}  // namespace raca
