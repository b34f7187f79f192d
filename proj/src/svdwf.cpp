#include "raca/svdwf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace raca {

namespace {

double log2_1p(double x) { return std::log1p(x) / std::log(2.0); }

}  // namespace

WaterfillResult waterfill(const RVector& cnr, double budget, double tol) {
  const Eigen::Index n = cnr.size();
  if (n == 0) throw std::invalid_argument("waterfill: empty cnr");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(cnr(i) >= 0.0) || !std::isfinite(cnr(i)))
      throw std::invalid_argument("waterfill: cnr entries must be finite and >= 0");
  if (!(budget >= 0.0)) throw std::invalid_argument("waterfill: negative budget");

  WaterfillResult res;
  res.power = RVector::Zero(n);
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](Eigen::Index a, Eigen::Index b) { return cnr(a) > cnr(b); });
  if (cnr(idx[0]) <= 0.0 || budget <= 0.0) {
    res.all_zero = (cnr(idx[0]) <= 0.0);
    res.nu = 0.0;
    return res;
  }
  // Largest active set whose common water level clears its weakest mode.
  // The closed form is exact; tol is kept for interface compatibility.
  (void)tol;
  Eigen::Index active = 0;
  double level = 0.0;
  double inv_sum = 0.0;
  for (Eigen::Index k = 0; k < n && cnr(idx[k]) > 0.0; ++k) {
    inv_sum += 1.0 / cnr(idx[k]);
    const double cand = (budget + inv_sum) / static_cast<double>(k + 1);
    if (cand > 1.0 / cnr(idx[k])) {
      active = k + 1;
      level = cand;
    } else {
      break;
    }
  }
  for (Eigen::Index k = 0; k < active; ++k)
    res.power(idx[k]) = level - 1.0 / cnr(idx[k]);
  res.nu = 1.0 / level;
  return res;
}

SingleLinkSolution optimize_link(const CMatrix& h, double noise_w,
                                 double budget_w, int n_streams, double tol) {
  if (n_streams < 1 || n_streams > std::min(h.rows(), h.cols()))
    throw std::invalid_argument("optimize_link: bad stream count");
  if (!(noise_w > 0.0)) throw std::invalid_argument("optimize_link: noise must be positive");
  const SvdResult dec = svd(h);
  SingleLinkSolution out;
  out.cnr.resize(n_streams);
  for (int i = 0; i < n_streams; ++i) {
    const double s = dec.singular_values(i);
    out.cnr(i) = s * s / noise_w;
  }
  const WaterfillResult wf = waterfill(out.cnr, budget_w, tol);
  out.power = wf.power;
  out.w = dec.v.leftCols(n_streams) *
          out.power.cwiseSqrt().matrix().asDiagonal();
  out.rate_bits = 0.0;
  for (int i = 0; i < n_streams; ++i)
    out.rate_bits += log2_1p(out.cnr(i) * out.power(i));
  return out;
}

SingleLinkSolution optimize_direct(const ChannelSet& ch,
                                   const SystemConfig& config) {
  return optimize_link(ch.h_ua_fl, config.noise_ap_w, config.p_ua_fl_w,
                       config.n_streams);
}

AllocationResult allocate_subproblem(const RVector& a, const RVector& b,
                                     double budget, double tol) {
  const Eigen::Index n = a.size();
  if (b.size() != n) throw std::invalid_argument("allocate_subproblem: size mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(a(i) >= 0.0) || !(b(i) >= 0.0) || !std::isfinite(a(i)) || !std::isfinite(b(i)))
      throw std::invalid_argument("allocate_subproblem: coefficients must be finite and >= 0");
  if (!(budget >= 0.0)) throw std::invalid_argument("allocate_subproblem: negative budget");

  AllocationResult res;
  res.power = RVector::Zero(n);

  // Per-mode KKT point for multiplier nu. sqrt(1+u)-1 evaluated as
  // u/(sqrt(1+u)+1) to stay accurate for small u.
  auto power_at = [&](double nu, RVector* out) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double p = 0.0;
      if (a(i) > 0.0 && b(i) > 0.0) {
        const double u = 4.0 * b(i) / (a(i) * nu);
        const double root = u / (std::sqrt(1.0 + u) + 1.0);  // sqrt(1+u)-1
        p = std::max(0.0, (0.5 * a(i) * root - 1.0) / b(i));
      }
      if (out) (*out)(i) = p;
      total += p;
    }
    return total;
  };

  // The mode power vanishes once nu >= a_i b_i / (a_i + 1); above the max of
  // those thresholds the whole allocation is zero.
  double hi = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (a(i) > 0.0 && b(i) > 0.0)
      hi = std::max(hi, a(i) * b(i) / (a(i) + 1.0));
  if (hi == 0.0 || budget <= 0.0) {
    res.nu = 0.0;
    return res;
  }
  double lo = 0.0;
  double nu = hi;
  for (int it = 0; it < 200; ++it) {
    nu = 0.5 * (lo + hi);
    const double total = power_at(nu, nullptr);
    if (std::abs(total - budget) <= tol * budget) break;
    if (total > budget)
      lo = nu;
    else
      hi = nu;
  }
  res.nu = nu;
  power_at(nu, &res.power);
  return res;
}

namespace {

double relaylink_objective_bits(const RVector& g_ur, const RVector& g_ra,
                                const RVector& pu, const RVector& ppsi_t) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < pu.size(); ++i) {
    const double num = g_ra(i) * g_ur(i) * pu(i) * ppsi_t(i);
    const double den = 1.0 + g_ra(i) * ppsi_t(i) + g_ur(i) * pu(i);
    acc += log2_1p(num / den);
  }
  return acc;
}

}  // namespace

RelayLinkSolution optimize_relaylink(const ChannelSet& ch,
                                     const SystemConfig& config,
                                     const SvdwfSettings& settings) {
  const int ns = config.n_streams;
  const SvdResult dec_ur = svd(ch.h_ur_fh);
  const SvdResult dec_ra = svd(ch.h_ra_fl);

  RVector lam2_ur(ns), g_ur(ns), g_ra(ns);
  for (int i = 0; i < ns; ++i) {
    const double su = dec_ur.singular_values(i);
    const double sr = dec_ra.singular_values(i);
    lam2_ur(i) = su * su;
    g_ur(i) = su * su / config.noise_relay_w;
    g_ra(i) = sr * sr / config.noise_ap_w;
  }

  // Substituted relay powers: ppsi_t_i = p_psi_i * (lam_ur_i^2 p_u_i +
  // sigma_r^2) turns the coupled budget into a plain sum constraint.
  RVector pu = RVector::Zero(ns);
  RVector ppsi_t = RVector::Constant(ns, config.p_relay_w / ns);

  RelayLinkSolution out;
  int t = 0;
  for (; t < settings.t_max; ++t) {
    const RVector pu_prev = pu;
    pu = allocate_subproblem(g_ra.cwiseProduct(ppsi_t), g_ur,
                             config.p_ur_fh_w, settings.wf_tol)
             .power;
    const RVector ppsi_prev = ppsi_t;
    ppsi_t = allocate_subproblem(g_ur.cwiseProduct(pu), g_ra, config.p_relay_w,
                                 settings.wf_tol)
                 .power;
    const double obj = relaylink_objective_bits(g_ur, g_ra, pu, ppsi_t);
    IterationRecord rec;
    rec.iteration = t + 1;
    rec.rate_bits = obj;
    rec.objective = obj;
    rec.slack_ur = config.p_ur_fh_w - pu.sum();
    rec.slack_r = config.p_relay_w - ppsi_t.sum();
    out.trace.records.push_back(rec);
    const double eps1 = (pu - pu_prev).lpNorm<1>();
    const double eps2 = (ppsi_t - ppsi_prev).lpNorm<1>();
    if (eps1 < settings.eps_min && eps2 < settings.eps_min) {
      ++t;
      break;
    }
  }
  out.iterations = t;

  RVector p_psi(ns);
  for (int i = 0; i < ns; ++i)
    p_psi(i) = ppsi_t(i) / (lam2_ur(i) * pu(i) + config.noise_relay_w);

  out.p_ue = pu;
  out.p_relay = p_psi;
  out.w_ur = dec_ur.v.leftCols(ns) * pu.cwiseSqrt().matrix().asDiagonal();
  out.psi = dec_ra.v.leftCols(ns) * p_psi.cwiseSqrt().matrix().asDiagonal() *
            dec_ur.u.leftCols(ns).adjoint();
  out.rate_bits = relaylink_objective_bits(g_ur, g_ra, pu, ppsi_t);
  return out;
}

SvdwfResult solve_svdwf(const ChannelSet& ch, const SystemConfig& config,
                        const SvdwfSettings& settings) {
  config.validate();
  SvdwfResult out;
  const SingleLinkSolution direct = optimize_direct(ch, config);
  RelayLinkSolution relay = optimize_relaylink(ch, config, settings);
  out.solution.w_ua = direct.w;
  out.solution.w_ur = relay.w_ur;
  out.solution.psi = relay.psi;
  out.direct_rate_bits = direct.rate_bits;
  out.relay_rate_bits = relay.rate_bits;
  out.trace = std::move(relay.trace);
  out.combined_rate_bits = achievable_rate(ch, out.solution, config, false);
  return out;
}

BeamformerSolution svd_equal_power(const ChannelSet& ch,
                                   const SystemConfig& config) {
  const int ns = config.n_streams;
  const SvdResult dec_ua = svd(ch.h_ua_fl);
  const SvdResult dec_ur = svd(ch.h_ur_fh);
  const SvdResult dec_ra = svd(ch.h_ra_fl);
  BeamformerSolution sol;
  sol.w_ua = dec_ua.v.leftCols(ns) * std::sqrt(config.p_ua_fl_w / ns);
  sol.w_ur = dec_ur.v.leftCols(ns) * std::sqrt(config.p_ur_fh_w / ns);
  RVector p_psi(ns);
  for (int i = 0; i < ns; ++i) {
    const double su = dec_ur.singular_values(i);
    p_psi(i) = (config.p_relay_w / ns) /
               (su * su * (config.p_ur_fh_w / ns) + config.noise_relay_w);
  }
  sol.psi = dec_ra.v.leftCols(ns) * p_psi.cwiseSqrt().matrix().asDiagonal() *
            dec_ur.u.leftCols(ns).adjoint();
  return sol;
}

}  // namespace raca
