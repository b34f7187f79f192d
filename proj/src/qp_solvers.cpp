#include "raca/qp_solvers.hpp"

#include <cmath>
#include <limits>

namespace raca {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SpectralProblem {
  CMatrix u;    // eigenbasis of the quadratic form
  RVector lam;  // eigenvalues, clamped to >= 0
  CMatrix rhs;  // U^H * (right-hand side); solution = U diag(1/(lam+nu)) rhs
  RVector x;    // per-mode weights: power(nu) = sum x_i / (lam_i + nu)^2
};

// Gram-structured quadratic forms are PSD in exact arithmetic; rounding can
// leave eigenvalues near -eps*||B||, so clamp at zero before bisecting.
SpectralProblem decompose(const CMatrix& b, const CMatrix& rhs_full) {
  SpectralProblem sp;
  EigResult eig = hermitian_eig((b + b.adjoint()) / 2.0);
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues(i) < 0.0) eig.eigenvalues(i) = 0.0;
  sp.u = std::move(eig.u);
  sp.lam = std::move(eig.eigenvalues);
  sp.rhs = sp.u.adjoint() * rhs_full;
  sp.x = sp.rhs.rowwise().squaredNorm();
  return sp;
}

// Modes with lam + nu == 0 carry pseudo-inverse semantics: they contribute
// nothing when their weight is zero and make the power infinite otherwise
// (which simply forces the bisection branch).
double power_at(const SpectralProblem& sp, double nu) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sp.lam.size(); ++i) {
    const double d = sp.lam(i) + nu;
    if (d <= 0.0) {
      if (sp.x(i) != 0.0) return kInf;
      continue;
    }
    acc += sp.x(i) / (d * d);
  }
  return acc;
}

CMatrix solution_at(const SpectralProblem& sp, double nu) {
  CMatrix scaled = sp.rhs;
  for (Eigen::Index i = 0; i < sp.lam.size(); ++i) {
    const double d = sp.lam(i) + nu;
    if (d <= 0.0)
      scaled.row(i).setZero();
    else
      scaled.row(i) /= d;
  }
  return sp.u * scaled;
}

// Bisects the monotone map nu -> power_at(nu) down to the target budget.
// power_at(0) must exceed the budget on entry; power_at(sqrt(sum x / budget))
// is at most the budget since every eigenvalue is nonnegative.
double bisect_multiplier(const SpectralProblem& sp, double budget, double tol,
                         int max_iter) {
  double hi = std::sqrt(sp.x.sum() / budget);
  double lo = 0.0;
  double nu = hi;
  for (int it = 0; it < max_iter; ++it) {
    nu = 0.5 * (lo + hi);
    const double p = power_at(sp, nu);
    if (std::abs(p - budget) <= tol * budget) break;
    if (p > budget)
      lo = nu;
    else
      hi = nu;
  }
  return nu;
}

double weighted_power(const CMatrix& w, const CMatrix& b2) {
  return (w.adjoint() * b2 * w).trace().real();
}

// Restricts the single-constraint problem to the null space of b2: the exact
// feasible set when the weighted budget is zero.
QpStepResult solve_in_nullspace(const CMatrix& b, const CMatrix& b2,
                                const CMatrix& c, double budget1, double tol,
                                int max_iter) {
  const Eigen::Index n = b.rows();
  const Eigen::Index k = c.rows();
  EigResult eig = hermitian_eig((b2 + b2.adjoint()) / 2.0);
  const double cut = 1e-12 * std::max(1e-300, eig.eigenvalues(0));
  Eigen::Index null_dim = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (eig.eigenvalues(i) <= cut) ++null_dim;
  QpStepResult res;
  if (null_dim == 0) {
    res.w = CMatrix::Zero(n, k);
    return res;
  }
  const CMatrix basis = eig.u.rightCols(null_dim);
  QpStepResult inner = minimize_power_constrained(
      basis.adjoint() * b * basis, c * basis, budget1, tol, max_iter);
  res.w = basis * inner.w;
  res.nu = inner.nu;
  res.power = res.w.squaredNorm();
  return res;
}

}  // namespace

QpStepResult minimize_power_constrained(const CMatrix& b, const CMatrix& c,
                                        double budget, double tol,
                                        int max_iter) {
  const Eigen::Index n = b.rows();
  const Eigen::Index k = c.rows();
  if (c.cols() != n) throw std::invalid_argument("qp step: C cols must match B");
  QpStepResult res;
  if (budget <= 0.0 || c.squaredNorm() == 0.0) {
    res.w = CMatrix::Zero(n, k);
    return res;
  }
  SpectralProblem sp = decompose(b, c.adjoint());
  if (power_at(sp, 0.0) <= budget * (1.0 + tol))
    res.nu = 0.0;
  else
    res.nu = bisect_multiplier(sp, budget, tol, max_iter);
  res.w = solution_at(sp, res.nu);
  res.power = res.w.squaredNorm();
  return res;
}

QpStep2Result minimize_two_power_constrained(const CMatrix& b,
                                             const CMatrix& b2,
                                             const CMatrix& c, double budget1,
                                             double budget2, double tol,
                                             int max_iter) {
  QpStep2Result res;
  const Eigen::Index n = b.rows();
  const Eigen::Index k = c.rows();
  if (budget1 <= 0.0 || c.squaredNorm() == 0.0) {
    res.w = CMatrix::Zero(n, k);
    return res;
  }
  if (budget2 <= 0.0) {
    QpStepResult ns = solve_in_nullspace(b, b2, c, budget1, tol, max_iter);
    res.w = std::move(ns.w);
    res.nu1 = ns.nu;
    res.power1 = ns.power;
    res.power2 = weighted_power(res.w, b2);
    return res;
  }
  auto inner = [&](double nu2) {
    return minimize_power_constrained(b + nu2 * b2, c, budget1, tol, max_iter);
  };
  QpStepResult at_zero = inner(0.0);
  if (weighted_power(at_zero.w, b2) <= budget2 * (1.0 + tol)) {
    res.w = std::move(at_zero.w);
    res.nu1 = at_zero.nu;
    res.nu2 = 0.0;
  } else {
    // Bracket the outer multiplier by geometric doubling, then bisect.
    double lo = 0.0;
    double hi = 1e-12;
    int doublings = 0;
    while (doublings < max_iter && weighted_power(inner(hi).w, b2) > budget2) {
      lo = hi;
      hi *= 2.0;
      ++doublings;
    }
    if (doublings >= max_iter)
      throw NumericError("qp step: failed to bracket the outer multiplier");
    double nu2 = hi;
    for (int it = 0; it < max_iter; ++it) {
      nu2 = 0.5 * (lo + hi);
      const double g = weighted_power(inner(nu2).w, b2);
      if (std::abs(g - budget2) <= tol * budget2) break;
      if (g > budget2)
        lo = nu2;
      else
        hi = nu2;
    }
    QpStepResult fin = inner(nu2);
    res.w = std::move(fin.w);
    res.nu1 = fin.nu;
    res.nu2 = nu2;
  }
  res.power1 = res.w.squaredNorm();
  res.power2 = weighted_power(res.w, b2);
  return res;
}

RelayQpResult minimize_relay_constrained(const CMatrix& b, const CMatrix& c,
                                         const CMatrix& m, double budget,
                                         double tol, int max_iter) {
  RelayQpResult res;
  const Eigen::Index n = b.rows();
  if (budget <= 0.0 || c.squaredNorm() == 0.0) {
    res.psi = CMatrix::Zero(n, n);
    return res;
  }
  const CMatrix m_sym = (m + m.adjoint()) / 2.0;
  Eigen::LLT<CMatrix> llt(m_sym);
  if (llt.info() != Eigen::Success)
    throw NumericError("relay qp: weighting matrix is not positive definite");
  SpectralProblem sp = decompose(b, llt.solve(c).adjoint());  // U^H C^H M^-1
  // The linear term lives in the range of the quadratic form, so modes whose
  // eigenvalue sits at rounding level relative to the largest are pure noise.
  // Dividing their rhs rows (amplified through M^-1) by the junk eigenvalue
  // would radiate garbage, so cut them outright.
  if (sp.lam(0) > 0.0) {
    const double cut =
        256.0 * std::numeric_limits<double>::epsilon() * sp.lam(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (sp.lam(i) <= cut) {
        sp.lam(i) = 0.0;
        sp.rhs.row(i).setZero();
      }
    }
  }
  // The constrained power is tr(Psi M Psi^H) = sum_i x_i/(lam_i+nu)^2 with
  // x_i the M^-1-metric energy of C on mode i, computed as a norm through
  // the Cholesky factor so it can never go negative.
  const CMatrix proj = llt.matrixL().solve(c * sp.u);  // L^-1 C U
  sp.x = proj.colwise().squaredNorm().transpose();
  for (Eigen::Index i = 0; i < n; ++i)
    if (sp.rhs.row(i).squaredNorm() == 0.0) sp.x(i) = 0.0;
  if (power_at(sp, 0.0) <= budget * (1.0 + tol))
    res.nu = 0.0;
  else
    res.nu = bisect_multiplier(sp, budget, tol, max_iter);
  res.psi = solution_at(sp, res.nu);
  res.power = (res.psi * m * res.psi.adjoint()).trace().real();
  return res;
}

}  // namespace raca
