#include "raca/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace raca {

namespace {

constexpr double kHermTol = 1e-12;
constexpr double kEigClamp = 1e-12;

// Unblocked Cholesky used only to locate the failing pivot for diagnostics.
int first_bad_pivot(CMatrix a) {
  const int n = static_cast<int>(a.rows());
  for (int k = 0; k < n; ++k) {
    double d = a(k, k).real();
    if (!(d > 0.0) || !std::isfinite(d)) return k;
    d = std::sqrt(d);
    a(k, k) = d;
    for (int i = k + 1; i < n; ++i) a(i, k) /= d;
    for (int j = k + 1; j < n; ++j)
      for (int i = j; i < n; ++i) a(i, j) -= a(i, k) * std::conj(a(j, k));
  }
  return -1;
}

}  // namespace

bool is_finite(const CMatrix& a) {
  return a.array().isFinite().all();
}

void require_finite(const CMatrix& a, const char* name) {
  if (!is_finite(a))
    throw std::invalid_argument(std::string(name) + ": non-finite entries");
}

void require_hermitian(const CMatrix& a, const char* name) {
  if (a.rows() != a.cols())
    throw std::invalid_argument(std::string(name) + ": not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (dev > kHermTol * scale)
    throw std::invalid_argument(std::string(name) + ": not Hermitian (max deviation " +
                                std::to_string(dev) + ")");
}

SvdResult svd(const CMatrix& a) {
  require_finite(a, "svd input");
  Eigen::JacobiSVD<CMatrix> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (dec.info() != Eigen::Success)
    throw NumericError("svd failed to converge");
  return SvdResult{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

CMatrix hermitian_solve(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("hermitian_solve: A rows != B rows");
  require_finite(a, "hermitian_solve A");
  require_finite(b, "hermitian_solve B");
  require_hermitian(a, "hermitian_solve A");
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericError("hermitian_solve: matrix not positive definite",
                       first_bad_pivot(a));
  }
  return llt.solve(b);
}

double logdet_hermitian(const CMatrix& a, LogBase base) {
  require_finite(a, "logdet input");
  require_hermitian(a, "logdet input");
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw NumericError("logdet_hermitian: matrix not positive definite",
                       first_bad_pivot(a));
  const auto& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) acc += std::log(l(i, i).real());
  acc *= 2.0;
  return base == LogBase::natural ? acc : acc / std::log(2.0);
}

EigResult hermitian_eig(const CMatrix& a) {
  require_finite(a, "hermitian_eig input");
  require_hermitian(a, "hermitian_eig input");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  if (es.info() != Eigen::Success)
    throw NumericError("hermitian_eig failed to converge");
  const Eigen::Index n = a.rows();
  EigResult r;
  r.u.resize(n, n);
  r.eigenvalues.resize(n);
  // Eigen returns ascending order; flip to nonincreasing.
  for (Eigen::Index i = 0; i < n; ++i) {
    double lam = es.eigenvalues()(n - 1 - i);
    if (lam < 0.0 && lam >= -kEigClamp) lam = 0.0;
    r.eigenvalues(i) = lam;
    r.u.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return r;
}

}  // namespace raca
