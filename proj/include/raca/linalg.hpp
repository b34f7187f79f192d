#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace raca {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Thrown when a decomposition or solve fails numerically.
/// For Cholesky-based solves, pivot() reports the first non-positive pivot
/// (0-based), or -1 when not applicable.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, int pivot = -1)
      : std::runtime_error(what), pivot_(pivot) {}
  int pivot() const noexcept { return pivot_; }

 private:
  int pivot_;
};

enum class LogBase { natural, two };

struct SvdResult {
  CMatrix u;               // m x m unitary
  RVector singular_values; // length min(m, n), nonincreasing
  CMatrix v;               // n x n unitary; input == u * diag(s) * v^H
};

struct EigResult {
  CMatrix u;           // unitary, columns are eigenvectors
  RVector eigenvalues; // nonincreasing; values in [-1e-12, 0) snapped to 0
};

/// Full SVD. Throws NumericError if the decomposition fails to converge.
SvdResult svd(const CMatrix& a);

/// Solves A X = B for Hermitian positive definite A via Cholesky.
/// Never forms A^-1. Throws NumericError (with pivot index) if A is not
/// positive definite, std::invalid_argument on shape mismatch or if A is
/// not Hermitian within tolerance.
CMatrix hermitian_solve(const CMatrix& a, const CMatrix& b);

/// log(det(A)) for Hermitian positive definite A, in the requested base.
double logdet_hermitian(const CMatrix& a, LogBase base);

/// Eigendecomposition of a Hermitian PSD matrix, eigenvalues nonincreasing.
EigResult hermitian_eig(const CMatrix& a);

inline double frob2(const CMatrix& a) { return a.squaredNorm(); }

bool is_finite(const CMatrix& a);

/// Throws std::invalid_argument naming `name` if any entry is NaN/Inf.
void require_finite(const CMatrix& a, const char* name);

/// Enforces max|A - A^H| <= 1e-12 * max(1, max|A|).
void require_hermitian(const CMatrix& a, const char* name);

}  // namespace raca
