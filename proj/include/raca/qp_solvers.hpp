#pragma once

#include "raca/linalg.hpp"

namespace raca {

/// Exact minimizers for the trace-constrained quadratic programs that every
/// alternating-optimization block update reduces to. All solvers work in the
/// eigenbasis of the quadratic-form matrix and bisect on the dual variable,
/// so no explicit matrix inverse is ever formed.

struct QpStepResult {
  CMatrix w;
  double nu = 0.0;        // multiplier of the power constraint
  double power = 0.0;     // tr(W^H W) at the solution
};

/// min tr(W^H B W) - 2 Re tr(W^H C^H)  s.t.  tr(W^H W) <= budget.
/// B: n x n Hermitian PSD. C: k x n. Returns W (n x k) and the multiplier.
/// The dual root is bracketed by 0 and sqrt(tr(C U U^H C^H)/budget).
QpStepResult minimize_power_constrained(const CMatrix& b, const CMatrix& c,
                                        double budget, double tol,
                                        int max_iter);

struct QpStep2Result {
  CMatrix w;
  double nu1 = 0.0;       // multiplier of tr(W^H W) <= budget1
  double nu2 = 0.0;       // multiplier of tr(W^H B2 W) <= budget2
  double power1 = 0.0;
  double power2 = 0.0;
};

/// Same objective with a second weighted power constraint
/// tr(W^H B2 W) <= budget2 (B2 Hermitian PSD). The outer multiplier is
/// bracketed by geometric doubling from 1e-12, then bisected; each outer
/// evaluation folds nu2*B2 into B and reuses the single-constraint solver.
/// budget2 <= 0 restricts the problem to the null space of B2.
QpStep2Result minimize_two_power_constrained(const CMatrix& b,
                                             const CMatrix& b2,
                                             const CMatrix& c, double budget1,
                                             double budget2, double tol,
                                             int max_iter);

struct RelayQpResult {
  CMatrix psi;
  double nu = 0.0;
  double power = 0.0;     // tr(Psi M Psi^H) at the solution
};

/// min tr(Psi^H B Psi M) - 2 Re tr(Psi^H C^H)  s.t.  tr(Psi M Psi^H) <= budget.
/// B Hermitian PSD, M Hermitian PD (both n x n), C n x n. The stationary
/// point is (B + nu I)^-1 C^H M^-1 with nu from the same scalar bisection.
RelayQpResult minimize_relay_constrained(const CMatrix& b, const CMatrix& c,
                                         const CMatrix& m, double budget,
                                         double tol, int max_iter);

}  // namespace raca
