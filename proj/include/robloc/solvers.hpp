#pragma once

#include "robloc/errors.hpp"
#include "robloc/types.hpp"

namespace robloc {

struct SolverOptions {
  double tol = 1e-8;   // relative primal/dual residual threshold
  int max_iter = 5000;
  double rho = 1.0;    // augmented-Lagrangian penalty
};

struct SolveReport {
  int iterations = 0;
  double primal_residual = 0.0;  // relative, at exit
  double dual_residual = 0.0;    // relative, at exit
  bool converged = false;
};

SolverOptions default_basis_pursuit_options();

// tol 1e-6, max_iter 1000, and a penalty scaled to the data magnitude
// (rho = m * n / (4 |f_tilde|_1)); with a fixed rho the singular-value
// threshold is fixed in absolute terms and the iteration stalls on inputs
// whose entries are many orders of magnitude above 1.
SolverOptions default_srpca_options(const Matrix& f_tilde);

struct BasisPursuitResult {
  Vector s;
  SolveReport report;
};

// min |s|_1 subject to r * s = y, for r with orthonormal rows. ADMM with a
// closed-form projection step; after the iteration a support-restricted
// refit is attempted and kept when it is feasible and no worse in objective,
// which pins exactly sparse solutions down to machine precision.
BasisPursuitResult basis_pursuit(const Matrix& r, const Vector& y,
                                 const SolverOptions& opts = {});

// Column-wise minimum-norm solutions of r * s_i = r * m_i for r with
// orthonormal rows: s_i = r^T (r m_i).
Matrix group_min_norm(const Matrix& r, const Matrix& m_tilde);

struct SrpcaResult {
  Matrix f;
  Matrix s;
  SolveReport report;
};

// min |f|_* + lambda * |s|_{1,2} subject to f + s = f_tilde. ADMM with
// singular-value soft-thresholding for f and column-wise group shrinkage
// for s.
SrpcaResult srpca(const Matrix& f_tilde, double lambda,
                  const SolverOptions& opts);

}  // namespace robloc
