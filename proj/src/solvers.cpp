#include "robloc/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace robloc {

namespace {

void soft_threshold(Vector& v, double tau) {
  v = v.array().sign() * (v.array().abs() - tau).max(0.0);
}

// Singular-value soft-thresholding via the Gram matrix of the short side:
// for a with rows <= cols, a = u diag(sigma) v^T with u, sigma from the
// eigendecomposition of a a^T, and the shrunk reconstruction reduces to
// u diag((sigma - tau)+ / sigma) u^T a. Avoids a full SVD per iteration.
Matrix shrink_singular_values(const Matrix& a, double tau) {
  const bool wide = a.rows() <= a.cols();
  const Matrix& b = a;  // work on the short side
  Matrix gram = wide ? Matrix(b * b.transpose()) : Matrix(b.transpose() * b);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Index k = gram.rows();
  Vector ratio = Vector::Zero(k);
  for (Index i = 0; i < k; ++i) {
    const double sigma = std::sqrt(std::max(eig.eigenvalues()(i), 0.0));
    if (sigma > tau) ratio(i) = (sigma - tau) / sigma;
  }
  const Matrix& q = eig.eigenvectors();
  const Matrix core = q * ratio.asDiagonal() * q.transpose();
  return wide ? Matrix(core * a) : Matrix(a * core);
}

void shrink_columns(Matrix& s, double tau) {
  for (Index i = 0; i < s.cols(); ++i) {
    const double norm = s.col(i).norm();
    s.col(i) *= norm > tau ? (norm - tau) / norm : 0.0;
  }
}

// Exact refit on a candidate support: smallest supports first, ordered by
// the magnitude of the ADMM iterate. Accepted only when the refit is
// feasible to near machine precision and its objective does not exceed the
// iterate's, so an inexact iterate is never replaced by something worse.
bool try_support_polish(const Matrix& r, const Vector& y, const Vector& sparse,
                        double y_scale, Vector* out) {
  const Index w = r.rows();
  const Index n = r.cols();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double da = std::abs(sparse(a));
    const double db = std::abs(sparse(b));
    return da != db ? da > db : a < b;
  });
  const double feas_tol = 1e-10 * y_scale;
  const double objective_cap = sparse.lpNorm<1>() * (1.0 + 1e-6) + 1e-9 * y_scale;

  const Index max_support = std::min<Index>(w - 1, n);
  Matrix rt(w, max_support);
  for (Index size = 1; size <= max_support; ++size) {
    const Index idx = order[static_cast<std::size_t>(size - 1)];
    if (sparse(idx) == 0.0) break;
    rt.col(size - 1) = r.col(idx);
    const auto block = rt.leftCols(size);
    Eigen::ColPivHouseholderQR<Matrix> qr(block);
    if (qr.rank() < size) continue;
    const Vector coeffs = qr.solve(y);
    if ((block * coeffs - y).norm() > feas_tol) continue;
    if (coeffs.lpNorm<1>() > objective_cap) continue;
    Vector polished = Vector::Zero(n);
    for (Index j = 0; j < size; ++j) {
      polished(order[static_cast<std::size_t>(j)]) = coeffs(j);
    }
    *out = std::move(polished);
    return true;
  }
  return false;
}

}  // namespace

SolverOptions default_basis_pursuit_options() { return {1e-8, 5000, 1.0}; }

SolverOptions default_srpca_options(const Matrix& f_tilde) {
  const double l1 = f_tilde.cwiseAbs().sum();
  const double rho =
      l1 > 0 ? static_cast<double>(f_tilde.size()) / (4.0 * l1) : 1.0;
  return {1e-6, 1000, rho};
}

BasisPursuitResult basis_pursuit(const Matrix& r, const Vector& y,
                                 const SolverOptions& opts) {
  if (r.cols() < 1 || r.rows() < 1) {
    throw ShapeError("basis_pursuit: empty matrix");
  }
  if (y.size() != r.rows()) {
    throw ShapeError("basis_pursuit: rhs length " + std::to_string(y.size()) +
                     " does not match " + std::to_string(r.rows()) + " rows");
  }
  if (!r.allFinite() || !y.allFinite()) {
    throw DomainError("basis_pursuit: inputs must be finite");
  }
  if (opts.tol <= 0 || opts.max_iter < 1 || opts.rho <= 0) {
    throw DomainError("basis_pursuit: invalid solver options");
  }

  const Index n = r.cols();
  const double y_scale = 1.0 + y.norm();
  if (y.norm() == 0.0) {
    return {Vector::Zero(n), {0, 0.0, 0.0, true}};
  }

  // ADMM on min |z|_1 s.t. x in {r x = y}, x = z. With orthonormal rows the
  // projection is x = v - r^T r v + r^T y.
  const Vector min_norm = r.transpose() * y;
  Vector x = min_norm;
  Vector z = x;
  Vector u = Vector::Zero(n);
  SolveReport report;
  const double shrink = 1.0 / opts.rho;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Vector v = z - u;
    x = v - r.transpose() * (r * v) + min_norm;
    const Vector z_prev = z;
    z = x + u;
    soft_threshold(z, shrink);
    u += x - z;

    const double primal = (x - z).norm() / (1.0 + std::max(x.norm(), z.norm()));
    const double dual = opts.rho * (z - z_prev).norm() / (1.0 + opts.rho * u.norm());
    report.iterations = it;
    report.primal_residual = primal;
    report.dual_residual = dual;
    if (primal <= opts.tol && dual <= opts.tol) {
      report.converged = true;
      break;
    }
  }

  Vector polished;
  if (try_support_polish(r, y, z, y_scale, &polished)) {
    report.converged = true;
    return {std::move(polished), report};
  }
  return {std::move(x), report};  // x is feasible by construction
}

Matrix group_min_norm(const Matrix& r, const Matrix& m_tilde) {
  if (m_tilde.rows() != r.cols()) {
    throw ShapeError("group_min_norm: measurement rows " +
                     std::to_string(m_tilde.rows()) + " do not match " +
                     std::to_string(r.cols()) + " columns of r");
  }
  return r.transpose() * (r * m_tilde);
}

SrpcaResult srpca(const Matrix& f_tilde, double lambda,
                  const SolverOptions& opts) {
  if (f_tilde.rows() < 1 || f_tilde.cols() < 1) {
    throw ShapeError("srpca: empty matrix");
  }
  if (!f_tilde.allFinite()) throw DomainError("srpca: input must be finite");
  if (lambda <= 0) throw DomainError("srpca: lambda must be positive");
  if (opts.tol <= 0 || opts.max_iter < 1 || opts.rho <= 0) {
    throw DomainError("srpca: invalid solver options");
  }

  const double scale = 1.0 + f_tilde.norm();
  Matrix f = Matrix::Zero(f_tilde.rows(), f_tilde.cols());
  Matrix s = f;
  Matrix dual = f;
  SolveReport report;
  for (int it = 1; it <= opts.max_iter; ++it) {
    f = shrink_singular_values(f_tilde - s - dual / opts.rho, 1.0 / opts.rho);
    const Matrix s_prev = s;
    s = f_tilde - f - dual / opts.rho;
    shrink_columns(s, lambda / opts.rho);
    const Matrix gap = f + s - f_tilde;
    dual += opts.rho * gap;

    report.iterations = it;
    report.primal_residual = gap.norm() / scale;
    report.dual_residual = opts.rho * (s - s_prev).norm() / scale;
    if (report.primal_residual <= opts.tol &&
        report.dual_residual <= opts.tol) {
      report.converged = true;
      break;
    }
  }
  return {std::move(f), std::move(s), report};
}

}  // namespace robloc
