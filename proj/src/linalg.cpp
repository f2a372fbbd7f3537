#include "robloc/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

namespace robloc {

namespace {

void require_nonempty_finite(const Matrix& a, const char* who) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw ShapeError(std::string(who) + ": matrix must be non-empty");
  }
  if (!a.allFinite()) {
    throw DomainError(std::string(who) + ": entries must be finite");
  }
}

std::string dims(const Matrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

// Index of the largest-magnitude entry; first occurrence wins.
Index abs_argmax(const Vector& v) {
  Index i = 0;
  v.cwiseAbs().maxCoeff(&i);
  return i;
}

Index numeric_rank(const Vector& singular_values) {
  if (singular_values.size() == 0) return 0;
  const double cutoff = kRankTolerance * singular_values(0);
  Index rank = 0;
  for (Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > cutoff) ++rank;
  }
  return rank;
}

}  // namespace

Svd svd(const Matrix& a) {
  require_nonempty_finite(a, "svd");
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (dec.info() != Eigen::Success) {
    throw SolverFailure("svd: decomposition failed for " + dims(a) + " matrix");
  }
  Matrix u = dec.matrixU();
  Matrix v = dec.matrixV();
  Vector sigma = dec.singularValues();
  const Index k = sigma.size();
  for (Index j = 0; j < v.cols(); ++j) {
    if (v(abs_argmax(v.col(j)), j) < 0) {
      v.col(j) = -v.col(j);
      if (j < k) u.col(j) = -u.col(j);  // keep u * diag * v^T unchanged
    }
  }
  for (Index j = k; j < u.cols(); ++j) {
    if (u(abs_argmax(u.col(j)), j) < 0) u.col(j) = -u.col(j);
  }
  return {std::move(u), std::move(sigma), std::move(v)};
}

Matrix nullspace_rows(const Matrix& a) {
  require_nonempty_finite(a, "nullspace_rows");
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeFullU);
  if (dec.info() != Eigen::Success) {
    throw SolverFailure("nullspace_rows: decomposition failed for " + dims(a) +
                        " matrix");
  }
  const Index rank = numeric_rank(dec.singularValues());
  const Index nullity = a.rows() - rank;
  if (nullity == 0) {
    throw EmptyNullspaceError("nullspace_rows: " + dims(a) +
                              " matrix has full row rank");
  }
  Matrix r = dec.matrixU().rightCols(nullity).transpose();
  for (Index i = 0; i < r.rows(); ++i) {
    Index j = 0;
    r.row(i).cwiseAbs().maxCoeff(&j);
    if (r(i, j) < 0) r.row(i) = -r.row(i);
  }
  return r;
}

Vector least_squares(const Matrix& a, const Vector& b) {
  require_nonempty_finite(a, "least_squares");
  if (!b.allFinite()) throw DomainError("least_squares: rhs must be finite");
  if (a.rows() != b.size()) {
    throw ShapeError("least_squares: rhs length " + std::to_string(b.size()) +
                     " does not match " + dims(a) + " matrix");
  }
  if (a.rows() < a.cols()) {
    throw ShapeError("least_squares: matrix " + dims(a) +
                     " is underdetermined");
  }
  Eigen::JacobiSVD<Matrix> values(a);
  const Vector& sigma = values.singularValues();
  if (sigma(sigma.size() - 1) < 1e-12 * sigma(0)) {
    throw RankDeficiencyError("least_squares: " + dims(a) +
                              " matrix is rank deficient");
  }
  return a.householderQr().solve(b);
}

double coherence(const Matrix& b) {
  require_nonempty_finite(b, "coherence");
  if (b.cols() < 2) {
    throw ShapeError("coherence: need at least 2 columns");
  }
  const Vector norms = b.colwise().norm();
  if ((norms.array() == 0.0).any()) {
    throw DegenerateColumnError("coherence: zero column");
  }
  const Matrix unit = b.array().rowwise() / norms.transpose().array();
  Matrix gram = unit.transpose() * unit;
  gram.diagonal().setZero();
  return std::min(gram.cwiseAbs().maxCoeff(), 1.0);
}

double welch_bound(int s, int t) {
  if (s < 1 || t <= s) {
    throw DomainError("welch_bound: need t > s >= 1");
  }
  return std::sqrt(static_cast<double>(t - s) /
                   (static_cast<double>(s) * static_cast<double>(t - 1)));
}

}  // namespace robloc
