#pragma once

#include "robloc/errors.hpp"
#include "robloc/types.hpp"

namespace robloc {

// Singular values below kRankTolerance * sigma_max are treated as zero when
// deciding ranks and null spaces.
inline constexpr double kRankTolerance = 1e-10;

struct Svd {
  Matrix u;                // p x p
  Vector singular_values;  // min(p, d), descending
  Matrix v;                // d x d
};

// Full SVD with a fixed sign convention (largest-magnitude entry of each
// singular vector is positive), so repeated calls are identical bit for bit.
Svd svd(const Matrix& a);

// Orthonormal rows spanning the left null space of a: result * a = 0 and
// result * result^T = I. Throws EmptyNullspaceError when a has full row rank.
Matrix nullspace_rows(const Matrix& a);

// Minimum-residual solution of a * x = b for a full-column-rank a (p >= d),
// solved by Householder QR.
Vector least_squares(const Matrix& a, const Vector& b);

// Largest absolute inner product between distinct columns after normalizing
// each column to unit norm. Result lies in [0, 1].
double coherence(const Matrix& b);

// Lower bound on the coherence attainable by a full-row-rank s x t frame
// with unit-norm columns.
double welch_bound(int s, int t);

}  // namespace robloc
