#pragma once

#include "robloc/errors.hpp"
#include "robloc/types.hpp"

namespace robloc {

// Known anchor positions (one per column) with a designated central anchor.
struct AnchorSet {
  Matrix positions;  // r x m
  Index central_index;

  AnchorSet(Matrix positions_in, Index central_index_in);
  explicit AnchorSet(Matrix positions_in);  // central anchor = last column

  Index dim() const { return positions.rows(); }
  Index count() const { return positions.cols(); }
  Vector central() const { return positions.col(central_index); }

 private:
  void validate() const;
};

// Linear trilateration system with the central anchor translated to the
// origin: row i of x is (anchor_i - central)^T for every non-central anchor,
// in anchor order.
struct TrilaterationSystem {
  Matrix x;            // (m-1) x r
  Vector rhs_offsets;  // |anchor_i - central|^2, aligned with rows of x
  Index central_index;
  Vector central;      // original central anchor position

  Index anchor_count() const { return x.rows() + 1; }
  Index dim() const { return x.cols(); }

  // [x 1], the full-column-rank matrix of the augmented system.
  Matrix augmented() const;
};

TrilaterationSystem build_system(const AnchorSet& anchors);

// Right-hand side m with m_i = (d_c^2 - d_i^2 + |anchor_i - central|^2) / 2.
// squared_dists has one entry per anchor, in anchor order, central included.
Vector assemble_rhs(const TrilaterationSystem& system,
                    const Vector& squared_dists);

// Solves the trilateration system for exact distances and returns the target
// position in the original (untranslated) coordinates.
Vector exact_trilateration(const TrilaterationSystem& system,
                           const Vector& squared_dists);

// F(j, i) = squared distance from target column i to anchor j (m x n).
Matrix squared_distance_matrix(const AnchorSet& anchors, const Matrix& targets);

// AnchorSet whose non-central anchors are the rows of x_star, with a central
// anchor appended at the origin as the last column.
AnchorSet anchor_set_from_offsets(const Matrix& x_star);

}  // namespace robloc
