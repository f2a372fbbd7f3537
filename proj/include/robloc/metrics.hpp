#pragma once

#include <vector>

#include "robloc/geometry.hpp"
#include "robloc/types.hpp"

namespace robloc {

// Fraction of truth indices present in predicted; both sets must have the
// same size.
double identification_accuracy(const std::vector<Index>& predicted,
                               const std::vector<Index>& truth);

// Mean over columns of |q_true - q_est| / |q_true|.
double mean_relative_error(const Matrix& truth, const Matrix& est);

// Mean over columns of |q_true - q_est|^2.
double mean_square_position_error(const Matrix& truth, const Matrix& est);

// Mean of (d - d_hat)^2 over the given nodes and every anchor; inputs are
// unsquared m x n distance matrices. This is a property of the data alone
// and lower-bounds the position error any algorithm can reach.
double mean_square_distance_error(const Matrix& clean_d,
                                  const Matrix& corrupted_d,
                                  const std::vector<Index>& corrupted_nodes);

// Mean over columns of (sum_j |q_est - a_j|) / (sum_j |q_true - a_j|).
double mean_anchor_distance_ratio(const Matrix& truth, const Matrix& est,
                                  const AnchorSet& anchors);

}  // namespace robloc
