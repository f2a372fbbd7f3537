#include "robloc/geometry.hpp"

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "robloc/linalg.hpp"

namespace robloc {

namespace {

Index rank_of(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> dec(a);
  const Vector& sigma = dec.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  Index rank = 0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > kRankTolerance * sigma(0)) ++rank;
  }
  return rank;
}

}  // namespace

void AnchorSet::validate() const {
  const Index r = positions.rows();
  const Index m = positions.cols();
  if (r < 2 || r > 3) {
    throw DomainError("AnchorSet: dimension must be 2 or 3, got " +
                      std::to_string(r));
  }
  if (m < r + 1) {
    throw InsufficientAnchorsError("AnchorSet: need at least " +
                                   std::to_string(r + 1) + " anchors, got " +
                                   std::to_string(m));
  }
  if (central_index < 0 || central_index >= m) {
    throw DomainError("AnchorSet: central index out of range");
  }
  if (!positions.allFinite()) {
    throw DomainError("AnchorSet: positions must be finite");
  }
}

AnchorSet::AnchorSet(Matrix positions_in, Index central_index_in)
    : positions(std::move(positions_in)), central_index(central_index_in) {
  validate();
}

AnchorSet::AnchorSet(Matrix positions_in)
    : positions(std::move(positions_in)), central_index(positions.cols() - 1) {
  validate();
}

Matrix TrilaterationSystem::augmented() const {
  Matrix aug(x.rows(), x.cols() + 1);
  aug.leftCols(x.cols()) = x;
  aug.col(x.cols()).setOnes();
  return aug;
}

TrilaterationSystem build_system(const AnchorSet& anchors) {
  const Index r = anchors.dim();
  const Index m = anchors.count();
  const Vector center = anchors.central();

  Matrix x(m - 1, r);
  Vector offsets(m - 1);
  Index row = 0;
  for (Index i = 0; i < m; ++i) {
    if (i == anchors.central_index) continue;
    const Vector delta = anchors.positions.col(i) - center;
    x.row(row) = delta.transpose();
    offsets(row) = delta.squaredNorm();
    ++row;
  }

  if (rank_of(x) < r) {
    throw DegenerateConfigurationError(
        "build_system: anchors are affinely dependent");
  }
  TrilaterationSystem system{std::move(x), std::move(offsets),
                             anchors.central_index, center};
  if (m - 1 > r && rank_of(system.augmented()) < r + 1) {
    throw AugmentedRankError(
        "build_system: all-ones vector lies in the anchor offset span");
  }
  return system;
}

Vector assemble_rhs(const TrilaterationSystem& system,
                    const Vector& squared_dists) {
  const Index m = system.anchor_count();
  if (squared_dists.size() != m) {
    throw ShapeError("assemble_rhs: expected " + std::to_string(m) +
                     " squared distances, got " +
                     std::to_string(squared_dists.size()));
  }
  if (!squared_dists.allFinite() || (squared_dists.array() < 0.0).any()) {
    throw DomainError("assemble_rhs: squared distances must be finite and "
                      "nonnegative");
  }
  const double central_d2 = squared_dists(system.central_index);
  Vector rhs(m - 1);
  Index row = 0;
  for (Index i = 0; i < m; ++i) {
    if (i == system.central_index) continue;
    rhs(row) =
        0.5 * (central_d2 - squared_dists(i) + system.rhs_offsets(row));
    ++row;
  }
  return rhs;
}

Vector exact_trilateration(const TrilaterationSystem& system,
                           const Vector& squared_dists) {
  const Vector rhs = assemble_rhs(system, squared_dists);
  return least_squares(system.x, rhs) + system.central;
}

Matrix squared_distance_matrix(const AnchorSet& anchors,
                               const Matrix& targets) {
  if (targets.rows() != anchors.dim()) {
    throw ShapeError("squared_distance_matrix: target dimension " +
                     std::to_string(targets.rows()) + " != anchor dimension " +
                     std::to_string(anchors.dim()));
  }
  const Index m = anchors.count();
  const Index n = targets.cols();
  Matrix f(m, n);
  for (Index j = 0; j < m; ++j) {
    f.row(j) =
        (targets.colwise() - anchors.positions.col(j)).colwise().squaredNorm();
  }
  return f;
}

AnchorSet anchor_set_from_offsets(const Matrix& x_star) {
  const Index r = x_star.cols();
  const Index m = x_star.rows() + 1;
  Matrix positions = Matrix::Zero(r, m);
  positions.leftCols(m - 1) = x_star.transpose();
  return AnchorSet(std::move(positions), m - 1);
}

}  // namespace robloc
