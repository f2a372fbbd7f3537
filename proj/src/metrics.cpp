#include "robloc/metrics.hpp"

#include <algorithm>
#include <string>

#include "robloc/errors.hpp"

namespace robloc {

namespace {

void check_same_shape(const Matrix& truth, const Matrix& est,
                      const char* who) {
  if (truth.rows() != est.rows() || truth.cols() != est.cols()) {
    throw ShapeError(std::string(who) + ": shape mismatch");
  }
  if (truth.cols() < 1) {
    throw DomainError(std::string(who) + ": need at least one column");
  }
}

}  // namespace

double identification_accuracy(const std::vector<Index>& predicted,
                               const std::vector<Index>& truth) {
  if (predicted.size() != truth.size() || truth.empty()) {
    throw DomainError("identification_accuracy: sets must be non-empty and "
                      "of equal size");
  }
  std::vector<Index> a = predicted;
  std::vector<Index> b = truth;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<Index> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(b.size());
}

double mean_relative_error(const Matrix& truth, const Matrix& est) {
  check_same_shape(truth, est, "mean_relative_error");
  double sum = 0;
  for (Index i = 0; i < truth.cols(); ++i) {
    const double denom = truth.col(i).norm();
    if (denom == 0.0) {
      throw DomainError("mean_relative_error: zero-norm truth position");
    }
    sum += (truth.col(i) - est.col(i)).norm() / denom;
  }
  return sum / static_cast<double>(truth.cols());
}

double mean_square_position_error(const Matrix& truth, const Matrix& est) {
  check_same_shape(truth, est, "mean_square_position_error");
  return (truth - est).colwise().squaredNorm().mean();
}

double mean_square_distance_error(const Matrix& clean_d,
                                  const Matrix& corrupted_d,
                                  const std::vector<Index>& corrupted_nodes) {
  if (clean_d.rows() != corrupted_d.rows() ||
      clean_d.cols() != corrupted_d.cols()) {
    throw ShapeError("mean_square_distance_error: shape mismatch");
  }
  if (corrupted_nodes.empty()) {
    throw DomainError("mean_square_distance_error: empty node set");
  }
  double sum = 0;
  for (Index node : corrupted_nodes) {
    if (node < 0 || node >= clean_d.cols()) {
      throw DomainError("mean_square_distance_error: node index out of range");
    }
    sum += (clean_d.col(node) - corrupted_d.col(node)).squaredNorm();
  }
  return sum / (static_cast<double>(corrupted_nodes.size()) *
                static_cast<double>(clean_d.rows()));
}

double mean_anchor_distance_ratio(const Matrix& truth, const Matrix& est,
                                  const AnchorSet& anchors) {
  check_same_shape(truth, est, "mean_anchor_distance_ratio");
  if (truth.rows() != anchors.dim()) {
    throw ShapeError("mean_anchor_distance_ratio: dimension mismatch");
  }
  double sum = 0;
  for (Index i = 0; i < truth.cols(); ++i) {
    double est_total = 0;
    double truth_total = 0;
    for (Index j = 0; j < anchors.count(); ++j) {
      est_total += (est.col(i) - anchors.positions.col(j)).norm();
      truth_total += (truth.col(i) - anchors.positions.col(j)).norm();
    }
    sum += est_total / truth_total;
  }
  return sum / static_cast<double>(truth.cols());
}

}  // namespace robloc
