#include "robloc/kmeans.hpp"

#include <limits>
#include <vector>

#include "robloc/errors.hpp"
#include "robloc/rng.hpp"

namespace robloc {

namespace {

constexpr int kMaxLloydIterations = 300;
constexpr double kMovementTol = 1e-6;

}  // namespace

Matrix kmeans(const Matrix& points, int k, std::uint64_t seed) {
  const Index n = points.cols();
  const Index d = points.rows();
  if (k < 1) throw DomainError("kmeans: k must be at least 1");
  if (n < k) throw DomainError("kmeans: fewer points than clusters");
  if (!points.allFinite()) throw DomainError("kmeans: points must be finite");

  Rng rng(seed);
  Matrix centers(d, k);

  // k-means++ seeding: each next center is drawn with probability
  // proportional to the squared distance to the nearest chosen center.
  centers.col(0) = points.col(rng.uniform_int(static_cast<int>(n)));
  Vector dist2 =
      (points.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Index pick = 0;
    if (total > 0) {
      const double threshold = rng.uniform01() * total;
      double acc = 0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += dist2(i);
        if (threshold < acc) {
          pick = i;
          break;
        }
      }
    }
    centers.col(c) = points.col(pick);
    dist2 = dist2.cwiseMin(
        (points.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
  }

  std::vector<Index> assign(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    for (Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      Index best_c = 0;
      for (Index c = 0; c < k; ++c) {
        const double dd = (points.col(i) - centers.col(c)).squaredNorm();
        if (dd < best) {  // strict: lowest center index wins ties
          best = dd;
          best_c = c;
        }
      }
      assign[static_cast<std::size_t>(i)] = best_c;
    }

    Matrix sums = Matrix::Zero(d, k);
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const Index c = assign[static_cast<std::size_t>(i)];
      sums.col(c) += points.col(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    Matrix next = centers;
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        next.col(c) = sums.col(c) / static_cast<double>(
                                        counts[static_cast<std::size_t>(c)]);
      }
    }

    // Empty clusters are re-seeded at the point farthest from its own
    // center; a point used as a re-seed is not reused within the same pass.
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      double far_d = -1.0;
      Index far_i = 0;
      for (Index i = 0; i < n; ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        const double dd =
            (points.col(i) - next.col(assign[static_cast<std::size_t>(i)]))
                .squaredNorm();
        if (dd > far_d) {
          far_d = dd;
          far_i = i;
        }
      }
      next.col(c) = points.col(far_i);
      taken[static_cast<std::size_t>(far_i)] = 1;
    }

    const double movement = (next - centers).colwise().norm().maxCoeff();
    centers = next;
    if (movement < kMovementTol) break;
  }
  return centers;
}

}  // namespace robloc
