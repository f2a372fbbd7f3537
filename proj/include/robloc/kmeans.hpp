#pragma once

#include <cstdint>

#include "robloc/types.hpp"

namespace robloc {

// Seeded k-means over column points (points is d x n). Centers are seeded
// with k-means++ and refined by Lloyd iterations until the largest center
// movement drops below 1e-6 or 300 iterations elapse. A cluster that ends up
// empty is re-seeded at the point farthest from its currently assigned
// center (ties broken by the lowest point index). Deterministic per seed.
Matrix kmeans(const Matrix& points, int k, std::uint64_t seed);

}  // namespace robloc
