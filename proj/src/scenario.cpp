#include "robloc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "robloc/kmeans.hpp"
#include "robloc/rng.hpp"

namespace robloc {

namespace {

constexpr int kMaxSampleAttempts = 100000;

void validate_region(const RegionSpec& spec) {
  auto check_box = [](const Box& b, const char* what) {
    if (!(b.x_max > b.x_min) || !(b.y_max > b.y_min)) {
      throw DomainError(std::string("RegionSpec: degenerate ") + what);
    }
  };
  check_box(spec.near_box, "near box");
  for (const Box& b : spec.far_boxes) check_box(b, "far box");
  if (spec.min_separation <= 0) {
    throw DomainError("RegionSpec: min_separation must be positive");
  }
  if (spec.near_count < 0 || spec.far_count_per_box < 0) {
    throw DomainError("RegionSpec: counts must be nonnegative");
  }
}

void validate_corruption(const CorruptionSpec& spec, const Scenario& scenario) {
  if (spec.normal_lo < 0 || spec.normal_hi < spec.normal_lo) {
    throw DomainError("CorruptionSpec: need 0 <= normal_lo <= normal_hi");
  }
  if (spec.severe_lo < 0 || spec.severe_hi < spec.severe_lo) {
    throw DomainError("CorruptionSpec: need 0 <= severe_lo <= severe_hi");
  }
  if (spec.alpha < 0 || spec.alpha > scenario.far_count()) {
    throw DomainError("CorruptionSpec: alpha exceeds far node count");
  }
  const Index m = scenario.anchors.count();
  const Index pool = spec.central_may_corrupt ? m : m - 1;
  if (spec.k < 0 || spec.k > pool) {
    throw DomainError("CorruptionSpec: k exceeds eligible anchor count");
  }
}

bool separated(const Vector& candidate, const Matrix& placed, Index used,
               double min_sep) {
  for (Index i = 0; i < used; ++i) {
    if ((placed.col(i) - candidate).norm() < min_sep) return false;
  }
  return true;
}

// Uniform points in a box, each at least min_sep away from every column of
// every matrix in `others` and from previously accepted points.
Matrix sample_separated(Rng& rng, const Box& box, int count, double min_sep,
                        const std::vector<const Matrix*>& others) {
  Matrix placed(2, count);
  for (int p = 0; p < count; ++p) {
    int attempts = 0;
    for (;;) {
      if (++attempts > kMaxSampleAttempts) {
        throw SamplingExhaustedError(
            "generate_scenario: separation constraint cannot be met after " +
            std::to_string(kMaxSampleAttempts) + " attempts");
      }
      Vector candidate(2);
      candidate(0) = rng.uniform(box.x_min, box.x_max);
      candidate(1) = rng.uniform(box.y_min, box.y_max);
      bool ok = separated(candidate, placed, p, min_sep);
      for (const Matrix* m : others) {
        if (!ok) break;
        ok = separated(candidate, *m, m->cols(), min_sep);
      }
      if (ok) {
        placed.col(p) = candidate;
        break;
      }
    }
  }
  return placed;
}

nlohmann::json points_to_json(const Matrix& points) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < points.cols(); ++i) {
    nlohmann::json pt = nlohmann::json::array();
    for (Index j = 0; j < points.rows(); ++j) pt.push_back(points(j, i));
    out.push_back(std::move(pt));
  }
  return out;
}

Matrix points_from_json(const nlohmann::json& j) {
  const Index n = static_cast<Index>(j.size());
  const Index dim = n > 0 ? static_cast<Index>(j.at(0).size()) : 2;
  Matrix points(dim, n);
  for (Index i = 0; i < n; ++i) {
    for (Index d = 0; d < dim; ++d) {
      points(d, i) = j.at(static_cast<std::size_t>(i))
                         .at(static_cast<std::size_t>(d))
                         .get<double>();
    }
  }
  return points;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const Index rows = static_cast<Index>(j.size());
  const Index cols = rows > 0 ? static_cast<Index>(j.at(0).size()) : 0;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < cols; ++c) {
      m(i, c) = j.at(static_cast<std::size_t>(i))
                    .at(static_cast<std::size_t>(c))
                    .get<double>();
    }
  }
  return m;
}

}  // namespace

Matrix Scenario::all_targets() const {
  Matrix all(2, target_count());
  all.leftCols(near_count()) = near_targets;
  all.rightCols(far_count()) = far_targets;
  return all;
}

AnchorSet kmeans_anchor_layout(const RegionSpec& spec, int m,
                               std::uint64_t seed) {
  validate_region(spec);
  if (m < 4) throw DomainError("kmeans_anchor_layout: need m >= 4");
  if (spec.kmeans_cloud < m) {
    throw DomainError("kmeans_anchor_layout: cloud smaller than m");
  }
  Rng rng(seed);
  Matrix cloud(2, spec.kmeans_cloud);
  for (Index i = 0; i < cloud.cols(); ++i) {
    cloud(0, i) = rng.uniform(spec.near_box.x_min, spec.near_box.x_max);
    cloud(1, i) = rng.uniform(spec.near_box.y_min, spec.near_box.y_max);
  }
  Matrix centers = kmeans(cloud, m, rng.next_u64());
  return AnchorSet(std::move(centers));  // last center is the central node
}

Scenario generate_scenario(const RegionSpec& spec, int m, std::uint64_t seed) {
  validate_region(spec);
  if (m < 4) throw DomainError("generate_scenario: need m >= 4");
  if (spec.kmeans_cloud < m) {
    throw DomainError("generate_scenario: cloud smaller than m");
  }
  Rng rng(seed);
  Matrix cloud(2, spec.kmeans_cloud);
  for (Index i = 0; i < cloud.cols(); ++i) {
    cloud(0, i) = rng.uniform(spec.near_box.x_min, spec.near_box.x_max);
    cloud(1, i) = rng.uniform(spec.near_box.y_min, spec.near_box.y_max);
  }
  AnchorSet anchors(kmeans(cloud, m, rng.next_u64()));

  const Matrix near = sample_separated(rng, spec.near_box, spec.near_count,
                                       spec.min_separation,
                                       {&anchors.positions});
  Matrix far(2, 0);
  for (const Box& box : spec.far_boxes) {
    Matrix batch =
        sample_separated(rng, box, spec.far_count_per_box, spec.min_separation,
                         {&anchors.positions, &near, &far});
    Matrix merged(2, far.cols() + batch.cols());
    merged << far, batch;
    far = std::move(merged);
  }
  return {std::move(anchors), near, std::move(far), seed};
}

CorruptedData corrupt_multiplicative(const Scenario& scenario,
                                     const CorruptionSpec& spec,
                                     std::uint64_t seed) {
  validate_corruption(spec, scenario);
  const Matrix targets = scenario.all_targets();
  Matrix f_clean = squared_distance_matrix(scenario.anchors, targets);
  const Index m = scenario.anchors.count();
  const Index n = targets.cols();
  const Index far_offset = scenario.near_count();

  Rng rng(seed);
  std::vector<int> picked = rng.sample_without_replacement(
      static_cast<int>(scenario.far_count()), spec.alpha);
  std::vector<Index> nodes;
  nodes.reserve(picked.size());
  for (int p : picked) nodes.push_back(far_offset + p);
  std::sort(nodes.begin(), nodes.end());

  // Per corrupted node, the anchors whose distance entries take the severe
  // range. Without central_may_corrupt the draw is over non-central anchors
  // and indices are remapped around the central one.
  const Index central = scenario.anchors.central_index;
  std::vector<std::vector<Index>> per_node_anchors;
  for (std::size_t t = 0; t < nodes.size(); ++t) {
    const int pool =
        static_cast<int>(spec.central_may_corrupt ? m : m - 1);
    std::vector<int> raw = rng.sample_without_replacement(pool, spec.k);
    std::vector<Index> anchors_idx;
    anchors_idx.reserve(raw.size());
    for (int a : raw) {
      Index idx = a;
      if (!spec.central_may_corrupt && idx >= central) ++idx;
      anchors_idx.push_back(idx);
    }
    std::sort(anchors_idx.begin(), anchors_idx.end());
    per_node_anchors.push_back(std::move(anchors_idx));
  }

  std::vector<std::vector<char>> severe(
      static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(m), 0));
  for (std::size_t t = 0; t < nodes.size(); ++t) {
    for (Index a : per_node_anchors[t]) {
      severe[static_cast<std::size_t>(nodes[t])][static_cast<std::size_t>(a)] = 1;
    }
  }

  Matrix f_tilde = f_clean;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      const bool hot = severe[static_cast<std::size_t>(i)]
                             [static_cast<std::size_t>(j)] != 0;
      const double u = hot ? rng.uniform(spec.severe_lo, spec.severe_hi)
                           : rng.uniform(spec.normal_lo, spec.normal_hi);
      f_tilde(j, i) *= 1.0 + u;
    }
  }
  return {std::move(f_tilde), std::move(f_clean), std::move(nodes),
          std::move(per_node_anchors)};
}

CorruptedData corrupt_additive_mixture(const Scenario& scenario, double beta,
                                       double sigma, double lo, double hi,
                                       std::uint64_t seed) {
  if (beta < 0 || beta > 1) {
    throw DomainError("corrupt_additive_mixture: beta must be in [0, 1]");
  }
  if (sigma < 0) {
    throw DomainError("corrupt_additive_mixture: sigma must be nonnegative");
  }
  if (lo > hi) {
    throw DomainError("corrupt_additive_mixture: need lo <= hi");
  }
  const Matrix targets = scenario.all_targets();
  Matrix f_clean = squared_distance_matrix(scenario.anchors, targets);
  Matrix f_tilde(f_clean.rows(), f_clean.cols());
  Rng rng(seed);
  for (Index i = 0; i < f_clean.cols(); ++i) {
    for (Index j = 0; j < f_clean.rows(); ++j) {
      const double noise = rng.uniform01() < beta ? rng.uniform(lo, hi)
                                                  : rng.normal(0.0, sigma);
      const double d = std::max(0.0, std::sqrt(f_clean(j, i)) + noise);
      f_tilde(j, i) = d * d;
    }
  }
  return {std::move(f_tilde), std::move(f_clean), {}, {}};
}

nlohmann::json scenario_to_json(const Scenario& scenario) {
  return {{"seed", scenario.seed},
          {"anchors",
           {{"central_index", scenario.anchors.central_index},
            {"positions", points_to_json(scenario.anchors.positions)}}},
          {"near_targets", points_to_json(scenario.near_targets)},
          {"far_targets", points_to_json(scenario.far_targets)}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
  AnchorSet anchors(points_from_json(j.at("anchors").at("positions")),
                    j.at("anchors").at("central_index").get<Index>());
  return {std::move(anchors), points_from_json(j.at("near_targets")),
          points_from_json(j.at("far_targets")),
          j.at("seed").get<std::uint64_t>()};
}

nlohmann::json corrupted_to_json(const CorruptedData& data) {
  nlohmann::json anchors = nlohmann::json::array();
  for (const auto& list : data.truth_corrupted_anchors) {
    anchors.push_back(list);
  }
  return {{"f_tilde", matrix_to_json(data.f_tilde)},
          {"f_clean", matrix_to_json(data.f_clean)},
          {"corrupted_nodes", data.truth_corrupted_nodes},
          {"corrupted_anchors", std::move(anchors)}};
}

CorruptedData corrupted_from_json(const nlohmann::json& j) {
  CorruptedData data;
  data.f_tilde = matrix_from_json(j.at("f_tilde"));
  data.f_clean = matrix_from_json(j.at("f_clean"));
  data.truth_corrupted_nodes =
      j.at("corrupted_nodes").get<std::vector<Index>>();
  data.truth_corrupted_anchors =
      j.at("corrupted_anchors").get<std::vector<std::vector<Index>>>();
  return data;
}

nlohmann::json region_to_json(const RegionSpec& spec) {
  auto box = [](const Box& b) {
    return nlohmann::json::array({b.x_min, b.x_max, b.y_min, b.y_max});
  };
  nlohmann::json far = nlohmann::json::array();
  for (const Box& b : spec.far_boxes) far.push_back(box(b));
  return {{"near_box", box(spec.near_box)},
          {"far_boxes", std::move(far)},
          {"min_separation", spec.min_separation},
          {"near_count", spec.near_count},
          {"far_count_per_box", spec.far_count_per_box},
          {"kmeans_cloud", spec.kmeans_cloud}};
}

RegionSpec region_from_json(const nlohmann::json& j) {
  auto box = [](const nlohmann::json& b) {
    return Box{b.at(0).get<double>(), b.at(1).get<double>(),
               b.at(2).get<double>(), b.at(3).get<double>()};
  };
  RegionSpec spec;
  if (j.contains("near_box")) spec.near_box = box(j.at("near_box"));
  if (j.contains("far_boxes")) {
    spec.far_boxes.clear();
    for (const auto& b : j.at("far_boxes")) spec.far_boxes.push_back(box(b));
  }
  if (j.contains("min_separation")) {
    spec.min_separation = j.at("min_separation").get<double>();
  }
  if (j.contains("near_count")) {
    spec.near_count = j.at("near_count").get<int>();
  }
  if (j.contains("far_count_per_box")) {
    spec.far_count_per_box = j.at("far_count_per_box").get<int>();
  }
  if (j.contains("kmeans_cloud")) {
    spec.kmeans_cloud = j.at("kmeans_cloud").get<int>();
  }
  return spec;
}

nlohmann::json corruption_to_json(const CorruptionSpec& spec) {
  return {{"alpha", spec.alpha},
          {"k", spec.k},
          {"normal", {spec.normal_lo, spec.normal_hi}},
          {"severe", {spec.severe_lo, spec.severe_hi}},
          {"central_may_corrupt", spec.central_may_corrupt}};
}

CorruptionSpec corruption_from_json(const nlohmann::json& j) {
  CorruptionSpec spec;
  if (j.contains("alpha")) spec.alpha = j.at("alpha").get<int>();
  if (j.contains("k")) spec.k = j.at("k").get<int>();
  if (j.contains("normal")) {
    spec.normal_lo = j.at("normal").at(0).get<double>();
    spec.normal_hi = j.at("normal").at(1).get<double>();
  }
  if (j.contains("severe")) {
    spec.severe_lo = j.at("severe").at(0).get<double>();
    spec.severe_hi = j.at("severe").at(1).get<double>();
  }
  if (j.contains("central_may_corrupt")) {
    spec.central_may_corrupt = j.at("central_may_corrupt").get<bool>();
  }
  return spec;
}

}  // namespace robloc
