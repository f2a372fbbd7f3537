#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "robloc/geometry.hpp"
#include "robloc/types.hpp"

namespace robloc {

struct Box {
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

struct RegionSpec {
  Box near_box{-400, 400, -400, 400};
  std::vector<Box> far_boxes{{-1200, -1000, -600, 400},
                             {1200, 1400, -600, 400}};
  double min_separation = 60;
  int near_count = 50;
  int far_count_per_box = 50;
  int kmeans_cloud = 1000;
};

struct Scenario {
  AnchorSet anchors;
  Matrix near_targets;  // 2 x near_count
  Matrix far_targets;   // 2 x (far boxes * far_count_per_box)
  std::uint64_t seed = 0;

  Index near_count() const { return near_targets.cols(); }
  Index far_count() const { return far_targets.cols(); }
  Index target_count() const { return near_count() + far_count(); }
  // Near targets first, then far targets; node indices are global over this
  // concatenation.
  Matrix all_targets() const;
};

struct CorruptionSpec {
  int alpha = 4;  // corrupted far nodes
  int k = 3;      // corrupted anchor distances per node
  double normal_lo = 0.0, normal_hi = 0.0;  // relative noise on every node
  double severe_lo = 0.2, severe_hi = 0.25; // relative noise on chosen entries
  bool central_may_corrupt = true;
};

struct CorruptedData {
  Matrix f_tilde;  // m x n squared distances after corruption
  Matrix f_clean;  // m x n exact squared distances
  std::vector<Index> truth_corrupted_nodes;                // ascending
  std::vector<std::vector<Index>> truth_corrupted_anchors; // aligned, ascending
};

// Anchors only: a fresh uniform cloud in the near box clustered into m
// centers, the last center designated central.
AnchorSet kmeans_anchor_layout(const RegionSpec& spec, int m,
                               std::uint64_t seed);

// Full world: anchors plus rejection-sampled near and far targets honoring
// min_separation against everything already placed. Each point gets at most
// 1e5 candidate draws before SamplingExhaustedError.
Scenario generate_scenario(const RegionSpec& spec, int m, std::uint64_t seed);

// Multiplicative corruption of squared distances: every entry is scaled by
// (1 + u) with u uniform in [normal_lo, normal_hi], except the k chosen
// anchor entries of each of the alpha chosen far nodes, which use
// [severe_lo, severe_hi] instead.
CorruptedData corrupt_multiplicative(const Scenario& scenario,
                                     const CorruptionSpec& spec,
                                     std::uint64_t seed);

// Additive noise on distances (not squared): with probability beta the noise
// is uniform in [lo, hi], otherwise Gaussian with the given sigma. Perturbed
// distances are clamped at zero before squaring. No nodes are marked
// corrupted (the model perturbs every entry).
CorruptedData corrupt_additive_mixture(const Scenario& scenario, double beta,
                                       double sigma, double lo, double hi,
                                       std::uint64_t seed);

// JSON replay schema (documented in the README).
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json corrupted_to_json(const CorruptedData& data);
CorruptedData corrupted_from_json(const nlohmann::json& j);

nlohmann::json region_to_json(const RegionSpec& spec);
RegionSpec region_from_json(const nlohmann::json& j);
nlohmann::json corruption_to_json(const CorruptionSpec& spec);
CorruptionSpec corruption_from_json(const nlohmann::json& j);

}  // namespace robloc
