#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "robloc/errors.hpp"
#include "robloc/geometry.hpp"
#include "robloc/linalg.hpp"
#include "robloc/metrics.hpp"
#include "robloc/rng.hpp"
#include "robloc/robust.hpp"
#include "robloc/scenario.hpp"

using namespace robloc;

namespace {

Vector squared_dists_to(const AnchorSet& anchors, const Vector& target) {
  Matrix single(target.size(), 1);
  single.col(0) = target;
  return squared_distance_matrix(anchors, single).col(0);
}

Vector far_target(Rng& rng) {
  Vector t(2);
  t(0) = rng.uniform(1200.0, 1400.0);
  t(1) = rng.uniform(-600.0, 400.0);
  return t;
}

}  // namespace

TEST_CASE("annihilator has one row at the minimum anchor count") {
  Rng rng(1);
  AnchorSet anchors = kmeans_anchor_layout(RegionSpec{}, 5, rng.next_u64());
  const Matrix r_bar = annihilator(anchors);  // m = r + 3
  CHECK(r_bar.rows() == 1);
  CHECK(r_bar.cols() == 4);
}

TEST_CASE("annihilator kills the augmented system") {
  Rng rng(2);
  AnchorSet anchors = kmeans_anchor_layout(RegionSpec{}, 9, rng.next_u64());
  const TrilaterationSystem system = build_system(anchors);
  const Matrix r_bar = annihilator(system);
  REQUIRE(r_bar.rows() == 5);
  REQUIRE(r_bar.cols() == 8);
  CHECK((r_bar * system.augmented()).norm() <= 1e-10);
  CHECK((r_bar * r_bar.transpose() - Matrix::Identity(5, 5)).norm() <= 1e-10);
}

TEST_CASE("annihilator rejects too few anchors") {
  Matrix positions(2, 4);
  positions << 0, 1, 0, 1,
               0, 0, 1, 1;
  CHECK_THROWS_AS(annihilator(AnchorSet(positions, 0)),
                  InsufficientAnchorsError);
}

TEST_CASE("annihilator propagates the augmented-rank error") {
  Matrix positions(2, 6);
  positions.setZero();
  for (Index i = 1; i < 6; ++i) {
    positions(0, i) = 1.0;
    positions(1, i) = 0.5 * static_cast<double>(i);
  }
  CHECK_THROWS_AS(annihilator(AnchorSet(positions, 0)), AugmentedRankError);
}

TEST_CASE("estimate_position on clean measurements reduces to trilateration") {
  Rng rng(3);
  AnchorSet anchors = kmeans_anchor_layout(RegionSpec{}, 9, rng.next_u64());
  const TrilaterationSystem system = build_system(anchors);
  const Vector target = far_target(rng);
  const Vector d2 = squared_dists_to(anchors, target);
  const Vector m_tilde = assemble_rhs(system, d2);
  const RobustEstimate estimate = estimate_position(anchors, m_tilde);
  CHECK(estimate.solver_report.converged);
  CHECK(estimate.outlier.norm() <= 1e-6 * (1 + m_tilde.norm()));
  CHECK(std::abs(estimate.central_corruption) <= 1e-6 * (1 + m_tilde.norm()));
  const Vector direct = exact_trilateration(system, d2);
  CHECK((estimate.position - direct).norm() <= 1e-6 * (1 + direct.norm()));
  CHECK((estimate.position - target).norm() <= 1e-6 * (1 + target.norm()));
}

TEST_CASE("one corrupted anchor distance is absorbed exactly") {
  Rng rng(4);
  AnchorSet anchors = kmeans_anchor_layout(RegionSpec{}, 9, rng.next_u64());
  const OutlierBudget budget = outlier_budget(anchors);
  REQUIRE(budget.k_max >= 1);
  const TrilaterationSystem system = build_system(anchors);
  const Vector target = far_target(rng);
  for (double scale : {10.0, 1e3, 1e6}) {
    Vector d2 = squared_dists_to(anchors, target);
    d2(2) += scale * d2.mean();  // arbitrary corruption magnitude
    const RobustEstimate estimate =
        estimate_position(anchors, assemble_rhs(system, d2));
    CHECK((estimate.position - target).norm() <= 1e-6 * (1 + target.norm()));
  }
}

TEST_CASE("idealized m = 15 with three corrupted anchors is near exact") {
  Rng rng(5);
  AnchorSet anchors = kmeans_anchor_layout(RegionSpec{}, 15, rng.next_u64());
  const TrilaterationSystem system = build_system(anchors);
  const Vector target = far_target(rng);
  Vector d2 = squared_dists_to(anchors, target);
  for (int idx : rng.sample_without_replacement(15, 3)) {
    d2(idx) *= 1.0 + rng.uniform(0.2, 0.25);
  }
  const RobustEstimate estimate =
      estimate_position(anchors, assemble_rhs(system, d2));
  const double relative =
      (estimate.position - target).norm() / target.norm();
  CHECK(relative <= 1e-6);
  // the augmented system reproduces the measurements once the outlier is
  // removed
  const Vector m_tilde = assemble_rhs(system, d2);
  Vector stacked(3);
  stacked << estimate.position(0) - system.central(0),
      estimate.position(1) - system.central(1), estimate.central_corruption;
  CHECK((system.augmented() * stacked + estimate.outlier - m_tilde).norm() <=
        1e-6 * (1 + m_tilde.norm()));
}

TEST_CASE("central-anchor corruption lands in the constant term") {
  Rng rng(6);
  AnchorSet anchors = kmeans_anchor_layout(RegionSpec{}, 12, rng.next_u64());
  const TrilaterationSystem system = build_system(anchors);
  const Vector target = far_target(rng);
  Vector d2 = squared_dists_to(anchors, target);
  const double bump = 0.4 * d2(anchors.central_index);
  d2(anchors.central_index) += bump;
  const RobustEstimate estimate =
      estimate_position(anchors, assemble_rhs(system, d2));
  CHECK((estimate.position - target).norm() <= 1e-6 * (1 + target.norm()));
  CHECK(estimate.central_corruption == doctest::Approx(bump / 2).epsilon(1e-6));
}

TEST_CASE("theorem-budget sweep: certified corruption is always recovered") {
  int instances = 0;
  for (std::uint64_t seed = 0; instances < 100; ++seed) {
    Rng rng(9000 + seed);
    const int m = 8 + static_cast<int>(seed % 8);
    AnchorSet anchors = kmeans_anchor_layout(RegionSpec{}, m, rng.next_u64());
    TrilaterationSystem system;
    Matrix r_bar;
    try {
      system = build_system(anchors);
      r_bar = annihilator(system);
    } catch (const Error&) {
      continue;
    }
    const int k_max = max_recoverable_outliers(coherence(r_bar));
    if (k_max < 1) continue;
    ++instances;
    const Vector target = far_target(rng);
    Vector d2 = squared_dists_to(anchors, target);
    const double scale = std::pow(10.0, 1 + 2 * static_cast<int>(seed % 3));
    for (int idx : rng.sample_without_replacement(m, k_max)) {
      d2(idx) += scale * (1.0 + rng.uniform01());
    }
    const RobustEstimate estimate =
        estimate_position(system, r_bar, assemble_rhs(system, d2));
    CHECK((estimate.position - target).norm() <= 1e-6 * (1 + target.norm()));
  }
  CHECK(instances == 100);
}

TEST_CASE("outlier budget arithmetic") {
  CHECK(max_recoverable_outliers(1.0) == 0);
  CHECK(max_recoverable_outliers(1.0 / 3.0) == 1);
  CHECK(max_recoverable_outliers(0.2) == 2);
  CHECK_THROWS_AS(max_recoverable_outliers(0.0), DomainError);
}

TEST_CASE("budget of a designed layout is consistent with planted recovery") {
  const LowCoherenceDesign design = design_low_coherence(15, 2, 42);
  const AnchorSet anchors = anchor_set_from_offsets(design.anchors_star);
  const OutlierBudget budget = outlier_budget(anchors);
  CHECK(budget.k_max >= 1);
  CHECK(budget.coherence == doctest::Approx(coherence(design.r_bar)));
  const TrilaterationSystem system = build_system(anchors);
  const Matrix r_bar = annihilator(system);
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector target = far_target(rng);
    Vector d2 = squared_dists_to(anchors, target);
    for (int idx : rng.sample_without_replacement(15, budget.k_max)) {
      d2(idx) *= 1.0 + rng.uniform(0.2, 0.25);
    }
    const RobustEstimate estimate =
        estimate_position(system, r_bar, assemble_rhs(system, d2));
    CHECK((estimate.position - target).norm() <= 1e-6 * (1 + target.norm()));
  }
}

TEST_CASE("identification nails planted nodes when normals are exact") {
  const RegionSpec region;
  const Scenario scenario = generate_scenario(region, 9, 77);
  CorruptionSpec spec;  // exact normals, severe range [0.2, 0.25]
  const CorruptedData data = corrupt_multiplicative(scenario, spec, 78);
  const TrilaterationSystem system = build_system(scenario.anchors);
  Matrix assembled(8, scenario.target_count());
  for (Index i = 0; i < scenario.target_count(); ++i) {
    assembled.col(i) = assemble_rhs(system, data.f_tilde.col(i));
  }
  const IdentificationResult result =
      identify_corrupted(scenario.anchors, assembled, spec.alpha);
  CHECK(identification_accuracy(result.indices, data.truth_corrupted_nodes) ==
        doctest::Approx(1.0));

  // zero/nonzero column-norm pattern separates the planted set exactly
  for (Index i = 0; i < scenario.target_count(); ++i) {
    const bool planted =
        std::find(data.truth_corrupted_nodes.begin(),
                  data.truth_corrupted_nodes.end(),
                  i) != data.truth_corrupted_nodes.end();
    const double threshold = 1e-8 * (1 + assembled.col(i).norm());
    CHECK((result.column_norms(i) > threshold) == planted);
  }
}

TEST_CASE("identification pattern is exact across seeds") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int m = 6 + 3 * static_cast<int>(seed % 4);
    const Scenario scenario = generate_scenario(RegionSpec{}, m, 500 + seed);
    CorruptionSpec spec;
    const CorruptedData data =
        corrupt_multiplicative(scenario, spec, 900 + seed);
    const TrilaterationSystem system = build_system(scenario.anchors);
    const Matrix r_bar = annihilator(system);
    Matrix assembled(m - 1, scenario.target_count());
    for (Index i = 0; i < scenario.target_count(); ++i) {
      assembled.col(i) = assemble_rhs(system, data.f_tilde.col(i));
    }
    const Matrix s = group_min_norm(r_bar, assembled);
    std::vector<Index> nonzero;
    for (Index i = 0; i < s.cols(); ++i) {
      if (s.col(i).norm() > 1e-8 * (1 + assembled.col(i).norm())) {
        nonzero.push_back(i);
      }
    }
    CHECK(nonzero == data.truth_corrupted_nodes);
  }
}

TEST_CASE("identify_corrupted handles alpha = n and rejects alpha > n") {
  Rng rng(8);
  AnchorSet anchors = kmeans_anchor_layout(RegionSpec{}, 6, rng.next_u64());
  Matrix assembled = Matrix::Random(5, 4);
  const IdentificationResult all =
      identify_corrupted(anchors, assembled, 4);
  CHECK(all.indices.size() == 4);
  std::vector<Index> sorted = all.indices;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<Index>{0, 1, 2, 3});
  CHECK_THROWS_AS(identify_corrupted(anchors, assembled, 5), DomainError);
}

TEST_CASE("identification is equivariant under column permutations") {
  const Scenario scenario = generate_scenario(RegionSpec{}, 9, 31);
  CorruptionSpec spec;
  const CorruptedData data = corrupt_multiplicative(scenario, spec, 32);
  const TrilaterationSystem system = build_system(scenario.anchors);
  const Index n = scenario.target_count();
  Matrix assembled(8, n);
  for (Index i = 0; i < n; ++i) {
    assembled.col(i) = assemble_rhs(system, data.f_tilde.col(i));
  }
  const IdentificationResult base =
      identify_corrupted(scenario.anchors, assembled, spec.alpha);

  // reverse the column order
  Matrix reversed = assembled.rowwise().reverse();
  const IdentificationResult perm =
      identify_corrupted(scenario.anchors, reversed, spec.alpha);
  std::vector<Index> mapped;
  for (Index idx : base.indices) mapped.push_back(n - 1 - idx);
  std::sort(mapped.begin(), mapped.end());
  std::vector<Index> got = perm.indices;
  std::sort(got.begin(), got.end());
  CHECK(got == mapped);
}

TEST_CASE("naive identification is fooled by distant clean nodes") {
  Matrix positions(2, 6);
  positions << 0, 60, 0, 60, 30, 20,
               0, 0, 60, 60, 90, 30;
  AnchorSet anchors(positions, 5);
  Matrix targets(2, 2);
  targets.col(0) << 100, 100;    // near, corrupted below
  targets.col(1) << 5000, 5000;  // far and clean
  Matrix f = squared_distance_matrix(anchors, targets);
  f.col(0) *= 1.25;  // heavy corruption on the near node
  const IdentificationResult naive = naive_identify(f, 1);
  CHECK(naive.indices == std::vector<Index>{1});  // picks the far clean node
  CHECK_THROWS_AS(naive_identify(f, 3), DomainError);
}

TEST_CASE("srpca identification with one lambda is the plain top-alpha") {
  Rng rng(9);
  Matrix low_rank =
      Matrix::Random(6, 15);
  Matrix f = low_rank * 2.0;
  f.col(3) += Vector::Constant(6, 25.0);
  f.col(9) -= Vector::Constant(6, 25.0);
  const SolverOptions opts{1e-7, 2000, 1.0};
  const IdentificationResult voted = srpca_identify(f, 2, {0.5}, opts);
  const SrpcaResult direct = srpca(f, 0.5, opts);
  const Vector norms = direct.s.colwise().norm().transpose();
  std::vector<Index> order{0, 1};
  std::iota(order.begin(), order.end(), 0);
  std::vector<Index> expect;
  {
    std::vector<Index> idx(15);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
      return norms(a) != norms(b) ? norms(a) > norms(b) : a < b;
    });
    expect = {idx[0], idx[1]};
  }
  CHECK(voted.indices == expect);
}

TEST_CASE("srpca identification voting returns a unanimous set unchanged") {
  Rng rng(10);
  Matrix f = Matrix::Random(6, 12);
  f.col(2) += Vector::Constant(6, 40.0);
  f.col(7) += Vector::Constant(6, 40.0);
  const SolverOptions opts{1e-6, 1500, 1.0};
  const IdentificationResult voted =
      srpca_identify(f, 2, {0.3, 0.5, 0.8}, opts);
  std::vector<Index> sorted = voted.indices;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<Index>{2, 7});
  CHECK_THROWS_AS(srpca_identify(f, 2, {}, opts), DomainError);
}

TEST_CASE("designed annihilator satisfies its construction guarantees") {
  for (int m : {6, 9, 12, 15}) {
    const LowCoherenceDesign design = design_low_coherence(m, 2, 1234);
    const Index w = m - 4;
    REQUIRE(design.r_bar.rows() == w);
    REQUIRE(design.r_bar.cols() == m - 1);
    CHECK((design.r_bar * Vector::Ones(m - 1)).norm() <= 1e-10);
    CHECK((design.r_bar * design.r_bar.transpose() - Matrix::Identity(w, w))
              .norm() <= 1e-10);
    const double defect =
        (design.r_bar.transpose() * design.r_bar -
         Matrix::Identity(m - 1, m - 1))
            .squaredNorm();
    CHECK(defect == doctest::Approx(3.0).epsilon(1e-9));  // r + 1
    CHECK((design.r_bar * design.anchors_star).norm() <= 1e-8);
    CHECK(coherence(design.r_bar) >= welch_bound(m - 4, m - 1) - 1e-9);
    CHECK(design.anchors_star.cwiseAbs().maxCoeff() ==
          doctest::Approx(400.0));
  }
  CHECK_THROWS_AS(design_low_coherence(4, 2, 0), InsufficientAnchorsError);
}

TEST_CASE("designed annihilator is deterministic per seed") {
  const LowCoherenceDesign a = design_low_coherence(12, 2, 9);
  const LowCoherenceDesign b = design_low_coherence(12, 2, 9);
  CHECK((a.r_bar.array() == b.r_bar.array()).all());
  CHECK((a.anchors_star.array() == b.anchors_star.array()).all());
}

TEST_CASE("designed coherence usually beats k-means layouts") {
  int wins = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed = 4000 + 7 * static_cast<std::uint64_t>(t);
    const double mu_designed = coherence(design_low_coherence(15, 2, seed).r_bar);
    const AnchorSet layout = kmeans_anchor_layout(RegionSpec{}, 15, seed + 1);
    const double mu_kmeans = coherence(annihilator(layout));
    if (mu_designed <= mu_kmeans) ++wins;
  }
  CHECK(wins * 2 >= trials);
}
