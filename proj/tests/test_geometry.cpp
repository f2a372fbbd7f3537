#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "robloc/errors.hpp"
#include "robloc/geometry.hpp"
#include "robloc/kmeans.hpp"
#include "robloc/linalg.hpp"
#include "robloc/rng.hpp"

using namespace robloc;

namespace {

AnchorSet unit_square_anchors() {
  Matrix positions(2, 4);
  positions << 0, 1, 0, 1,
               0, 0, 1, 1;
  return AnchorSet(positions, 0);  // central anchor at the origin
}

Vector squared_dists_to(const AnchorSet& anchors, const Vector& target) {
  Matrix single(target.size(), 1);
  single.col(0) = target;
  return squared_distance_matrix(anchors, single).col(0);
}

Matrix random_positions(Index dim, Index count, Rng& rng, double span) {
  Matrix p(dim, count);
  for (Index i = 0; i < count; ++i) {
    for (Index d = 0; d < dim; ++d) p(d, i) = rng.uniform(-span, span);
  }
  return p;
}

}  // namespace

TEST_CASE("build_system for the unit square") {
  const TrilaterationSystem system = build_system(unit_square_anchors());
  Matrix expected(3, 2);
  expected << 1, 0,
              0, 1,
              1, 1;
  CHECK((system.x - expected).norm() < 1e-14);
  Vector offsets(3);
  offsets << 1, 1, 2;
  CHECK((system.rhs_offsets - offsets).norm() < 1e-14);
}

TEST_CASE("collinear anchors are degenerate") {
  Matrix positions(2, 3);
  positions << 0, 1, 2,
               0, 1, 2;
  CHECK_THROWS_AS(build_system(AnchorSet(positions, 0)),
                  DegenerateConfigurationError);
}

TEST_CASE("anchor offsets containing the ones direction are rejected") {
  // every anchor offset has first coordinate 1, so [x 1] loses rank
  Matrix positions(2, 6);
  positions.setZero();
  for (Index i = 1; i < 6; ++i) {
    positions(0, i) = 1.0;
    positions(1, i) = 0.3 * static_cast<double>(i);
  }
  CHECK_THROWS_AS(build_system(AnchorSet(positions, 0)), AugmentedRankError);
}

TEST_CASE("build_system on a k-means layout has full rank") {
  Rng rng(31);
  Matrix cloud = random_positions(2, 1000, rng, 400.0);
  AnchorSet anchors(kmeans(cloud, 9, 0));
  const TrilaterationSystem system = build_system(anchors);
  CHECK(system.x.rows() == 8);
  CHECK(system.x.cols() == 2);
  Eigen::JacobiSVD<Matrix> dec(system.x);
  CHECK(dec.singularValues()(1) > 1e-10 * dec.singularValues()(0));
}

TEST_CASE("assemble_rhs vanishes for a target at the central anchor") {
  const AnchorSet anchors = unit_square_anchors();
  const TrilaterationSystem system = build_system(anchors);
  const Vector d2 = squared_dists_to(anchors, anchors.central());
  const Vector rhs = assemble_rhs(system, d2);
  CHECK(rhs.norm() < 1e-14);
  const Vector q = exact_trilateration(system, d2);
  CHECK((q - anchors.central()).norm() < 1e-12);
}

TEST_CASE("assemble_rhs round-trips the unit-square target") {
  const AnchorSet anchors = unit_square_anchors();
  const TrilaterationSystem system = build_system(anchors);
  Vector target(2);
  target << 1, 1;
  const Vector rhs = assemble_rhs(system, squared_dists_to(anchors, target));
  CHECK((system.x * target - rhs).norm() < 1e-12);
}

TEST_CASE("assemble_rhs rejects bad inputs") {
  const TrilaterationSystem system = build_system(unit_square_anchors());
  Vector d2 = Vector::Ones(4);
  d2(2) = -0.5;
  CHECK_THROWS_AS(assemble_rhs(system, d2), DomainError);
  CHECK_THROWS_AS(assemble_rhs(system, Vector::Ones(5)), ShapeError);
}

TEST_CASE("assembled rhs is consistent across random configurations") {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 100; ++seed) {
    Rng rng(1000 + seed);
    const Index r = 2 + static_cast<Index>(seed % 2);
    const Index m = r + 2 + static_cast<Index>(seed % 6);
    AnchorSet anchors(random_positions(r, m, rng, 100.0));
    TrilaterationSystem system;
    try {
      system = build_system(anchors);
    } catch (const Error&) {
      continue;  // degenerate random draw
    }
    const Vector target = random_positions(r, 1, rng, 150.0).col(0);
    const Vector rhs = assemble_rhs(system, squared_dists_to(anchors, target));
    const Vector relative = target - anchors.central();
    CHECK((system.x * relative - rhs).norm() <= 1e-9 * (1 + rhs.norm()));
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("exact trilateration with the minimal 2D configuration") {
  Matrix positions(2, 3);
  positions << 0, 1, 0,
               0, 0, 1;
  AnchorSet anchors(positions, 2);
  const TrilaterationSystem system = build_system(anchors);
  Vector target(2);
  target << 0.25, 0.75;
  const Vector q =
      exact_trilateration(system, squared_dists_to(anchors, target));
  CHECK((q - target).norm() <= 1e-8 * (1 + target.norm()));
}

TEST_CASE("exact trilateration in 3D") {
  Matrix positions(3, 4);
  positions << 0, 1, 0, 0,
               0, 0, 1, 0,
               0, 0, 0, 1;
  AnchorSet anchors(positions, 3);
  const TrilaterationSystem system = build_system(anchors);
  Vector target(3);
  target << -2.0, 0.5, 3.25;
  const Vector q =
      exact_trilateration(system, squared_dists_to(anchors, target));
  CHECK((q - target).norm() <= 1e-8 * (1 + target.norm()));
}

TEST_CASE("target coincident with a non-central anchor") {
  const AnchorSet anchors = unit_square_anchors();
  const TrilaterationSystem system = build_system(anchors);
  const Vector target = anchors.positions.col(2);
  const Vector q =
      exact_trilateration(system, squared_dists_to(anchors, target));
  CHECK((q - target).norm() <= 1e-8 * (1 + target.norm()));
}

TEST_CASE("round trip over many random configurations") {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 500; ++seed) {
    Rng rng(5000 + seed);
    const Index r = 2 + static_cast<Index>(seed % 2);
    const Index m = r + 2 + static_cast<Index>(seed % (14 - r));
    AnchorSet anchors(random_positions(r, m, rng, 200.0));
    TrilaterationSystem system;
    try {
      system = build_system(anchors);
    } catch (const Error&) {
      continue;
    }
    const Vector target = random_positions(r, 1, rng, 400.0).col(0);
    const Vector q =
        exact_trilateration(system, squared_dists_to(anchors, target));
    CHECK((q - target).norm() <= 1e-8 * (1 + target.norm()));
    ++checked;
  }
  CHECK(checked == 500);
}

TEST_CASE("translation equivariance") {
  Rng rng(99);
  Matrix positions = random_positions(2, 7, rng, 50.0);
  Vector target = random_positions(2, 1, rng, 80.0).col(0);
  Vector shift(2);
  shift << 1234.5, -987.25;

  AnchorSet anchors(positions);
  const Vector q = exact_trilateration(build_system(anchors),
                                       squared_dists_to(anchors, target));
  AnchorSet moved(positions.colwise() + shift);
  const Vector q_moved = exact_trilateration(
      build_system(moved), squared_dists_to(moved, Vector(target + shift)));
  CHECK((q_moved - (q + shift)).norm() <= 1e-8 * (1 + q.norm()));
}

TEST_CASE("system excludes the central anchor row") {
  Rng rng(7);
  Matrix positions = random_positions(2, 9, rng, 300.0);
  for (Index central = 0; central < 9; central += 4) {
    AnchorSet anchors(positions, central);
    const TrilaterationSystem system = build_system(anchors);
    CHECK(system.x.rows() == 8);
    for (Index row = 0; row < system.x.rows(); ++row) {
      CHECK(system.x.row(row).norm() > 0);
    }
  }
}

TEST_CASE("squared distance matrix basics") {
  const AnchorSet anchors = unit_square_anchors();
  const Matrix f = squared_distance_matrix(anchors, anchors.positions);
  for (Index i = 0; i < 4; ++i) CHECK(f(i, i) == doctest::Approx(0.0));

  Matrix pos(2, 3);
  pos << 0, 5, 0,
         0, 0, 5;
  AnchorSet basis(pos, 0);
  Matrix target(2, 1);
  target << 3, 4;
  CHECK(squared_distance_matrix(basis, target)(0, 0) == doctest::Approx(25.0));
}

TEST_CASE("squared distance matrix matches per-pair recomputation") {
  Rng rng(55);
  Matrix positions = random_positions(2, 6, rng, 100.0);
  AnchorSet anchors(positions);
  Matrix targets = random_positions(2, 11, rng, 500.0);
  const Matrix f = squared_distance_matrix(anchors, targets);
  for (Index j = 0; j < 6; ++j) {
    for (Index i = 0; i < 11; ++i) {
      const double expected = (targets.col(i) - positions.col(j)).squaredNorm();
      CHECK(f(j, i) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  CHECK((f.array() >= 0).all());
  CHECK_THROWS_AS(squared_distance_matrix(anchors, Matrix::Ones(3, 2)),
                  ShapeError);
}

TEST_CASE("anchor set validation") {
  CHECK_THROWS_AS(AnchorSet(Matrix::Ones(4, 6)), DomainError);
  CHECK_THROWS_AS(AnchorSet(Matrix::Ones(2, 2)), InsufficientAnchorsError);
  CHECK_THROWS_AS(AnchorSet(Matrix::Ones(2, 5), 5), DomainError);
}

TEST_CASE("anchor set from designed offsets") {
  Matrix offsets(5, 2);
  offsets << 1, 0,
             0, 1,
             -1, 2,
             2, -1,
             0.5, 0.5;
  const AnchorSet anchors = anchor_set_from_offsets(offsets);
  CHECK(anchors.count() == 6);
  CHECK(anchors.central_index == 5);
  CHECK(anchors.central().norm() == 0.0);
  CHECK((anchors.positions.col(2) - offsets.row(2).transpose()).norm() <
        1e-14);
}
