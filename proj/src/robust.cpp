#include "robloc/robust.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <string>

#include "robloc/linalg.hpp"
#include "robloc/rng.hpp"

namespace robloc {

namespace {

// Designed anchor coordinates are stretched to the default deployment
// region.
constexpr double kRegionHalfWidth = 400.0;

std::vector<Index> top_indices(const Vector& norms, int alpha) {
  std::vector<Index> order(static_cast<std::size_t>(norms.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return norms(a) != norms(b) ? norms(a) > norms(b) : a < b;
  });
  order.resize(static_cast<std::size_t>(alpha));
  return order;
}

void check_alpha(int alpha, Index n, const char* who) {
  if (alpha < 1 || alpha > n) {
    throw DomainError(std::string(who) + ": alpha must be in [1, " +
                      std::to_string(n) + "]");
  }
}

}  // namespace

Matrix annihilator(const TrilaterationSystem& system) {
  const Index m = system.anchor_count();
  const Index r = system.dim();
  if (m <= r + 2) {
    throw InsufficientAnchorsError("annihilator: need more than " +
                                   std::to_string(r + 2) + " anchors, got " +
                                   std::to_string(m));
  }
  return nullspace_rows(system.augmented());
}

Matrix annihilator(const AnchorSet& anchors) {
  return annihilator(build_system(anchors));
}

RobustEstimate estimate_position(const TrilaterationSystem& system,
                                 const Matrix& r_bar, const Vector& m_tilde,
                                 const SolverOptions& opts) {
  if (m_tilde.size() != system.x.rows()) {
    throw ShapeError("estimate_position: measurement length " +
                     std::to_string(m_tilde.size()) + " does not match " +
                     std::to_string(system.x.rows()) + " system rows");
  }
  BasisPursuitResult bp = basis_pursuit(r_bar, r_bar * m_tilde, opts);
  const Vector solution = least_squares(system.augmented(), m_tilde - bp.s);
  const Index r = system.dim();
  return {solution.head(r) + system.central, solution(r), std::move(bp.s),
          bp.report};
}

RobustEstimate estimate_position(const AnchorSet& anchors,
                                 const Vector& m_tilde,
                                 const SolverOptions& opts) {
  const TrilaterationSystem system = build_system(anchors);
  return estimate_position(system, annihilator(system), m_tilde, opts);
}

int max_recoverable_outliers(double mu) {
  if (mu <= 0.0) throw DomainError("max_recoverable_outliers: mu must be > 0");
  const double bound = 0.5 * (1.0 + 1.0 / mu);
  // Largest integer strictly below the bound; the tiny relative shave keeps
  // a bound that lands exactly on an integer from rounding up.
  const int k = static_cast<int>(std::ceil(bound * (1.0 - 1e-12))) - 1;
  return std::max(k, 0);
}

OutlierBudget outlier_budget(const AnchorSet& anchors) {
  const double mu = coherence(annihilator(anchors));
  return {max_recoverable_outliers(mu), mu};
}

IdentificationResult identify_corrupted(const AnchorSet& anchors,
                                        const Matrix& m_tilde_columns,
                                        int alpha) {
  check_alpha(alpha, m_tilde_columns.cols(), "identify_corrupted");
  const Matrix r_bar = annihilator(anchors);
  const Matrix s = group_min_norm(r_bar, m_tilde_columns);
  const Vector norms = s.colwise().norm().transpose();
  return {top_indices(norms, alpha), norms};
}

IdentificationResult naive_identify(const Matrix& f_tilde, int alpha) {
  check_alpha(alpha, f_tilde.cols(), "naive_identify");
  const Vector norms = f_tilde.colwise().norm().transpose();
  return {top_indices(norms, alpha), norms};
}

IdentificationResult srpca_identify(const Matrix& f_tilde, int alpha,
                                    const std::vector<double>& lambdas,
                                    const SolverOptions& opts,
                                    std::vector<SolveReport>* reports) {
  check_alpha(alpha, f_tilde.cols(), "srpca_identify");
  if (lambdas.empty()) {
    throw DomainError("srpca_identify: lambda list must be non-empty");
  }
  const Index n = f_tilde.cols();
  std::vector<int> votes(static_cast<std::size_t>(n), 0);
  Vector norm_sum = Vector::Zero(n);
  int successes = 0;
  std::string last_failure;
  for (const double lambda : lambdas) {
    try {
      SrpcaResult result = srpca(f_tilde, lambda, opts);
      if (reports) reports->push_back(result.report);
      const Vector norms = result.s.colwise().norm().transpose();
      for (Index idx : top_indices(norms, alpha)) {
        ++votes[static_cast<std::size_t>(idx)];
      }
      norm_sum += norms;
      ++successes;
    } catch (const SolverFailure& e) {
      std::cerr << "srpca_identify: lambda " << lambda
                << " skipped: " << e.what() << "\n";
      last_failure = e.what();
    }
  }
  if (successes == 0) {
    throw SolverFailure("srpca_identify: every lambda failed (" +
                        last_failure + ")");
  }
  const Vector mean_norms = norm_sum / static_cast<double>(successes);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const int va = votes[static_cast<std::size_t>(a)];
    const int vb = votes[static_cast<std::size_t>(b)];
    if (va != vb) return va > vb;
    if (mean_norms(a) != mean_norms(b)) return mean_norms(a) > mean_norms(b);
    return a < b;
  });
  order.resize(static_cast<std::size_t>(alpha));
  return {std::move(order), mean_norms};
}

LowCoherenceDesign design_low_coherence(int m, int r, std::uint64_t seed) {
  if (r < 1) throw DomainError("design_low_coherence: r must be at least 1");
  if (m <= r + 2) {
    throw InsufficientAnchorsError("design_low_coherence: need m > r + 2");
  }
  const Index rows = m - 1;
  const Index width = m - r - 2;

  // Orthonormal basis of the hyperplane orthogonal to the all-ones vector.
  const Matrix v_tilde =
      nullspace_rows(Matrix::Ones(rows, 1)).transpose();  // rows x (m-2)

  Rng rng(seed);
  Matrix a(width, width);
  for (Index j = 0; j < width; ++j) {
    for (Index i = 0; i < width; ++i) a(i, j) = rng.normal(0.0, 1.0);
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix rfac = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < width; ++j) {
    if (rfac(j, j) < 0) q.col(j) = -q.col(j);
  }

  const Matrix r_bar = q * v_tilde.leftCols(width).transpose();

  // The remaining r basis vectors span null(r_bar) within the all-ones
  // complement; they become the anchor offsets.
  Matrix x_star = v_tilde.middleCols(width, r);
  for (Index j = 0; j < r; ++j) {
    x_star.col(j) *= kRegionHalfWidth / x_star.col(j).cwiseAbs().maxCoeff();
  }
  return {r_bar, std::move(x_star)};
}

}  // namespace robloc
