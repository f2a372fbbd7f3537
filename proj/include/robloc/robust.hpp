#pragma once

#include <cstdint>
#include <vector>

#include "robloc/geometry.hpp"
#include "robloc/solvers.hpp"

namespace robloc {

struct RobustEstimate {
  Vector position;                  // length r, original coordinates
  double central_corruption = 0.0;  // magnitude of the constant term
  Vector outlier;                   // length m-1
  SolveReport solver_report;
};

struct IdentificationResult {
  // Node indices ordered by descending column norm, ties by lower index.
  std::vector<Index> indices;
  Vector column_norms;  // length n, diagnostics
};

struct OutlierBudget {
  int k_max = 0;        // largest per-node outlier count with guaranteed recovery
  double coherence = 0.0;
};

// Orthonormal rows annihilating the augmented system: result * [x 1] = 0,
// shape (m-r-2) x (m-1). Requires m > r + 2.
Matrix annihilator(const AnchorSet& anchors);
Matrix annihilator(const TrilaterationSystem& system);

// Sparse-outlier position estimate: project the measurements onto the left
// null space of [x 1], recover the outlier by l1 minimization, subtract it,
// and solve the augmented system for position and central-corruption
// magnitude.
RobustEstimate estimate_position(const AnchorSet& anchors,
                                 const Vector& m_tilde,
                                 const SolverOptions& opts = {});
RobustEstimate estimate_position(const TrilaterationSystem& system,
                                 const Matrix& r_bar, const Vector& m_tilde,
                                 const SolverOptions& opts = {});

// Largest k with k < (1 + 1/mu) / 2.
int max_recoverable_outliers(double mu);

OutlierBudget outlier_budget(const AnchorSet& anchors);

// Group-sparse identification: the alpha columns of m_tilde_columns
// ((m-1) x n, one assembled measurement column per node) with the largest
// projected column norms.
IdentificationResult identify_corrupted(const AnchorSet& anchors,
                                        const Matrix& m_tilde_columns,
                                        int alpha);

// Baseline: the alpha largest column norms of the raw squared-distance
// matrix itself.
IdentificationResult naive_identify(const Matrix& f_tilde, int alpha);

// Baseline: low-rank plus column-sparse decomposition for each lambda, then
// a vote across the per-lambda top-alpha sets. Ties are broken by larger
// mean column norm, then lower index. A lambda whose solve fails is skipped
// with a warning; the call fails only when every lambda fails.
IdentificationResult srpca_identify(const Matrix& f_tilde, int alpha,
                                    const std::vector<double>& lambdas,
                                    const SolverOptions& opts,
                                    std::vector<SolveReport>* reports = nullptr);

struct LowCoherenceDesign {
  Matrix r_bar;         // (m-r-2) x (m-1)
  Matrix anchors_star;  // (m-1) x r anchor offsets, central anchor at origin
};

// Builds an annihilator with minimal orthogonality defect among matrices
// with orthonormal rows that also annihilate the all-ones vector, then reads
// an anchor configuration off its null space. anchors_star columns are
// scaled so coordinates span [-400, 400].
LowCoherenceDesign design_low_coherence(int m, int r, std::uint64_t seed);

}  // namespace robloc
