#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "robloc/scenario.hpp"
#include "robloc/solvers.hpp"

namespace robloc {

enum class ExperimentId { exp1, exp2, baseline_compare, design_study };
enum class ReportFormat { csv, json };

std::string to_string(ExperimentId id);
ExperimentId experiment_id_from_string(const std::string& name);

struct AdditiveNoiseSpec {
  double beta = 0.75;
  double sigma = 0.01;
  double lo = -100.0;
  double hi = 100.0;
};

struct ExperimentConfig {
  ExperimentId id = ExperimentId::exp1;
  std::vector<int> m_values{6, 9, 12, 15};
  int trials = 50;
  std::uint64_t base_seed = 1;
  RegionSpec region;
  CorruptionSpec corruption;   // exp1/exp2; alpha also sizes the evaluation
                               // set of baseline_compare
  AdditiveNoiseSpec additive;  // baseline_compare only
  std::vector<std::string> methods{"ours", "srpca", "naive"};
  bool pipeline = false;  // additionally estimate the identified nodes
  SolverOptions bp_options{1e-8, 5000, 1.0};
  double srpca_tol = 1e-6;
  int srpca_max_iter = 1000;
  std::vector<double> srpca_lambdas{1, 2, 5, 10, 20};
  int design_dim = 2;  // design_study only
};

// exp1: exact normal nodes, severe range [0.2, 0.25], k = 3, alpha = 4.
// exp2: normal range [0, 0.05], severe range [0.15, 0.2].
// baseline_compare: additive mixture noise, estimation metrics only.
ExperimentConfig default_config(ExperimentId id);

struct TrialRow {
  std::string method;
  int m = 0;
  int trial = 0;  // -1 on aggregate rows ("mean" in CSV)
  std::uint64_t seed = 0;
  std::optional<double> ia, mre, msp, msd, madr;
  double converged_fraction = 1.0;
};

struct TrialFailure {
  int m = 0;
  int trial = 0;
  std::string message;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRow> raw;         // sorted by (method, m, trial)
  std::vector<TrialRow> aggregates;  // per (method, m), mean of raw rows
  std::vector<TrialFailure> failures;
};

// Runs the seeded multi-trial sweep. Scenario seed is base_seed + 1000*trial
// and corruption seed is that plus one, so noise never depends on the method
// list. A failing trial is recorded and skipped; the run aborts only when
// more than 20% of trials fail.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Paired per-trial comparison of the designed annihilator against one
// derived from a k-means anchor layout. Row semantics (documented in the
// README): ia = planted-recovery success rate at the layout's own outlier
// budget, mre = coherence, msp = Welch bound, msd = orthogonality defect,
// madr = outlier budget.
ExperimentReport run_design_study(int m, int r, int trials,
                                  std::uint64_t base_seed);

void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::string& path);

nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

}  // namespace robloc
