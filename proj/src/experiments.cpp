#include "robloc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>

#include "robloc/linalg.hpp"
#include "robloc/metrics.hpp"
#include "robloc/rng.hpp"
#include "robloc/robust.hpp"

namespace robloc {

namespace {

const char* kVersion = "robloc 0.1.0";

constexpr double kRecoveryRelTol = 1e-6;
constexpr int kDesignPlants = 5;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

TrialRow make_row(std::string method, int m, int trial, std::uint64_t seed) {
  TrialRow row;
  row.method = std::move(method);
  row.m = m;
  row.trial = trial;
  row.seed = seed;
  return row;
}

std::string csv_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void sort_rows(std::vector<TrialRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const TrialRow& a, const TrialRow& b) {
    return std::tie(a.method, a.m, a.trial) < std::tie(b.method, b.m, b.trial);
  });
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& vals) {
  double sum = 0;
  int count = 0;
  for (const auto& v : vals) {
    if (v) {
      sum += *v;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

std::vector<TrialRow> aggregate_rows(const std::vector<TrialRow>& raw,
                                     std::uint64_t base_seed) {
  std::map<std::pair<std::string, int>, std::vector<const TrialRow*>> groups;
  for (const TrialRow& row : raw) groups[{row.method, row.m}].push_back(&row);
  std::vector<TrialRow> out;
  for (const auto& [key, rows] : groups) {
    TrialRow agg;
    agg.method = key.first;
    agg.m = key.second;
    agg.trial = -1;
    agg.seed = base_seed;
    auto collect = [&](auto member) {
      std::vector<std::optional<double>> vals;
      for (const TrialRow* r : rows) vals.push_back(r->*member);
      return mean_of(vals);
    };
    agg.ia = collect(&TrialRow::ia);
    agg.mre = collect(&TrialRow::mre);
    agg.msp = collect(&TrialRow::msp);
    agg.msd = collect(&TrialRow::msd);
    agg.madr = collect(&TrialRow::madr);
    double cf = 0;
    for (const TrialRow* r : rows) cf += r->converged_fraction;
    agg.converged_fraction = cf / static_cast<double>(rows.size());
    out.push_back(std::move(agg));
  }
  sort_rows(out);
  return out;
}

struct EstimationMetrics {
  double mre = 0, msp = 0, msd = 0, madr = 0;
  double converged_fraction = 1.0;
};

EstimationMetrics estimate_nodes(const Scenario& scenario,
                                 const TrilaterationSystem& system,
                                 const Matrix& r_bar,
                                 const Matrix& assembled,
                                 const CorruptedData& data,
                                 const std::vector<Index>& nodes,
                                 const SolverOptions& opts) {
  const Matrix targets = scenario.all_targets();
  Matrix truth(targets.rows(), static_cast<Index>(nodes.size()));
  Matrix est(targets.rows(), static_cast<Index>(nodes.size()));
  int converged = 0;
  for (std::size_t t = 0; t < nodes.size(); ++t) {
    const Index node = nodes[t];
    RobustEstimate result =
        estimate_position(system, r_bar, assembled.col(node), opts);
    truth.col(static_cast<Index>(t)) = targets.col(node);
    est.col(static_cast<Index>(t)) = result.position;
    if (result.solver_report.converged) ++converged;
  }
  EstimationMetrics out;
  out.mre = mean_relative_error(truth, est);
  out.msp = mean_square_position_error(truth, est);
  out.msd = mean_square_distance_error(data.f_clean.cwiseSqrt(),
                                       data.f_tilde.cwiseSqrt(), nodes);
  out.madr = mean_anchor_distance_ratio(truth, est, scenario.anchors);
  out.converged_fraction =
      static_cast<double>(converged) / static_cast<double>(nodes.size());
  return out;
}

void validate_config(const ExperimentConfig& config) {
  if (config.trials < 1) throw DomainError("run_experiment: trials >= 1");
  if (config.m_values.empty()) {
    throw DomainError("run_experiment: m_values must be non-empty");
  }
  if (config.id == ExperimentId::design_study) {
    throw DomainError("run_experiment: use run_design_study");
  }
  static const std::set<std::string> known{"ours", "srpca", "naive"};
  if (config.id != ExperimentId::baseline_compare) {
    if (config.methods.empty()) {
      throw DomainError("run_experiment: methods must be non-empty");
    }
    for (const std::string& method : config.methods) {
      if (!known.count(method)) {
        throw DomainError("run_experiment: unknown method '" + method + "'");
      }
    }
  }
}

void run_trial(const ExperimentConfig& config, int m, int trial,
               std::vector<TrialRow>& rows) {
  const std::uint64_t scenario_seed =
      config.base_seed + 1000ull * static_cast<std::uint64_t>(trial);
  const std::uint64_t corruption_seed = scenario_seed + 1;

  const Scenario scenario = generate_scenario(config.region, m, scenario_seed);
  CorruptedData data;
  std::vector<Index> eval_nodes;
  if (config.id == ExperimentId::baseline_compare) {
    data = corrupt_additive_mixture(scenario, config.additive.beta,
                                    config.additive.sigma, config.additive.lo,
                                    config.additive.hi, corruption_seed);
    // The additive model perturbs every entry, so the evaluation set is a
    // seeded draw of far nodes rather than a planted one.
    Rng picker(scenario_seed + 2);
    std::vector<int> picked = picker.sample_without_replacement(
        static_cast<int>(scenario.far_count()), config.corruption.alpha);
    for (int p : picked) eval_nodes.push_back(scenario.near_count() + p);
    std::sort(eval_nodes.begin(), eval_nodes.end());
  } else {
    data = corrupt_multiplicative(scenario, config.corruption, corruption_seed);
    eval_nodes = data.truth_corrupted_nodes;
  }

  const TrilaterationSystem system = build_system(scenario.anchors);
  const Matrix r_bar = annihilator(system);
  const Index n = scenario.target_count();
  Matrix assembled(m - 1, n);
  for (Index i = 0; i < n; ++i) {
    assembled.col(i) = assemble_rhs(system, data.f_tilde.col(i));
  }

  const EstimationMetrics est =
      estimate_nodes(scenario, system, r_bar, assembled, data, eval_nodes,
                     config.bp_options);

  if (config.id == ExperimentId::baseline_compare) {
    TrialRow row = make_row("ours", m, trial, scenario_seed);
    row.mre = est.mre;
    row.msp = est.msp;
    row.msd = est.msd;
    row.madr = est.madr;
    row.converged_fraction = est.converged_fraction;
    rows.push_back(std::move(row));
    return;
  }

  const int alpha = config.corruption.alpha;
  const SolverOptions srpca_base = default_srpca_options(data.f_tilde);
  for (const std::string& method : config.methods) {
    IdentificationResult idr;
    double cf = 1.0;
    if (method == "ours") {
      idr = identify_corrupted(scenario.anchors, assembled, alpha);
      cf = est.converged_fraction;
    } else if (method == "naive") {
      idr = naive_identify(data.f_tilde, alpha);
    } else {
      SolverOptions opts{config.srpca_tol, config.srpca_max_iter,
                         srpca_base.rho};
      std::vector<SolveReport> reports;
      idr = srpca_identify(data.f_tilde, alpha, config.srpca_lambdas, opts,
                           &reports);
      int ok = 0;
      for (const SolveReport& rep : reports) ok += rep.converged ? 1 : 0;
      cf = reports.empty()
               ? 0.0
               : static_cast<double>(ok) / static_cast<double>(reports.size());
    }
    TrialRow row = make_row(method, m, trial, scenario_seed);
    row.ia = identification_accuracy(idr.indices, data.truth_corrupted_nodes);
    if (method == "ours") {
      row.mre = est.mre;
      row.msp = est.msp;
      row.msd = est.msd;
      row.madr = est.madr;
    }
    row.converged_fraction = cf;
    rows.push_back(std::move(row));

    if (config.pipeline) {
      const EstimationMetrics chained =
          estimate_nodes(scenario, system, r_bar, assembled, data, idr.indices,
                         config.bp_options);
      TrialRow chained_row = make_row(method + "_pipeline", m, trial, scenario_seed);
      chained_row.ia = row.ia;
      chained_row.mre = chained.mre;
      chained_row.msp = chained.msp;
      chained_row.msd = chained.msd;
      chained_row.madr = chained.madr;
      chained_row.converged_fraction = chained.converged_fraction;
      rows.push_back(std::move(chained_row));
    }
  }
}

}  // namespace

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::exp1: return "exp1";
    case ExperimentId::exp2: return "exp2";
    case ExperimentId::baseline_compare: return "compare";
    case ExperimentId::design_study: return "design";
  }
  return "unknown";
}

ExperimentId experiment_id_from_string(const std::string& name) {
  if (name == "exp1") return ExperimentId::exp1;
  if (name == "exp2") return ExperimentId::exp2;
  if (name == "compare") return ExperimentId::baseline_compare;
  if (name == "design") return ExperimentId::design_study;
  throw DomainError("unknown experiment id '" + name + "'");
}

ExperimentConfig default_config(ExperimentId id) {
  ExperimentConfig config;
  config.id = id;
  switch (id) {
    case ExperimentId::exp1:
      config.corruption = {4, 3, 0.0, 0.0, 0.2, 0.25, true};
      break;
    case ExperimentId::exp2:
      config.corruption = {4, 3, 0.0, 0.05, 0.15, 0.2, true};
      break;
    case ExperimentId::baseline_compare:
      config.corruption = {4, 3, 0.0, 0.0, 0.0, 0.0, true};
      config.methods = {"ours"};
      break;
    case ExperimentId::design_study:
      config.methods = {"designed", "kmeans"};
      config.m_values = {15};
      config.trials = 100;
      break;
  }
  return config;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  ExperimentReport report;
  report.config = config;
  for (int m : config.m_values) {
    for (int trial = 0; trial < config.trials; ++trial) {
      try {
        run_trial(config, m, trial, report.raw);
      } catch (const std::exception& e) {
        report.failures.push_back({m, trial, e.what()});
      }
    }
  }
  const std::size_t total = config.m_values.size() *
                            static_cast<std::size_t>(config.trials);
  if (report.failures.size() * 5 > total) {
    throw Error("run_experiment: " + std::to_string(report.failures.size()) +
                " of " + std::to_string(total) + " trials failed");
  }
  sort_rows(report.raw);
  report.aggregates = aggregate_rows(report.raw, config.base_seed);
  return report;
}

namespace {

// Planted-recovery probe shared by both design-study arms: exact far
// targets, k severely corrupted anchor distances each, success when the
// position comes back to relative tolerance.
double recovery_success_rate(const AnchorSet& anchors, int k, Rng& rng) {
  const TrilaterationSystem system = build_system(anchors);
  const Matrix r_bar = annihilator(system);
  int successes = 0;
  for (int p = 0; p < kDesignPlants; ++p) {
    Vector target(2);
    target(0) = rng.uniform(1200.0, 1400.0);
    target(1) = rng.uniform(-600.0, 400.0);
    Matrix single(2, 1);
    single.col(0) = target;
    Vector d2 = squared_distance_matrix(anchors, single).col(0);
    for (int idx : rng.sample_without_replacement(
             static_cast<int>(anchors.count()), k)) {
      d2(idx) *= 1.0 + rng.uniform(0.2, 0.25);
    }
    const Vector m_tilde = assemble_rhs(system, d2);
    const RobustEstimate est = estimate_position(system, r_bar, m_tilde);
    if ((est.position - target).norm() <=
        kRecoveryRelTol * (1.0 + target.norm())) {
      ++successes;
    }
  }
  return static_cast<double>(successes) / kDesignPlants;
}

}  // namespace

ExperimentReport run_design_study(int m, int r, int trials,
                                  std::uint64_t base_seed) {
  if (trials < 1) throw DomainError("run_design_study: trials >= 1");
  if (m <= r + 2) {
    throw InsufficientAnchorsError("run_design_study: need m > r + 2");
  }
  ExperimentReport report;
  report.config = default_config(ExperimentId::design_study);
  report.config.m_values = {m};
  report.config.trials = trials;
  report.config.base_seed = base_seed;
  report.config.design_dim = r;
  const double welch = welch_bound(m - r - 2, m - 1);

  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t seed =
        base_seed + 1000ull * static_cast<std::uint64_t>(trial);
    try {
      const LowCoherenceDesign design = design_low_coherence(m, r, seed);
      const AnchorSet designed = anchor_set_from_offsets(design.anchors_star);
      const double mu_d = coherence(design.r_bar);
      const double defect =
          (design.r_bar.transpose() * design.r_bar -
           Matrix::Identity(m - 1, m - 1))
              .squaredNorm();
      const int k_d = max_recoverable_outliers(mu_d);
      TrialRow row_d = make_row("designed", m, trial, seed);
      if (k_d >= 1) {
        Rng rng(seed + 1);
        row_d.ia = recovery_success_rate(designed, k_d, rng);
      }
      row_d.mre = mu_d;
      row_d.msp = welch;
      row_d.msd = defect;
      row_d.madr = static_cast<double>(k_d);
      report.raw.push_back(std::move(row_d));

      const AnchorSet layout = kmeans_anchor_layout(RegionSpec{}, m, seed + 2);
      const OutlierBudget budget = outlier_budget(layout);
      const Matrix r_bar_k = annihilator(layout);
      const double defect_k =
          (r_bar_k.transpose() * r_bar_k - Matrix::Identity(m - 1, m - 1))
              .squaredNorm();
      TrialRow row_k = make_row("kmeans", m, trial, seed);
      if (budget.k_max >= 1) {
        Rng rng(seed + 3);
        row_k.ia = recovery_success_rate(layout, budget.k_max, rng);
      }
      row_k.mre = budget.coherence;
      row_k.msp = welch;
      row_k.msd = defect_k;
      row_k.madr = static_cast<double>(budget.k_max);
      report.raw.push_back(std::move(row_k));
    } catch (const std::exception& e) {
      report.failures.push_back({m, trial, e.what()});
    }
  }
  if (report.failures.size() * 5 > static_cast<std::size_t>(trials)) {
    throw Error("run_design_study: too many failed trials");
  }
  sort_rows(report.raw);
  report.aggregates = aggregate_rows(report.raw, base_seed);
  return report;
}

namespace {

nlohmann::json row_to_json(const TrialRow& row) {
  nlohmann::json j{{"method", row.method},
                   {"m", row.m},
                   {"seed", row.seed},
                   {"converged_fraction", row.converged_fraction}};
  if (row.trial < 0) {
    j["trial"] = "mean";
  } else {
    j["trial"] = row.trial;
  }
  auto put = [&](const char* key, const std::optional<double>& v) {
    j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  put("ia", row.ia);
  put("mre", row.mre);
  put("msp", row.msp);
  put("msd", row.msd);
  put("madr", row.madr);
  return j;
}

TrialRow row_from_json(const nlohmann::json& j) {
  TrialRow row;
  row.method = j.at("method").get<std::string>();
  row.m = j.at("m").get<int>();
  row.trial = j.at("trial").is_string() ? -1 : j.at("trial").get<int>();
  row.seed = j.at("seed").get<std::uint64_t>();
  row.converged_fraction = j.at("converged_fraction").get<double>();
  auto get = [&](const char* key) -> std::optional<double> {
    if (j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  row.ia = get("ia");
  row.mre = get("mre");
  row.msp = get("msp");
  row.msd = get("msd");
  row.madr = get("madr");
  return row;
}

void emit_csv(const ExperimentReport& report, std::ostream& out) {
  out << "experiment_id,method,m,trial,ia,mre,msp,msd,madr,"
         "converged_fraction,seed\n";
  const std::string id = to_string(report.config.id);
  auto write_row = [&](const TrialRow& row) {
    out << id << ',' << row.method << ',' << row.m << ','
        << (row.trial < 0 ? std::string("mean") : std::to_string(row.trial))
        << ',' << csv_cell(row.ia) << ',' << csv_cell(row.mre) << ','
        << csv_cell(row.msp) << ',' << csv_cell(row.msd) << ','
        << csv_cell(row.madr) << ',' << format_double(row.converged_fraction)
        << ',' << row.seed << '\n';
  };
  for (const TrialRow& row : report.raw) write_row(row);
  for (const TrialRow& row : report.aggregates) write_row(row);
}

}  // namespace

nlohmann::json config_to_json(const ExperimentConfig& config) {
  return {{"experiment_id", to_string(config.id)},
          {"m_values", config.m_values},
          {"trials", config.trials},
          {"base_seed", config.base_seed},
          {"region", region_to_json(config.region)},
          {"corruption", corruption_to_json(config.corruption)},
          {"additive",
           {{"beta", config.additive.beta},
            {"sigma", config.additive.sigma},
            {"lo", config.additive.lo},
            {"hi", config.additive.hi}}},
          {"methods", config.methods},
          {"pipeline", config.pipeline},
          {"bp_options",
           {{"tol", config.bp_options.tol},
            {"max_iter", config.bp_options.max_iter},
            {"rho", config.bp_options.rho}}},
          {"srpca_tol", config.srpca_tol},
          {"srpca_max_iter", config.srpca_max_iter},
          {"srpca_lambdas", config.srpca_lambdas},
          {"design_dim", config.design_dim}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config =
      default_config(experiment_id_from_string(
          j.at("experiment_id").get<std::string>()));
  if (j.contains("m_values")) {
    config.m_values = j.at("m_values").get<std::vector<int>>();
  }
  if (j.contains("trials")) config.trials = j.at("trials").get<int>();
  if (j.contains("base_seed")) {
    config.base_seed = j.at("base_seed").get<std::uint64_t>();
  }
  if (j.contains("region")) config.region = region_from_json(j.at("region"));
  if (j.contains("corruption")) {
    config.corruption = corruption_from_json(j.at("corruption"));
  }
  if (j.contains("additive")) {
    const auto& a = j.at("additive");
    if (a.contains("beta")) config.additive.beta = a.at("beta").get<double>();
    if (a.contains("sigma")) {
      config.additive.sigma = a.at("sigma").get<double>();
    }
    if (a.contains("lo")) config.additive.lo = a.at("lo").get<double>();
    if (a.contains("hi")) config.additive.hi = a.at("hi").get<double>();
  }
  if (j.contains("methods")) {
    config.methods = j.at("methods").get<std::vector<std::string>>();
  }
  if (j.contains("pipeline")) {
    config.pipeline = j.at("pipeline").get<bool>();
  }
  if (j.contains("bp_options")) {
    const auto& b = j.at("bp_options");
    if (b.contains("tol")) config.bp_options.tol = b.at("tol").get<double>();
    if (b.contains("max_iter")) {
      config.bp_options.max_iter = b.at("max_iter").get<int>();
    }
    if (b.contains("rho")) config.bp_options.rho = b.at("rho").get<double>();
  }
  if (j.contains("srpca_tol")) {
    config.srpca_tol = j.at("srpca_tol").get<double>();
  }
  if (j.contains("srpca_max_iter")) {
    config.srpca_max_iter = j.at("srpca_max_iter").get<int>();
  }
  if (j.contains("srpca_lambdas")) {
    config.srpca_lambdas = j.at("srpca_lambdas").get<std::vector<double>>();
  }
  if (j.contains("design_dim")) {
    config.design_dim = j.at("design_dim").get<int>();
  }
  return config;
}

nlohmann::json report_to_json(const ExperimentReport& report) {
  nlohmann::json raw = nlohmann::json::array();
  for (const TrialRow& row : report.raw) raw.push_back(row_to_json(row));
  nlohmann::json aggregates = nlohmann::json::array();
  for (const TrialRow& row : report.aggregates) {
    aggregates.push_back(row_to_json(row));
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const TrialFailure& f : report.failures) {
    failures.push_back({{"m", f.m}, {"trial", f.trial}, {"message", f.message}});
  }
  return {{"version", kVersion},
          {"experiment_id", to_string(report.config.id)},
          {"config", config_to_json(report.config)},
          {"raw", std::move(raw)},
          {"aggregates", std::move(aggregates)},
          {"failures", std::move(failures)}};
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport report;
  report.config = config_from_json(j.at("config"));
  for (const auto& row : j.at("raw")) report.raw.push_back(row_from_json(row));
  for (const auto& row : j.at("aggregates")) {
    report.aggregates.push_back(row_from_json(row));
  }
  for (const auto& f : j.at("failures")) {
    report.failures.push_back({f.at("m").get<int>(), f.at("trial").get<int>(),
                               f.at("message").get<std::string>()});
  }
  return report;
}

void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_report: cannot open '" + path + "'");
  if (format == ReportFormat::csv) {
    emit_csv(report, out);
  } else {
    out << report_to_json(report).dump(2) << '\n';
  }
  out.flush();
  if (!out) throw IoError("emit_report: write failed for '" + path + "'");
}

}  // namespace robloc
