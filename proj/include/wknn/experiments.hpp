#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wknn/core.hpp"
#include "wknn/knn.hpp"
#include "wknn/metrics.hpp"
#include "wknn/optimize.hpp"
#include "wknn/population.hpp"

namespace wknn {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kCsvSchemaVersion = "v1";

/// Self-describing experiment output: config echo, aggregates, raw per-trial
/// records, and plot-ready CSV tables.
struct ExperimentReport {
  std::string experiment;
  nlohmann::json config;
  nlohmann::json results;
  nlohmann::json trials = nlohmann::json::array();
  std::map<std::string, std::string> tables;  // file name -> CSV text
  double elapsed_seconds = 0.0;

  nlohmann::json to_json() const;
  /// Writes report.json plus every table into `dir`.
  void write(const std::filesystem::path& dir) const;
};

/// Name, {"builtin": name}, inline spec object, or a path to a JSON file.
SyntheticDistribution resolve_distribution(const nlohmann::json& ref);

// ---------------------------------------------------------------------------
// Confusion-matrix error table

struct Table1Condition {
  std::size_t n = 0;
  int k = 0;
};

struct Table1Config {
  nlohmann::json distribution = "three-class";
  std::size_t trials = 1000;
  std::vector<Table1Condition> conditions = {{50, 18}, {100, 23}, {1000, 49}};
  std::vector<double> weight = {0.5, 0.3, 0.2};
  std::size_t reference_grid = 10000;
  bool fresh_sample = false;  // evaluate on an independent sample instead of the training one
  ClassLabel target_class = 1;
  std::uint64_t seed = 20240101;
  unsigned threads = 0;

  static Table1Config from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct Table1Row {
  Table1Condition condition;
  ClassConfusion mean;    // mean |empirical - population| for the target class
  ClassConfusion stderr_; // standard error of each mean
  std::vector<ClassConfusion> per_trial;
};

struct Table1Result {
  ConfusionMatrix population;
  std::vector<Table1Row> rows;
};

Table1Result run_table1_detailed(const Table1Config& config);
ExperimentReport run_table1(const Table1Config& config);

// ---------------------------------------------------------------------------
// Greedy / grid / unweighted sweeps on a synthetic distribution

struct GreedySweepConfig {
  nlohmann::json distribution = "three-class";
  bool step_trace = true;
  bool sample_size = true;

  // Step-trace mode.
  std::size_t trace_n = 1000;
  std::vector<double> trace_step_sizes = {0.01, 0.05};
  int trace_steps = 20;
  std::size_t trace_trials = 1;

  // Sample-size mode.
  std::vector<std::size_t> n_values = {100, 300, 1000, 3000, 10000};
  std::size_t trials = 50;
  double greedy_step = 0.01;
  int greedy_steps = 20;
  double grid_spacing = 0.01;
  double grid_min_weight = 0.0;

  std::vector<double> initial = {0.3, 0.3, 0.4};
  GreedyUpdate update = GreedyUpdate::chained;
  KRule k_rule = KRule::cube_root;
  std::optional<int> k;  // overrides k_rule
  std::size_t reference_grid = 10000;
  std::uint64_t seed = 20240202;
  unsigned threads = 0;

  static GreedySweepConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct MethodSummary {
  std::string method;  // greedy | grid | unweighted
  double empirical_f1 = 0.0;   // mean over trials
  double population_f1 = 0.0;  // mean over trials
  double gap = 0.0;            // |mean empirical - mean population|
  double mean_abs_gap = 0.0;   // mean over trials of |empirical - population|
  double empirical_stderr = 0.0;
  double population_stderr = 0.0;
};

struct SampleSizeRow {
  std::size_t n = 0;
  int k = 0;
  std::vector<MethodSummary> methods;
};

struct StepTraceSeries {
  double step_size = 0.0;
  std::vector<double> empirical_f1;   // index = step, mean over trace trials
  std::vector<double> population_f1;
  std::vector<int> accepted_moves;    // summed over trace trials
};

struct GreedySweepResult {
  std::vector<StepTraceSeries> traces;
  std::vector<SampleSizeRow> sample_sizes;
};

GreedySweepResult run_greedy_sweep_detailed(const GreedySweepConfig& config);
ExperimentReport run_greedy_sweep(const GreedySweepConfig& config);

// ---------------------------------------------------------------------------
// Covertype protocol

struct CovertypeConfig {
  std::filesystem::path path;
  int k = 160;
  int greedy_steps = 25;
  double greedy_step = 0.02;
  GreedyUpdate update = GreedyUpdate::chained;
  double grid_spacing = 0.083;
  double grid_min_weight = 0.0;
  bool standardize = true;  // z-score the 10 continuous columns
  Metric metric = Metric::euclidean;
  std::size_t expected_rows = 581012;
  unsigned threads = 0;

  static CovertypeConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct CovertypeMethod {
  std::string method;
  WeightVector weight;
  double train_f1 = 0.0;
  double dev_f1 = 0.0;
  double test_f1 = 0.0;
};

struct CovertypeResult {
  std::vector<CovertypeMethod> methods;  // greedy, grid, unweighted
};

CovertypeResult run_covertype_detailed(const CovertypeConfig& config);
ExperimentReport run_covertype(const CovertypeConfig& config);

// ---------------------------------------------------------------------------
// Error-band illustration and marginals

struct BoundIllustrationConfig {
  nlohmann::json distribution = "three-class";
  std::vector<double> weight = {0.5, 0.3, 0.2};
  std::vector<double> lower = {0.52, 0.29, 0.19};
  std::vector<double> upper = {0.48, 0.31, 0.21};
  ClassLabel target_class = 1;
  double epsilon = 0.1;
  std::size_t grid = 1000;
  std::size_t marginal_grid = 10000;
  BandRadius radius = BandRadius::unit;
  // Budget for the confusion-matrix bound evaluated from the masses.
  double delta = 0.1;
  std::size_t n = 1000;
  double cover_spacing = 0.01;
  double cover_min_weight = 0.1;

  static BoundIllustrationConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct BoundIllustrationResult {
  ProbabilityVector marginals;
  bool covered = false;
  ErrorMasses masses;
  ErrorMasses theorem_radius_masses;
  ErrorMasses unit_radius_masses;
  ErrorBand band;
  std::size_t cover_size = 0;
};

BoundIllustrationResult run_bound_illustration_detailed(const BoundIllustrationConfig& config);
ExperimentReport run_bound_illustration(const BoundIllustrationConfig& config);

// ---------------------------------------------------------------------------
// Shared helpers

/// A sampled training set with its regression estimate on the training rows
/// and on a quadrature grid, ready for repeated weight evaluation.
class SyntheticFit {
 public:
  SyntheticFit(const Dataset& train, int k, const GridTable& truth, const EvaluationGrid& grid);

  double empirical_f1(const WeightVector& q) const;
  double population_f1(const WeightVector& q) const;
  const RegressionTable& train_estimate() const { return train_eta_; }

 private:
  const GridTable* truth_;
  std::vector<ClassLabel> labels_;
  RegressionTable train_eta_;
  RegressionTable grid_eta_;
};

}  // namespace wknn
