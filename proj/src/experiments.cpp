#include "wknn/experiments.hpp"

#include <chrono>
#include <cmath>
#include <array>
#include <fstream>
#include <numeric>
#include <sstream>

#include "wknn/bounds.hpp"
#include "wknn/data_io.hpp"
#include "wknn/parallel.hpp"
#include "wknn/random.hpp"
#include "wknn/report_json.hpp"

namespace wknn {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStderr summarize(const std::vector<double>& values) {
  MeanStderr out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - out.mean) * (v - out.mean);
    out.stderr_ = std::sqrt(sq / static_cast<double>(values.size() - 1) /
                            static_cast<double>(values.size()));
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

GreedyUpdate parse_update(const std::string& s) {
  if (s == "chained") return GreedyUpdate::chained;
  if (s == "step-start" || s == "step_start") return GreedyUpdate::step_start;
  throw ConfigError("unknown greedy update '" + s + "'");
}

std::string update_name(GreedyUpdate u) {
  return u == GreedyUpdate::chained ? "chained" : "step-start";
}

std::string k_rule_name(KRule r) { return r == KRule::cube_root ? "cube-root" : "rate-optimal"; }

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

json ExperimentReport::to_json() const {
  return json{{"experiment", experiment},     {"tool_version", kToolVersion},
              {"csv_schema", kCsvSchemaVersion}, {"config", config},
              {"results", results},           {"trials", trials},
              {"elapsed_seconds", elapsed_seconds}};
}

void ExperimentReport::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw FormatError("cannot write report to '" + dir.string() + "'");
    out << to_json().dump(2) << '\n';
  }
  for (const auto& [name, text] : tables) {
    std::ofstream out(dir / name);
    if (!out) throw FormatError("cannot write '" + (dir / name).string() + "'");
    out << text;
  }
}

SyntheticDistribution resolve_distribution(const json& ref) {
  if (ref.is_string()) {
    const auto s = ref.get<std::string>();
    if (std::filesystem::exists(s) && std::filesystem::is_regular_file(s)) {
      std::ifstream in(s);
      json spec;
      try {
        in >> spec;
      } catch (const json::exception& e) {
        throw ConfigError("distribution file '" + s + "': " + e.what());
      }
      return SyntheticDistribution::from_json(spec);
    }
    return SyntheticDistribution::by_name(s);
  }
  return SyntheticDistribution::from_json(ref);
}

// ---------------------------------------------------------------------------

SyntheticFit::SyntheticFit(const Dataset& train, int k, const GridTable& truth,
                           const EvaluationGrid& grid)
    : truth_(&truth), labels_(train.labels()) {
  const KnnModel model(train, k);
  train_eta_ = knn_regress_batch(model, train.features(), 1);
  grid_eta_ = knn_regress_batch(model, grid.as_features(), 1);
}

double SyntheticFit::empirical_f1(const WeightVector& q) const {
  return macro_f1(empirical_confusion(train_eta_, labels_, q));
}

double SyntheticFit::population_f1(const WeightVector& q) const {
  return macro_f1(population_confusion(*truth_, q, grid_eta_));
}

// ---------------------------------------------------------------------------
// Table 1

Table1Config Table1Config::from_json(const json& j) {
  Table1Config c;
  if (j.contains("distribution")) c.distribution = j.at("distribution");
  c.trials = get_or(j, "trials", c.trials);
  if (j.contains("conditions")) {
    c.conditions.clear();
    for (const auto& e : j.at("conditions")) {
      c.conditions.push_back({e.at("n").get<std::size_t>(), e.at("k").get<int>()});
    }
  }
  c.weight = get_or(j, "weight", c.weight);
  c.reference_grid = get_or(j, "reference_grid", c.reference_grid);
  c.fresh_sample = get_or(j, "fresh_sample", c.fresh_sample);
  c.target_class = get_or(j, "target_class", c.target_class);
  c.seed = get_or(j, "seed", c.seed);
  c.threads = get_or(j, "threads", c.threads);
  require(c.trials >= 1, "table1: trials must be at least 1");
  require(!c.conditions.empty(), "table1: no conditions");
  return c;
}

json Table1Config::to_json() const {
  json conds = json::array();
  for (const auto& c : conditions) conds.push_back({{"n", c.n}, {"k", c.k}});
  return json{{"distribution", distribution}, {"trials", trials},
              {"conditions", conds},          {"weight", weight},
              {"reference_grid", reference_grid}, {"fresh_sample", fresh_sample},
              {"target_class", target_class}, {"seed", seed}};
}

Table1Result run_table1_detailed(const Table1Config& config) {
  const auto dist = resolve_distribution(config.distribution);
  const WeightVector q(config.weight);
  if (q.size() != static_cast<std::size_t>(dist.num_classes())) {
    throw ConfigError("table1: weight has " + std::to_string(q.size()) + " entries for " +
                      std::to_string(dist.num_classes()) + " classes");
  }
  if (config.target_class < 1 || config.target_class > dist.num_classes()) {
    throw ConfigError("table1: target class out of range");
  }
  Table1Result result{population_confusion(dist, q, EvaluationGrid(config.reference_grid)), {}};
  const auto& truth = result.population.at_class(config.target_class);

  for (std::size_t ci = 0; ci < config.conditions.size(); ++ci) {
    const auto cond = config.conditions[ci];
    if (cond.k < 1 || static_cast<std::size_t>(cond.k) > cond.n) {
      throw ConfigError("table1: k must lie in 1..n");
    }
    Table1Row row{cond, {}, {}, std::vector<ClassConfusion>(config.trials)};
    parallel_for(config.trials, config.threads, [&](std::size_t t) {
      const auto train = sample(dist, cond.n, derive_seed(config.seed, ci, t));
      const KnnModel model(train, cond.k);
      ConfusionMatrix emp = [&] {
        if (!config.fresh_sample) {
          return empirical_confusion(knn_regress_batch(model, train.features(), 1),
                                     train.labels(), q);
        }
        const auto eval = sample(dist, cond.n, derive_seed(~config.seed, ci, t));
        return empirical_confusion(knn_regress_batch(model, eval.features(), 1), eval.labels(), q);
      }();
      const auto& e = emp.at_class(config.target_class);
      row.per_trial[t] = {std::abs(e.tn - truth.tn), std::abs(e.fn - truth.fn),
                          std::abs(e.fp - truth.fp), std::abs(e.tp - truth.tp)};
    });
    auto column = [&](auto member) {
      std::vector<double> v;
      v.reserve(row.per_trial.size());
      for (const auto& r : row.per_trial) v.push_back(r.*member);
      return summarize(v);
    };
    const auto tn = column(&ClassConfusion::tn);
    const auto fn = column(&ClassConfusion::fn);
    const auto fp = column(&ClassConfusion::fp);
    const auto tp = column(&ClassConfusion::tp);
    row.mean = {tn.mean, fn.mean, fp.mean, tp.mean};
    row.stderr_ = {tn.stderr_, fn.stderr_, fp.stderr_, tp.stderr_};
    result.rows.push_back(std::move(row));
  }
  return result;
}

ExperimentReport run_table1(const Table1Config& config) {
  const auto start = Clock::now();
  const auto result = run_table1_detailed(config);
  ExperimentReport report;
  report.experiment = "table1";
  report.config = config.to_json();
  json rows = json::array();
  std::ostringstream csv;
  csv << "n,k,abs_tn,abs_tp,abs_fn,abs_fp,se_tn,se_tp,se_fn,se_fp\n";
  for (const auto& r : result.rows) {
    rows.push_back({{"n", r.condition.n},
                    {"k", r.condition.k},
                    {"mean_abs_error", r.mean},
                    {"standard_error", r.stderr_}});
    csv << r.condition.n << ',' << r.condition.k << ',' << format_double(r.mean.tn) << ','
        << format_double(r.mean.tp) << ',' << format_double(r.mean.fn) << ','
        << format_double(r.mean.fp) << ',' << format_double(r.stderr_.tn) << ','
        << format_double(r.stderr_.tp) << ',' << format_double(r.stderr_.fn) << ','
        << format_double(r.stderr_.fp) << '\n';
    json per_trial = json::array();
    for (const auto& t : r.per_trial) per_trial.push_back(t);
    report.trials.push_back({{"n", r.condition.n}, {"k", r.condition.k}, {"abs_error", per_trial}});
  }
  report.results = {{"population", result.population}, {"conditions", rows}};
  report.tables["table1.csv"] = csv.str();
  report.elapsed_seconds = seconds_since(start);
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps

GreedySweepConfig GreedySweepConfig::from_json(const json& j) {
  GreedySweepConfig c;
  if (j.contains("distribution")) c.distribution = j.at("distribution");
  if (j.contains("mode")) {
    const auto mode = j.at("mode").get<std::string>();
    require(mode == "step-trace" || mode == "sample-size" || mode == "both",
            "sweep: mode must be step-trace, sample-size or both");
    c.step_trace = mode != "sample-size";
    c.sample_size = mode != "step-trace";
  }
  c.trace_n = get_or(j, "trace_n", c.trace_n);
  c.trace_step_sizes = get_or(j, "trace_step_sizes", c.trace_step_sizes);
  c.trace_steps = get_or(j, "trace_steps", c.trace_steps);
  c.trace_trials = get_or(j, "trace_trials", c.trace_trials);
  c.n_values = get_or(j, "n_values", c.n_values);
  c.trials = get_or(j, "trials", c.trials);
  c.greedy_step = get_or(j, "greedy_step", c.greedy_step);
  c.greedy_steps = get_or(j, "greedy_steps", c.greedy_steps);
  c.grid_spacing = get_or(j, "grid_spacing", c.grid_spacing);
  c.grid_min_weight = get_or(j, "grid_min_weight", c.grid_min_weight);
  c.initial = get_or(j, "initial", c.initial);
  if (j.contains("update")) c.update = parse_update(j.at("update").get<std::string>());
  if (j.contains("k_rule")) c.k_rule = parse_k_rule(j.at("k_rule").get<std::string>());
  if (j.contains("k") && !j.at("k").is_null()) c.k = j.at("k").get<int>();
  c.reference_grid = get_or(j, "reference_grid", c.reference_grid);
  c.seed = get_or(j, "seed", c.seed);
  c.threads = get_or(j, "threads", c.threads);
  require(c.trials >= 1 && c.trace_trials >= 1, "sweep: trials must be at least 1");
  return c;
}

json GreedySweepConfig::to_json() const {
  return json{{"distribution", distribution},
              {"mode", step_trace && sample_size ? "both" : (step_trace ? "step-trace" : "sample-size")},
              {"trace_n", trace_n},
              {"trace_step_sizes", trace_step_sizes},
              {"trace_steps", trace_steps},
              {"trace_trials", trace_trials},
              {"n_values", n_values},
              {"trials", trials},
              {"greedy_step", greedy_step},
              {"greedy_steps", greedy_steps},
              {"grid_spacing", grid_spacing},
              {"grid_min_weight", grid_min_weight},
              {"initial", initial},
              {"update", update_name(update)},
              {"k_rule", k_rule_name(k_rule)},
              {"k", k ? json(*k) : json(nullptr)},
              {"reference_grid", reference_grid},
              {"seed", seed}};
}

namespace {

int sweep_k(const GreedySweepConfig& c, std::size_t n) {
  if (c.k) return std::min<int>(*c.k, static_cast<int>(n));
  return suggest_k(static_cast<long long>(n), 1.0, 1, c.k_rule);
}

constexpr std::uint64_t kTraceCondition = 0xfffff;

}  // namespace

GreedySweepResult run_greedy_sweep_detailed(const GreedySweepConfig& config) {
  const auto dist = resolve_distribution(config.distribution);
  const EvaluationGrid grid(config.reference_grid);
  const auto truth = tabulate(dist, grid);
  const WeightVector initial(config.initial);
  const int num_classes = dist.num_classes();
  if (initial.size() != static_cast<std::size_t>(num_classes)) {
    throw ConfigError("sweep: initial weight has the wrong dimension");
  }
  GreedySweepResult result;

  if (config.step_trace) {
    const int k = sweep_k(config, config.trace_n);
    for (double step : config.trace_step_sizes) {
      const auto steps = static_cast<std::size_t>(config.trace_steps) + 1;
      std::vector<std::vector<double>> emp(config.trace_trials), pop(config.trace_trials);
      std::vector<std::vector<int>> moves(config.trace_trials);
      parallel_for(config.trace_trials, config.threads, [&](std::size_t t) {
        const auto train = sample(dist, config.trace_n, derive_seed(config.seed, kTraceCondition, t));
        const SyntheticFit fit(train, k, truth, grid);
        const GreedyConfig gc{step, config.trace_steps, initial, config.update};
        const auto run = greedy_search([&](const WeightVector& q) { return fit.empirical_f1(q); }, gc);
        // Accepted weight and metric at the end of each step.
        std::vector<double> e(steps, 0.0), p(steps, 0.0);
        std::vector<int> m(steps, 0);
        for (const auto& r : run.trace.records) {
          const auto s = static_cast<std::size_t>(r.step);
          e[s] = r.metric;
          if (r.step > 0 && r.accepted) ++m[s];
        }
        std::vector<WeightVector> at_step(steps, initial);
        for (const auto& r : run.trace.records) {
          at_step[static_cast<std::size_t>(r.step)] = WeightVector(r.weight);
        }
        for (std::size_t s = 0; s < steps; ++s) p[s] = fit.population_f1(at_step[s]);
        emp[t] = std::move(e);
        pop[t] = std::move(p);
        moves[t] = std::move(m);
      });
      StepTraceSeries series{step, std::vector<double>(steps, 0.0),
                             std::vector<double>(steps, 0.0), std::vector<int>(steps, 0)};
      for (std::size_t t = 0; t < config.trace_trials; ++t) {
        for (std::size_t s = 0; s < steps; ++s) {
          series.empirical_f1[s] += emp[t][s] / static_cast<double>(config.trace_trials);
          series.population_f1[s] += pop[t][s] / static_cast<double>(config.trace_trials);
          series.accepted_moves[s] += moves[t][s];
        }
      }
      result.traces.push_back(std::move(series));
    }
  }

  if (config.sample_size) {
    const SimplexGrid weight_grid{config.grid_spacing, config.grid_min_weight, num_classes};
    weight_grid.validate();
    const auto uniform = WeightVector::uniform(num_classes);
    for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
      const std::size_t n = config.n_values[ni];
      const int k = sweep_k(config, n);
      // [trial][method] -> (empirical, population)
      std::vector<std::array<std::pair<double, double>, 3>> per_trial(config.trials);
      parallel_for(config.trials, config.threads, [&](std::size_t t) {
        const auto train = sample(dist, n, derive_seed(config.seed, ni, t));
        const SyntheticFit fit(train, k, truth, grid);
        const auto objective = [&](const WeightVector& q) { return fit.empirical_f1(q); };
        const auto greedy = greedy_search(
            objective, GreedyConfig{config.greedy_step, config.greedy_steps, initial, config.update});
        const auto best = grid_search(objective, weight_grid);
        per_trial[t][0] = {greedy.metric, fit.population_f1(greedy.weight)};
        per_trial[t][1] = {best.metric, fit.population_f1(best.weight)};
        per_trial[t][2] = {fit.empirical_f1(uniform), fit.population_f1(uniform)};
      });
      SampleSizeRow row{n, k, {}};
      const char* names[] = {"greedy", "grid", "unweighted"};
      for (std::size_t m = 0; m < 3; ++m) {
        std::vector<double> e, p, g;
        for (const auto& tr : per_trial) {
          e.push_back(tr[m].first);
          p.push_back(tr[m].second);
          g.push_back(std::abs(tr[m].first - tr[m].second));
        }
        const auto es = summarize(e);
        const auto ps = summarize(p);
        row.methods.push_back({names[m], es.mean, ps.mean, std::abs(es.mean - ps.mean),
                               summarize(g).mean, es.stderr_, ps.stderr_});
      }
      result.sample_sizes.push_back(std::move(row));
    }
  }
  return result;
}

ExperimentReport run_greedy_sweep(const GreedySweepConfig& config) {
  const auto start = Clock::now();
  const auto result = run_greedy_sweep_detailed(config);
  ExperimentReport report;
  report.experiment = "figure3";
  report.config = config.to_json();
  json traces = json::array();
  if (!result.traces.empty()) {
    std::ostringstream csv;
    csv << "step_size,step,empirical_f1,population_f1,accepted_moves\n";
    for (const auto& s : result.traces) {
      traces.push_back({{"step_size", s.step_size},
                        {"empirical_f1", s.empirical_f1},
                        {"population_f1", s.population_f1},
                        {"accepted_moves", s.accepted_moves}});
      for (std::size_t i = 0; i < s.empirical_f1.size(); ++i) {
        csv << format_double(s.step_size) << ',' << i << ',' << format_double(s.empirical_f1[i])
            << ',' << format_double(s.population_f1[i]) << ',' << s.accepted_moves[i] << '\n';
      }
    }
    report.tables["figure3_steps.csv"] = csv.str();
  }
  json sizes = json::array();
  if (!result.sample_sizes.empty()) {
    std::ostringstream csv;
    csv << "n,k,method,empirical_f1,population_f1,gap,mean_abs_gap,empirical_se,population_se\n";
    for (const auto& r : result.sample_sizes) {
      json methods = json::array();
      for (const auto& m : r.methods) {
        methods.push_back({{"method", m.method},
                           {"empirical_f1", m.empirical_f1},
                           {"population_f1", m.population_f1},
                           {"gap", m.gap},
                           {"mean_abs_gap", m.mean_abs_gap},
                           {"empirical_stderr", m.empirical_stderr},
                           {"population_stderr", m.population_stderr}});
        csv << r.n << ',' << r.k << ',' << m.method << ',' << format_double(m.empirical_f1) << ','
            << format_double(m.population_f1) << ',' << format_double(m.gap) << ','
            << format_double(m.mean_abs_gap) << ',' << format_double(m.empirical_stderr) << ','
            << format_double(m.population_stderr) << '\n';
      }
      sizes.push_back({{"n", r.n}, {"k", r.k}, {"methods", methods}});
    }
    report.tables["figure3_sample_size.csv"] = csv.str();
  }
  report.results = {{"step_trace", traces}, {"sample_size", sizes}};
  report.elapsed_seconds = seconds_since(start);
  return report;
}

// ---------------------------------------------------------------------------
// Covertype

CovertypeConfig CovertypeConfig::from_json(const json& j) {
  CovertypeConfig c;
  c.path = get_or(j, "path", std::string());
  c.k = get_or(j, "k", c.k);
  c.greedy_steps = get_or(j, "greedy_steps", c.greedy_steps);
  c.greedy_step = get_or(j, "greedy_step", c.greedy_step);
  if (j.contains("update")) c.update = parse_update(j.at("update").get<std::string>());
  c.grid_spacing = get_or(j, "grid_spacing", c.grid_spacing);
  c.grid_min_weight = get_or(j, "grid_min_weight", c.grid_min_weight);
  c.standardize = get_or(j, "standardize", c.standardize);
  if (j.contains("metric")) c.metric = parse_metric(j.at("metric").get<std::string>());
  c.expected_rows = get_or(j, "expected_rows", c.expected_rows);
  c.threads = get_or(j, "threads", c.threads);
  return c;
}

json CovertypeConfig::to_json() const {
  return json{{"path", path.string()},       {"k", k},
              {"greedy_steps", greedy_steps}, {"greedy_step", greedy_step},
              {"update", update_name(update)}, {"grid_spacing", grid_spacing},
              {"grid_min_weight", grid_min_weight}, {"standardize", standardize},
              {"metric", to_string(metric)},  {"expected_rows", expected_rows}};
}

CovertypeResult run_covertype_detailed(const CovertypeConfig& config) {
  if (config.path.empty()) throw ConfigError("covertype: no data path given");
  auto split = load_covertype(config.path, config.expected_rows);
  if (config.standardize) {
    std::vector<std::size_t> continuous(kCovertypeContinuous);
    std::iota(continuous.begin(), continuous.end(), std::size_t{0});
    auto s = standardize(split.train, {split.dev, split.test}, continuous);
    split = {std::move(s.train), std::move(s.others[0]), std::move(s.others[1])};
  }
  const KnnModel model(split.train, config.k, config.metric);
  const auto eta_train = knn_regress_batch(model, split.train.features(), config.threads);
  const auto eta_dev = knn_regress_batch(model, split.dev.features(), config.threads);
  const auto eta_test = knn_regress_batch(model, split.test.features(), config.threads);
  auto f1_on = [](const RegressionTable& eta, const Dataset& data, const WeightVector& q) {
    return macro_f1(empirical_confusion(eta, data.labels(), q));
  };
  const auto objective = [&](const WeightVector& q) { return f1_on(eta_dev, split.dev, q); };
  const auto uniform = WeightVector::uniform(7);

  const auto greedy = greedy_search(
      objective, GreedyConfig{config.greedy_step, config.greedy_steps, uniform, config.update});
  const auto grid = grid_search(objective, SimplexGrid{config.grid_spacing, config.grid_min_weight, 7});

  CovertypeResult result;
  for (const auto& [name, q] : {std::pair<std::string, WeightVector>{"greedy", greedy.weight},
                                {"grid", grid.weight},
                                {"unweighted", uniform}}) {
    result.methods.push_back({name, q, f1_on(eta_train, split.train, q),
                              f1_on(eta_dev, split.dev, q), f1_on(eta_test, split.test, q)});
  }
  return result;
}

ExperimentReport run_covertype(const CovertypeConfig& config) {
  const auto start = Clock::now();
  const auto result = run_covertype_detailed(config);
  ExperimentReport report;
  report.experiment = "covertype";
  report.config = config.to_json();
  json rows = json::array();
  std::ostringstream csv;
  csv << "method,train_f1,dev_f1,test_f1";
  for (int c = 1; c <= 7; ++c) csv << ",q_" << c;
  csv << '\n';
  for (const auto& m : result.methods) {
    rows.push_back({{"method", m.method},
                    {"train_f1", m.train_f1},
                    {"dev_f1", m.dev_f1},
                    {"test_f1", m.test_f1},
                    {"weights", m.weight}});
    csv << m.method << ',' << format_double(m.train_f1) << ',' << format_double(m.dev_f1) << ','
        << format_double(m.test_f1);
    for (double w : m.weight.values()) csv << ',' << format_double(w);
    csv << '\n';
  }
  report.results = {{"methods", rows}, {"k", config.k}};
  report.tables["covertype.csv"] = csv.str();
  report.elapsed_seconds = seconds_since(start);
  return report;
}

// ---------------------------------------------------------------------------
// Error-band illustration

BoundIllustrationConfig BoundIllustrationConfig::from_json(const json& j) {
  BoundIllustrationConfig c;
  if (j.contains("distribution")) c.distribution = j.at("distribution");
  c.weight = get_or(j, "weight", c.weight);
  c.lower = get_or(j, "lower", c.lower);
  c.upper = get_or(j, "upper", c.upper);
  c.target_class = get_or(j, "target_class", c.target_class);
  c.epsilon = get_or(j, "epsilon", c.epsilon);
  c.grid = get_or(j, "grid", c.grid);
  c.marginal_grid = get_or(j, "marginal_grid", c.marginal_grid);
  if (j.contains("band_radius")) c.radius = parse_band_radius(j.at("band_radius").get<std::string>());
  c.delta = get_or(j, "delta", c.delta);
  c.n = get_or(j, "n", c.n);
  c.cover_spacing = get_or(j, "cover_spacing", c.cover_spacing);
  c.cover_min_weight = get_or(j, "cover_min_weight", c.cover_min_weight);
  return c;
}

json BoundIllustrationConfig::to_json() const {
  return json{{"distribution", distribution}, {"weight", weight},
              {"lower", lower},               {"upper", upper},
              {"target_class", target_class}, {"epsilon", epsilon},
              {"grid", grid},                 {"marginal_grid", marginal_grid},
              {"band_radius", to_string(radius)}, {"delta", delta},
              {"n", n},                       {"cover_spacing", cover_spacing},
              {"cover_min_weight", cover_min_weight}};
}

BoundIllustrationResult run_bound_illustration_detailed(const BoundIllustrationConfig& config) {
  const auto dist = resolve_distribution(config.distribution);
  const WeightVector q(config.weight);
  const CoverPair pair{WeightVector(config.lower), WeightVector(config.upper), config.target_class};
  const EvaluationGrid grid(config.grid);
  const auto theorem = tnfn_error_masses(dist, pair, config.target_class, config.epsilon, grid,
                                         BandRadius::theorem);
  const auto unit =
      tnfn_error_masses(dist, pair, config.target_class, config.epsilon, grid, BandRadius::unit);
  return {marginal_probs(dist, EvaluationGrid(config.marginal_grid)),
          is_class_covered(q, pair, config.target_class),
          config.radius == BandRadius::theorem ? theorem : unit,
          theorem,
          unit,
          error_band(dist, pair, config.target_class, config.epsilon, grid, config.radius),
          simplex_grid_size(
              SimplexGrid{config.cover_spacing, config.cover_min_weight, dist.num_classes()})};
}

ExperimentReport run_bound_illustration(const BoundIllustrationConfig& config) {
  const auto start = Clock::now();
  const auto r = run_bound_illustration_detailed(config);
  ExperimentReport report;
  report.experiment = "section5";
  report.config = config.to_json();

  BoundBudget budget;
  budget.delta = config.delta;
  budget.n = static_cast<long long>(config.n);
  budget.k = 1;
  budget.num_classes = static_cast<int>(r.marginals.size());
  budget.cover_size = static_cast<long long>(r.cover_size);
  budget.epsilon = config.epsilon;
  const auto bounds =
      confusion_error_bounds({{r.masses.tne, r.masses.fne, r.masses.tne, r.masses.fne}}, budget);

  report.results = {{"marginals", r.marginals},
                    {"covered", r.covered},
                    {"masses", r.masses},
                    {"masses_by_radius", {{"theorem", r.theorem_radius_masses},
                                          {"unit", r.unit_radius_masses}}},
                    {"cover_size", r.cover_size},
                    {"confusion_bounds", bounds}};
  std::ostringstream csv;
  csv << "x,eta_c,lower,upper,in_band,weight\n";
  for (std::size_t i = 0; i < r.band.x.size(); ++i) {
    csv << format_double(r.band.x[i]) << ',' << format_double(r.band.eta_c[i]) << ','
        << format_double(r.band.lower[i]) << ',' << format_double(r.band.upper[i]) << ','
        << r.band.in_band[i] << ',' << format_double(r.band.weights[i]) << '\n';
  }
  report.tables["section5_band.csv"] = csv.str();
  report.elapsed_seconds = seconds_since(start);
  return report;
}

}  // namespace wknn
