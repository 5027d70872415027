#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wknn/bounds.hpp"
#include "wknn/core.hpp"
#include "wknn/data_io.hpp"
#include "wknn/experiments.hpp"
#include "wknn/knn.hpp"
#include "wknn/metrics.hpp"
#include "wknn/optimize.hpp"
#include "wknn/population.hpp"
#include "wknn/report_json.hpp"

using nlohmann::json;
using namespace wknn;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 0;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    json j;
    in >> j;
    if (!j.is_object()) throw ConfigError("config '" + path + "' must hold a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON config file");
  app->add_option("--seed", c.seed, "Master seed");
  app->add_option("--out", c.out_dir, "Output directory");
  app->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

// Applies --seed / --threads on top of the config file.
json merged_config(const Common& c) {
  json j = load_config(c.config_path);
  if (c.seed) j["seed"] = *c.seed;
  if (c.threads != 0) j["threads"] = c.threads;
  return j;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError("not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

ColumnRef column_ref(const std::string& s) {
  std::size_t idx = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
  if (ec == std::errc() && ptr == s.data() + s.size()) return idx;
  return s;
}

struct DataArgs {
  std::string label_column = "label";
  bool no_header = false;
  int num_classes = 0;
};

// Integer labels that already lie in 1..C keep their values, so files
// written by `synth sample` map back to the same classes even when a class
// is missing from the file.
Dataset load_labeled(const std::string& path, const DataArgs& args) {
  auto loaded = load_csv(path, column_ref(args.label_column), !args.no_header);
  std::vector<int> ids;
  bool identity = true;
  for (const auto& name : loaded.label_names) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), v);
    if (ec != std::errc() || ptr != name.data() + name.size() || v < 1) {
      identity = false;
      break;
    }
    ids.push_back(v);
  }
  int classes = loaded.data.num_classes();
  std::vector<ClassLabel> labels = loaded.data.labels();
  if (identity) {
    for (auto& l : labels) l = ids[static_cast<std::size_t>(l - 1)];
    for (int v : ids) classes = std::max(classes, v);
  }
  if (args.num_classes > 0) {
    if (args.num_classes < classes) throw FormatError("file has more classes than --classes");
    classes = args.num_classes;
  }
  classes = std::max(classes, 2);
  return Dataset(loaded.data.features(), std::move(labels), classes);
}

void add_data_args(CLI::App* app, DataArgs& d) {
  app->add_option("--label-column", d.label_column, "Label column name or 0-based index");
  app->add_flag("--no-header", d.no_header, "Input files have no header row");
  app->add_option("--classes", d.num_classes, "Number of classes (default: from labels)");
}

void emit(const json& j, const Common& c, const std::string& file = "report.json") {
  std::cout << j.dump(2) << '\n';
  if (!c.out_dir.empty()) {
    std::filesystem::create_directories(c.out_dir);
    std::ofstream out(std::filesystem::path(c.out_dir) / file);
    if (!out) throw FormatError("cannot write into '" + c.out_dir + "'");
    out << j.dump(2) << '\n';
  }
}

void emit_report(const ExperimentReport& report, const Common& c) {
  if (!c.out_dir.empty()) report.write(c.out_dir);
  std::cout << report.to_json().dump(2) << '\n';
}

WeightVector weights_or_uniform(const std::string& text, int classes) {
  if (text.empty()) return WeightVector::uniform(classes);
  WeightVector q(parse_list(text));
  if (q.size() != static_cast<std::size_t>(classes)) {
    throw ConfigError("weight vector has " + std::to_string(q.size()) + " entries for " +
                      std::to_string(classes) + " classes");
  }
  return q;
}

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

// `bounds`: evaluates every calculator whose inputs are present in the config.
json run_bounds(const json& cfg) {
  BoundBudget budget;
  budget.delta = field(cfg, "delta", budget.delta);
  budget.n = field(cfg, "n", budget.n);
  budget.k = field(cfg, "k", budget.k);
  budget.num_classes = field(cfg, "num_classes", budget.num_classes);
  budget.cover_size = field(cfg, "cover_size", budget.cover_size);
  budget.epsilon = field(cfg, "epsilon", budget.epsilon);
  budget.validate();

  json out{{"budget",
            {{"delta", budget.delta},
             {"n", budget.n},
             {"k", budget.k},
             {"num_classes", budget.num_classes},
             {"cover_size", budget.cover_size},
             {"epsilon", budget.epsilon}}}};

  if (cfg.contains("weight")) {
    const auto q = weight_from_json(cfg.at("weight"));
    try {
      json terms = accuracy_boundary_terms(budget, q);
      terms["feasible"] = true;
      out["accuracy_boundary"] = terms;
    } catch (const InfeasibleBudget& e) {
      out["accuracy_boundary"] = {{"feasible", false}, {"reason", e.what()}};
    }
  }

  if (cfg.contains("smoothness")) {
    const auto& s = cfg.at("smoothness");
    SmoothnessParams params;
    params.alpha = field(s, "alpha", params.alpha);
    params.L = field(s, "L", params.L);
    params.d = field(s, "d", params.d);
    params.p_star = field(s, "p_star", params.p_star);
    params.r_star = field(s, "r_star", params.r_star);
    Shattering shattering = Shattering::euclidean_default();
    if (cfg.contains("shattering") && !cfg.at("shattering").is_string()) {
      shattering = Shattering::explicit_value(cfg.at("shattering").get<double>());
    }
    out["uniform_error"] = uniform_error_bound(params, budget, shattering);
  }

  if (cfg.contains("masses")) {
    std::vector<ErrorMassQuad> masses;
    for (const auto& m : cfg.at("masses")) {
      ErrorMassQuad e;
      e.tne = field(m, "tne", 0.0);
      e.fne = field(m, "fne", 0.0);
      e.fpe = field(m, "fpe", e.tne);
      e.tpe = field(m, "tpe", e.fne);
      masses.push_back(e);
    }
    const auto cb = confusion_error_bounds(masses, budget);
    out["confusion"] = cb;
    if (cfg.contains("population")) {
      out["metrics"] = metric_error_bounds(confusion_from_json(cfg.at("population")), cb);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Class-weighted kNN: confusion matrices, error bounds and weight search"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // synth sample
  Common synth_common;
  std::string synth_dist = "three-class";
  std::size_t synth_n = 1000;
  auto* synth = app.add_subcommand("synth", "Synthetic distributions");
  synth->require_subcommand(1);
  auto* synth_sample = synth->add_subcommand("sample", "Draw a labeled sample as CSV");
  add_common(synth_sample, synth_common);
  synth_sample->add_option("--distribution", synth_dist, "Builtin name or JSON file");
  synth_sample->add_option("-n,--n", synth_n, "Sample size");

  // classify
  Common cls_common;
  DataArgs cls_data;
  std::string cls_train, cls_query, cls_weights, cls_metric = "euclidean";
  int cls_k = 0;
  auto* classify = app.add_subcommand("classify", "Weighted kNN predictions for a query file");
  add_common(classify, cls_common);
  add_data_args(classify, cls_data);
  classify->add_option("--train", cls_train, "Training CSV")->required();
  classify->add_option("--query", cls_query, "Query CSV (labeled, same layout)")->required();
  classify->add_option("-k,--k", cls_k, "Neighbors")->required();
  classify->add_option("--weights", cls_weights, "Comma-separated class weights");
  classify->add_option("--metric", cls_metric, "euclidean | manhattan");

  // metrics
  Common met_common;
  DataArgs met_data;
  std::string met_train, met_eval, met_weights, met_metric = "euclidean", met_dist;
  int met_k = 0;
  std::size_t met_grid = 10000;
  auto* metrics = app.add_subcommand("metrics", "Confusion matrix and precision/recall/F1");
  add_common(metrics, met_common);
  add_data_args(metrics, met_data);
  metrics->add_option("--train", met_train, "Training CSV");
  metrics->add_option("--eval", met_eval, "Evaluation CSV (default: the training file)");
  metrics->add_option("-k,--k", met_k, "Neighbors");
  metrics->add_option("--weights", met_weights, "Comma-separated class weights");
  metrics->add_option("--metric", met_metric, "euclidean | manhattan");
  metrics->add_option("--distribution", met_dist,
                      "Population matrix of the weighted Bayes rule for this distribution");
  metrics->add_option("--grid", met_grid, "Quadrature grid size for --distribution");

  // bounds
  Common bnd_common;
  auto* bounds = app.add_subcommand("bounds", "Evaluate the error-bound calculators");
  add_common(bounds, bnd_common);

  // optimize greedy|grid
  Common opt_common;
  DataArgs opt_data;
  std::string opt_train, opt_fit, opt_initial, opt_metric = "euclidean", opt_update = "chained";
  int opt_k = 0, opt_steps = 20;
  double opt_step = 0.01, opt_spacing = 0.01, opt_min = 0.0;
  auto* optimize = app.add_subcommand("optimize", "Search class weights for macro-F1");
  optimize->require_subcommand(1);
  auto* opt_greedy = optimize->add_subcommand("greedy", "Greedy coordinate search");
  auto* opt_grid = optimize->add_subcommand("grid", "Exhaustive simplex grid search");
  for (auto* sub : {opt_greedy, opt_grid}) {
    add_common(sub, opt_common);
    add_data_args(sub, opt_data);
    sub->add_option("--train", opt_train, "Training CSV")->required();
    sub->add_option("--fit", opt_fit, "CSV whose macro-F1 is maximized (default: training file)");
    sub->add_option("-k,--k", opt_k, "Neighbors")->required();
    sub->add_option("--metric", opt_metric, "euclidean | manhattan");
  }
  opt_greedy->add_option("--step", opt_step, "Step size");
  opt_greedy->add_option("--steps", opt_steps, "Number of steps");
  opt_greedy->add_option("--initial", opt_initial, "Starting weights (default: uniform)");
  opt_greedy->add_option("--update", opt_update, "chained | step-start");
  opt_grid->add_option("--spacing", opt_spacing, "Lattice spacing");
  opt_grid->add_option("--min-weight", opt_min, "Minimum coordinate");

  // repro
  Common rep_common;
  std::string cov_path;
  auto* repro = app.add_subcommand("repro", "Reproduction experiments");
  repro->require_subcommand(1);
  auto* rep_table1 = repro->add_subcommand("table1", "Confusion-matrix error table");
  auto* rep_fig3 = repro->add_subcommand("figure3", "Greedy step trace and sample-size sweep");
  auto* rep_sec5 = repro->add_subcommand("section5", "Marginals, error masses and band CSV");
  auto* rep_cov = repro->add_subcommand("covertype", "Covertype weight-search protocol");
  for (auto* sub : {rep_table1, rep_fig3, rep_sec5, rep_cov}) add_common(sub, rep_common);
  rep_cov->add_option("--data", cov_path, "Path to covtype.data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*synth_sample) {
      const json cfg = merged_config(synth_common);
      const auto dist = resolve_distribution(cfg.value("distribution", json(synth_dist)));
      const auto n = field(cfg, "n", synth_n);
      const auto data = sample(dist, n, field<std::uint64_t>(cfg, "seed", 1));
      if (synth_common.out_dir.empty()) {
        throw ConfigError("synth sample needs --out <dir>");
      }
      std::filesystem::create_directories(synth_common.out_dir);
      write_csv(std::filesystem::path(synth_common.out_dir) / "sample.csv", data);
      std::cout << json{{"distribution", dist.name()},
                        {"n", n},
                        {"classes", dist.num_classes()},
                        {"file", (std::filesystem::path(synth_common.out_dir) / "sample.csv").string()}}
                       .dump(2)
                << '\n';
    } else if (*classify) {
      const auto train = load_labeled(cls_train, cls_data);
      DataArgs qargs = cls_data;
      qargs.num_classes = train.num_classes();
      const auto query = load_labeled(cls_query, qargs);
      const KnnModel model(train, cls_k, parse_metric(cls_metric));
      const auto q = weights_or_uniform(cls_weights, train.num_classes());
      const auto predicted = classify_batch(model, q, query.features(), cls_common.threads);
      std::ostringstream csv;
      csv << "row,label,predicted\n";
      std::size_t correct = 0;
      for (std::size_t i = 0; i < predicted.size(); ++i) {
        csv << i << ',' << query.labels()[i] << ',' << predicted[i] << '\n';
        correct += predicted[i] == query.labels()[i] ? 1 : 0;
      }
      json summary{{"k", cls_k},
                   {"weights", q},
                   {"queries", predicted.size()},
                   {"accuracy", static_cast<double>(correct) / static_cast<double>(predicted.size())}};
      if (!cls_common.out_dir.empty()) {
        std::filesystem::create_directories(cls_common.out_dir);
        std::ofstream(std::filesystem::path(cls_common.out_dir) / "predictions.csv") << csv.str();
      } else {
        std::cout << csv.str();
      }
      emit(summary, cls_common);
    } else if (*metrics) {
      json out;
      if (!met_dist.empty()) {
        const auto dist = resolve_distribution(json(met_dist));
        const auto q = weights_or_uniform(met_weights, dist.num_classes());
        const auto cm = population_confusion(dist, q, EvaluationGrid(met_grid));
        out = {{"confusion", cm}, {"metrics", precision_recall_f1(cm)}, {"weights", q}};
      } else {
        if (met_train.empty() || met_k <= 0) throw ConfigError("metrics needs --train and --k");
        const auto train = load_labeled(met_train, met_data);
        DataArgs eargs = met_data;
        eargs.num_classes = train.num_classes();
        const auto eval = met_eval.empty() ? train : load_labeled(met_eval, eargs);
        const KnnModel model(train, met_k, parse_metric(met_metric));
        const auto q = weights_or_uniform(met_weights, train.num_classes());
        const auto cm = empirical_confusion(model, q, eval, met_common.threads);
        out = {{"confusion", cm}, {"metrics", precision_recall_f1(cm)}, {"weights", q}, {"k", met_k}};
      }
      emit(out, met_common);
    } else if (*bounds) {
      emit(run_bounds(merged_config(bnd_common)), bnd_common);
    } else if (*optimize) {
      const auto train = load_labeled(opt_train, opt_data);
      DataArgs fargs = opt_data;
      fargs.num_classes = train.num_classes();
      const auto fit = opt_fit.empty() ? train : load_labeled(opt_fit, fargs);
      const KnnModel model(train, opt_k, parse_metric(opt_metric));
      const auto eta = knn_regress_batch(model, fit.features(), opt_common.threads);
      const Objective objective = [&](const WeightVector& q) {
        return macro_f1(empirical_confusion(eta, fit.labels(), q));
      };
      json out{{"k", opt_k}};
      if (*opt_greedy) {
        GreedyConfig gc{opt_step, opt_steps, weights_or_uniform(opt_initial, train.num_classes()),
                        opt_update == "step-start" || opt_update == "step_start"
                            ? GreedyUpdate::step_start
                            : GreedyUpdate::chained};
        if (opt_update != "chained" && gc.update == GreedyUpdate::chained) {
          throw ConfigError("unknown --update '" + opt_update + "'");
        }
        const auto result = greedy_search(objective, gc);
        out["method"] = "greedy";
        out["weights"] = result.weight;
        out["macro_f1"] = result.metric;
        out["records"] = result.trace.records.size();
        if (!opt_common.out_dir.empty()) {
          std::filesystem::create_directories(opt_common.out_dir);
          std::ofstream trace(std::filesystem::path(opt_common.out_dir) / "trace.csv");
          result.trace.write_csv(trace);
        }
      } else {
        const auto result =
            grid_search(objective, SimplexGrid{opt_spacing, opt_min, train.num_classes()});
        out["method"] = "grid";
        out["weights"] = result.weight;
        out["macro_f1"] = result.metric;
        out["evaluated"] = result.evaluated;
        out["index"] = result.index;
      }
      emit(out, opt_common);
    } else if (*rep_table1) {
      emit_report(run_table1(Table1Config::from_json(merged_config(rep_common))), rep_common);
    } else if (*rep_fig3) {
      emit_report(run_greedy_sweep(GreedySweepConfig::from_json(merged_config(rep_common))),
                  rep_common);
    } else if (*rep_sec5) {
      emit_report(
          run_bound_illustration(BoundIllustrationConfig::from_json(merged_config(rep_common))),
          rep_common);
    } else if (*rep_cov) {
      json cfg = merged_config(rep_common);
      if (!cov_path.empty()) cfg["path"] = cov_path;
      emit_report(run_covertype(CovertypeConfig::from_json(cfg)), rep_common);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleBudget& e) {
    std::cerr << "infeasible budget: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DegenerateInput& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
