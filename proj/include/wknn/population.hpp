#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wknn/core.hpp"
#include "wknn/knn.hpp"
#include "wknn/metrics.hpp"

namespace wknn {

/// Closed-form expression in one variable x, parsed from JSON. See
/// README.md ("Distribution files") for the grammar.
class Expression {
 public:
  struct Node;

  static Expression parse(const nlohmann::json& spec, int max_eta_ref);

  /// `etas` holds the already-evaluated regression values of lower classes.
  double evaluate(double x, std::span<const double> etas) const;

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

/// Distribution on [0,1] with known regression function and density.
class SyntheticDistribution {
 public:
  using RegressionFn = std::function<void(double x, std::span<double> out)>;
  using DensityFn = std::function<double(double x)>;

  /// `density` may be empty for the uniform density. Validates that the
  /// regression values are probability vectors and the density integrates
  /// to 1 (within 1e-6) on a reference grid.
  SyntheticDistribution(std::string name, int num_classes, RegressionFn regression,
                        DensityFn density = {});

  const std::string& name() const { return name_; }
  int num_classes() const { return num_classes_; }
  bool uniform_density() const { return !density_; }

  std::vector<double> regression(double x) const;
  void regression_into(double x, std::span<double> out) const { regression_(x, out); }
  double density(double x) const { return density_ ? density_(x) : 1.0; }

  /// eta_1 = exp(-2x) cos^2(4 pi x), eta_2 = (1-x)(1-eta_1), eta_3 = x(1-eta_1),
  /// X uniform on [0,1].
  static SyntheticDistribution three_class_example();

  /// {"name": ..., "eta": [expr, ...], "density": expr?} or {"builtin": name}.
  static SyntheticDistribution from_json(const nlohmann::json& spec);

  /// Builtin names: "three-class" (alias "paper-section5").
  static SyntheticDistribution by_name(const std::string& name);

 private:
  std::string name_;
  int num_classes_;
  RegressionFn regression_;
  DensityFn density_;
};

/// Midpoint grid x_i = (i + 1/2) / N on [0,1].
class EvaluationGrid {
 public:
  explicit EvaluationGrid(std::size_t size);

  std::size_t size() const { return size_; }
  double point(std::size_t i) const {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(size_);
  }
  FeatureMatrix as_features() const;

 private:
  std::size_t size_;
};

/// Regression values and normalized quadrature weights on a grid.
struct GridTable {
  RegressionTable eta;
  std::vector<double> weights;  // sum to 1
};

GridTable tabulate(const SyntheticDistribution& dist, const EvaluationGrid& grid);

ProbabilityVector marginal_probs(const SyntheticDistribution& dist, const EvaluationGrid& grid);

/// Confusion matrix of the q-weighted Bayes rule, by midpoint quadrature.
ConfusionMatrix population_confusion(const SyntheticDistribution& dist, const WeightVector& q,
                                     const EvaluationGrid& grid);

/// Population matrix of the plug-in rule built from an estimate evaluated at
/// the grid points: TP_c = integral of eta_c 1{q_c est_c >= max_{j!=c} q_j est_j}.
ConfusionMatrix population_confusion(const GridTable& truth, const WeightVector& q,
                                     const RegressionTable& estimate_on_grid);

/// Band radius convention for the error masses. `theorem` scales epsilon by
/// r(q,c) = 1 + q_max/q_c; `unit` uses epsilon alone, which is the
/// convention that reproduces the published three-class worked values.
enum class BandRadius { theorem, unit };

BandRadius parse_band_radius(const std::string& name);
std::string to_string(BandRadius r);

struct ErrorMasses {
  double tne = 0.0;  // equals fpe
  double fne = 0.0;  // equals tpe
};

/// t(q,c,x) = max_{j != c} q_j eta_j(x) / q_c.
double decision_threshold(const WeightVector& q, ClassLabel c, std::span<const double> eta);
/// r(q,c) = 1 + q_max / q_c.
double band_scale(const WeightVector& q, ClassLabel c);

/// Per-grid-point view of the error band for one class.
struct ErrorBand {
  std::vector<double> x;
  std::vector<double> eta_c;
  std::vector<double> lower;  // t'(c,x) - eps r'(c)
  std::vector<double> upper;  // t''(c,x) + eps r''(c)
  std::vector<int> in_band;
  std::vector<double> weights;
};

ErrorBand error_band(const SyntheticDistribution& dist, const CoverPair& pair, ClassLabel c,
                     double epsilon, const EvaluationGrid& grid,
                     BandRadius radius = BandRadius::theorem);

/// tne = sum_i w_i (1 - eta_c(x_i)) 1{lower_i <= eta_c(x_i) <= upper_i},
/// fne the same with weight eta_c(x_i).
ErrorMasses tnfn_error_masses(const SyntheticDistribution& dist, const CoverPair& pair,
                              ClassLabel c, double epsilon, const EvaluationGrid& grid,
                              BandRadius radius = BandRadius::theorem);

/// n draws of (X, Y): X from the density, Y categorical from eta(X).
Dataset sample(const SyntheticDistribution& dist, std::size_t n, std::uint64_t seed);

}  // namespace wknn
