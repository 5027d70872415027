#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wknn/core.hpp"
#include "wknn/metrics.hpp"

namespace wknn {

/// Holder smoothness and density lower-bound constants.
struct SmoothnessParams {
  double alpha = 1.0;   // Holder exponent
  double L = 1.0;       // Holder constant
  int d = 1;            // intrinsic dimension
  double p_star = 1.0;  // P(B(x,r)) >= p_star r^d
  double r_star = 1.0;  // for r <= r_star

  void validate() const;
};

/// Margin exponent and constant: P(weighted gap <= t) <= M t^beta. Carried
/// for documentation of rates only; no computation consumes them.
struct MarginParams {
  double beta = 1.0;
  double M = 1.0;
};

struct BoundBudget {
  double delta = 0.05;   // failure probability
  long long n = 1;       // sample size
  long long k = 1;       // neighbors
  int num_classes = 2;   // C
  long long cover_size = 1;  // N, size of the weight cover
  double epsilon = 0.0;  // uniform-error level

  void validate() const;
};

struct AccuracyTerms {
  double p = 0.0;
  double delta_gap = 0.0;  // Delta
};

/// p = (k/n) / (1 - sqrt((4/k) log(2/delta))),
/// Delta = min(1, sqrt((2 q_max^2 / k)(log C + 2 log(2/delta)))).
/// Throws InfeasibleBudget when k <= 4 log(2/delta).
AccuracyTerms accuracy_boundary_terms(const BoundBudget& budget, const WeightVector& q);

/// Shattering coefficient S(n): an explicit value or the Euclidean default
/// 2 n^{d+1} + 2.
struct Shattering {
  std::optional<double> value;

  static Shattering euclidean_default() { return {}; }
  static Shattering explicit_value(double s) { return {s}; }
};

struct UniformErrorBound {
  double bias_term = 0.0;      // 2^a L (2k/(p* n))^{a/d}
  double noise_term = 0.0;     // 1/sqrt(k)
  double deviation_term = 0.0; // sqrt(log(S/delta)/(2k))
  double value = 0.0;
  double log_shattering = 0.0;
  /// N((2k/(p* n))^{1/d}) e^{-k/4} with N(r) = (2/r)^d.
  double side_probability = 0.0;
  /// k/n <= p* (r*)^d / 2.
  bool valid = true;
};

UniformErrorBound uniform_error_bound(const SmoothnessParams& params, const BoundBudget& budget,
                                      const Shattering& shattering);

/// Masses entering the confusion-matrix bounds for one class.
struct ErrorMassQuad {
  double tne = 0.0;
  double fne = 0.0;
  double fpe = 0.0;
  double tpe = 0.0;
};

struct ClassConfusionBound {
  double tn = 0.0;
  double fn = 0.0;
  double fp = 0.0;
  double tp = 0.0;
  bool vacuous = false;  // some entry >= 1
};

struct ConfusionBounds {
  std::vector<ClassConfusionBound> per_class;
  double root_term = 0.0;  // sqrt((log(24N/delta) + 2 log C) / (2n))
};

/// E_X = 3 * mass_X + 3 * sqrt((log(24 N/delta) + 2 log C) / (2n)), uncapped.
ConfusionBounds confusion_error_bounds(const std::vector<ErrorMassQuad>& masses,
                                       const BoundBudget& budget);

struct ClassMetricBound {
  std::optional<double> precision;  // empty when the denominator is <= 0
  std::optional<double> recall;
  std::optional<double> f1;
};

struct MetricBounds {
  std::vector<ClassMetricBound> per_class;
  std::optional<double> macro_f1;  // mean over classes with an F1 bound
  std::vector<std::string> warnings;
};

/// E_prec = 3 (E_TP + E_FP) / (TP + FP - E_TP - E_FP),
/// E_rec  = 3 (E_TP + E_FN) / (TP + FN - E_TP - E_FN),
/// E_F1   = 9 (E_prec + E_rec) / (prec + rec - E_prec - E_rec).
MetricBounds metric_error_bounds(const ConfusionMatrix& population,
                                 const ConfusionBounds& bounds);

}  // namespace wknn
