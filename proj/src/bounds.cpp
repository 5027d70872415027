#include "wknn/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace wknn {

void SmoothnessParams::validate() const {
  if (!(alpha > 0.0) || !(L > 0.0) || d < 1 || !(p_star > 0.0) || !(r_star > 0.0)) {
    throw InvalidArgument("smoothness parameters must be positive");
  }
}

void BoundBudget::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("bound budget: delta must be in (0,1)");
  if (n < 1) throw InvalidArgument("bound budget: n must be positive");
  if (k < 1 || k > n) throw InvalidArgument("bound budget: k must be in 1..n");
  if (num_classes < 2) throw InvalidArgument("bound budget: need at least 2 classes");
  if (cover_size < 1) throw InvalidArgument("bound budget: cover size must be positive");
  if (!(epsilon >= 0.0)) throw InvalidArgument("bound budget: epsilon must be nonnegative");
}

AccuracyTerms accuracy_boundary_terms(const BoundBudget& budget, const WeightVector& q) {
  budget.validate();
  const double k = static_cast<double>(budget.k);
  const double n = static_cast<double>(budget.n);
  const double log_term = std::log(2.0 / budget.delta);
  const double denom = 1.0 - std::sqrt(4.0 / k * log_term);
  if (!(denom > 0.0)) {
    throw InfeasibleBudget("accuracy_boundary_terms: k=" + std::to_string(budget.k) +
                           " must exceed 4 log(2/delta)=" + std::to_string(4.0 * log_term));
  }
  AccuracyTerms out;
  out.p = k / n / denom;
  const double qmax = q.max();
  out.delta_gap = std::min(
      1.0, std::sqrt(2.0 * qmax * qmax / k * (std::log(budget.num_classes) + 2.0 * log_term)));
  return out;
}

UniformErrorBound uniform_error_bound(const SmoothnessParams& params, const BoundBudget& budget,
                                      const Shattering& shattering) {
  params.validate();
  budget.validate();
  const double k = static_cast<double>(budget.k);
  const double n = static_cast<double>(budget.n);
  const double d = params.d;
  const double ratio = 2.0 * k / (params.p_star * n);

  UniformErrorBound out;
  if (shattering.value) {
    if (!(*shattering.value > 0.0)) throw InvalidArgument("shattering coefficient must be positive");
    out.log_shattering = std::log(*shattering.value);
  } else {
    // log(2 n^{d+1} + 2) without forming n^{d+1}.
    out.log_shattering = std::log(2.0) + (d + 1.0) * std::log(n) + std::log1p(std::pow(n, -(d + 1.0)));
  }
  out.bias_term = std::pow(2.0, params.alpha) * params.L * std::pow(ratio, params.alpha / d);
  out.noise_term = 1.0 / std::sqrt(k);
  const double log_ratio = out.log_shattering - std::log(budget.delta);
  if (log_ratio < 0.0) throw InvalidArgument("uniform_error_bound: shattering coefficient below delta");
  out.deviation_term = std::sqrt(log_ratio / (2.0 * k));
  out.value = out.bias_term + out.noise_term + out.deviation_term;
  // N(r) = (2/r)^d at r = ratio^{1/d} is 2^d / ratio.
  out.side_probability = std::pow(2.0, d) / ratio * std::exp(-k / 4.0);
  out.valid = k / n <= params.p_star * std::pow(params.r_star, d) / 2.0;
  return out;
}

ConfusionBounds confusion_error_bounds(const std::vector<ErrorMassQuad>& masses,
                                       const BoundBudget& budget) {
  budget.validate();
  ConfusionBounds out;
  const double n = static_cast<double>(budget.n);
  out.root_term = std::sqrt(
      (std::log(24.0 * static_cast<double>(budget.cover_size) / budget.delta) +
       2.0 * std::log(budget.num_classes)) /
      (2.0 * n));
  const double floor_term = 3.0 * out.root_term;
  for (const auto& m : masses) {
    for (double v : {m.tne, m.fne, m.fpe, m.tpe}) {
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("error masses must lie in [0,1]");
    }
    ClassConfusionBound b;
    b.tn = 3.0 * m.tne + floor_term;
    b.fn = 3.0 * m.fne + floor_term;
    b.fp = 3.0 * m.fpe + floor_term;
    b.tp = 3.0 * m.tpe + floor_term;
    b.vacuous = std::max({b.tn, b.fn, b.fp, b.tp}) >= 1.0;
    out.per_class.push_back(b);
  }
  return out;
}

MetricBounds metric_error_bounds(const ConfusionMatrix& population, const ConfusionBounds& bounds) {
  if (bounds.per_class.size() != population.per_class().size()) {
    throw InvalidArgument("metric_error_bounds: class count mismatch");
  }
  const auto report = precision_recall_f1(population);
  MetricBounds out;
  double total = 0.0;
  int counted = 0;
  for (std::size_t c = 0; c < bounds.per_class.size(); ++c) {
    const auto& cm = population.per_class()[c];
    const auto& e = bounds.per_class[c];
    ClassMetricBound mb;
    const double prec_den = cm.tp + cm.fp - e.tp - e.fp;
    if (prec_den > 0.0) mb.precision = 3.0 * (e.tp + e.fp) / prec_den;
    const double rec_den = cm.tp + cm.fn - e.tp - e.fn;
    if (rec_den > 0.0) mb.recall = 3.0 * (e.tp + e.fn) / rec_den;
    if (mb.precision && mb.recall) {
      const double f1_den = report.precision[c] + report.recall[c] - *mb.precision - *mb.recall;
      if (f1_den > 0.0) mb.f1 = 9.0 * (*mb.precision + *mb.recall) / f1_den;
    }
    if (mb.f1) {
      total += *mb.f1;
      ++counted;
    } else {
      out.warnings.push_back("class " + std::to_string(c + 1) +
                             ": F1 bound not applicable (nonpositive denominator)");
    }
    out.per_class.push_back(mb);
  }
  if (counted > 0) out.macro_f1 = total / counted;
  return out;
}

}  // namespace wknn
