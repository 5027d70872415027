#include "wknn/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace wknn {

ConfusionMatrix::ConfusionMatrix(std::vector<ClassConfusion> per_class, ConfusionKind kind)
    : per_class_(std::move(per_class)), kind_(kind) {
  if (per_class_.empty()) throw InvalidArgument("confusion matrix: no classes");
  for (std::size_t c = 0; c < per_class_.size(); ++c) {
    const auto& e = per_class_[c];
    for (double v : {e.tn, e.fn, e.fp, e.tp}) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidArgument("confusion matrix: entry outside [0,1] for class " +
                              std::to_string(c + 1));
      }
    }
    if (std::abs(e.sum() - 1.0) > kProbabilitySumTolerance) {
      throw InvalidArgument("confusion matrix: class " + std::to_string(c + 1) +
                            " entries sum to " + std::to_string(e.sum()));
    }
  }
}

namespace {

std::vector<ClassConfusion> normalize_counts(const std::vector<ClassCounts>& counts,
                                             std::size_t total) {
  if (total == 0) throw DegenerateInput("confusion matrix: zero samples");
  const double n = static_cast<double>(total);
  std::vector<ClassConfusion> out;
  out.reserve(counts.size());
  for (const auto& c : counts) {
    if (c.sum() != total) throw InvalidArgument("confusion matrix: counts do not cover samples");
    out.push_back({static_cast<double>(c.tn) / n, static_cast<double>(c.fn) / n,
                   static_cast<double>(c.fp) / n, static_cast<double>(c.tp) / n});
  }
  return out;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<ClassCounts> counts, std::size_t total)
    : ConfusionMatrix(normalize_counts(counts, total), ConfusionKind::empirical) {
  counts_ = std::move(counts);
  total_ = total;
}

std::vector<ClassCounts> empirical_confusion_counts(const RegressionTable& eta_hat,
                                                    std::span<const ClassLabel> labels,
                                                    const WeightVector& q) {
  if (labels.empty()) throw DegenerateInput("empirical_confusion: empty dataset");
  if (eta_hat.rows != labels.size()) {
    throw InvalidArgument("empirical_confusion: " + std::to_string(eta_hat.rows) +
                          " estimates for " + std::to_string(labels.size()) + " labels");
  }
  const auto num_classes = static_cast<std::size_t>(eta_hat.num_classes);
  if (q.size() != num_classes) {
    throw InvalidArgument("empirical_confusion: weight dimension does not match classes");
  }
  std::vector<ClassCounts> counts(num_classes);
  std::vector<double> score(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto eta = eta_hat.row(i);
    // The best and second-best scores give max_{j != c} for every c.
    std::size_t top = 0;
    double first = -std::numeric_limits<double>::infinity();
    double second = first;
    for (std::size_t c = 0; c < num_classes; ++c) {
      score[c] = q[c] * eta[c];
      if (score[c] > first) {
        second = first;
        first = score[c];
        top = c;
      } else if (score[c] > second) {
        second = score[c];
      }
    }
    const auto y = static_cast<std::size_t>(labels[i] - 1);
    if (y >= num_classes) throw InvalidArgument("empirical_confusion: label out of range");
    for (std::size_t c = 0; c < num_classes; ++c) {
      const double others = c == top ? second : first;
      const bool positive = score[c] >= others;
      auto& k = counts[c];
      if (c == y) {
        positive ? ++k.tp : ++k.fn;
      } else {
        positive ? ++k.fp : ++k.tn;
      }
    }
  }
  return counts;
}

ConfusionMatrix empirical_confusion(const RegressionTable& eta_hat,
                                    std::span<const ClassLabel> labels, const WeightVector& q) {
  return ConfusionMatrix(empirical_confusion_counts(eta_hat, labels, q), labels.size());
}

ConfusionMatrix empirical_confusion(const KnnModel& model, const WeightVector& q,
                                    const Dataset& data, unsigned threads) {
  if (data.num_classes() != model.num_classes()) {
    throw InvalidArgument("empirical_confusion: class count mismatch");
  }
  const auto table = knn_regress_batch(model, data.features(), threads);
  return empirical_confusion(table, data.labels(), q);
}

MetricReport precision_recall_f1(const ConfusionMatrix& cm) {
  MetricReport report;
  double total = 0.0;
  for (const auto& e : cm.per_class()) {
    const double prec_den = e.tp + e.fp;
    const double rec_den = e.tp + e.fn;
    const double prec = prec_den > 0.0 ? e.tp / prec_den : 0.0;
    const double rec = rec_den > 0.0 ? e.tp / rec_den : 0.0;
    const double f1 = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    report.precision.push_back(prec);
    report.recall.push_back(rec);
    report.f1.push_back(f1);
    total += f1;
  }
  report.macro_f1 = total / static_cast<double>(cm.num_classes());
  return report;
}

double macro_f1(const ConfusionMatrix& cm) { return precision_recall_f1(cm).macro_f1; }

std::vector<ClassConfusion> matrix_deviation(const ConfusionMatrix& a, const ConfusionMatrix& b) {
  if (a.num_classes() != b.num_classes()) {
    throw InvalidArgument("matrix_deviation: class count mismatch");
  }
  std::vector<ClassConfusion> out;
  out.reserve(a.per_class().size());
  for (std::size_t c = 0; c < a.per_class().size(); ++c) {
    const auto& x = a.per_class()[c];
    const auto& y = b.per_class()[c];
    out.push_back({std::abs(x.tn - y.tn), std::abs(x.fn - y.fn), std::abs(x.fp - y.fp),
                   std::abs(x.tp - y.tp)});
  }
  return out;
}

}  // namespace wknn
