#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wknn/core.hpp"
#include "wknn/knn.hpp"

namespace wknn {

/// One class's normalized (TN, FN, FP, TP).
struct ClassConfusion {
  double tn = 0.0;
  double fn = 0.0;
  double fp = 0.0;
  double tp = 0.0;

  double sum() const { return tn + fn + fp + tp; }
  bool operator==(const ClassConfusion&) const = default;
};

/// Raw per-class counts behind an empirical matrix.
struct ClassCounts {
  std::size_t tn = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t tp = 0;

  std::size_t sum() const { return tn + fn + fp + tp; }
  bool operator==(const ClassCounts&) const = default;
};

enum class ConfusionKind { empirical, population };

class ConfusionMatrix {
 public:
  ConfusionMatrix(std::vector<ClassConfusion> per_class, ConfusionKind kind);
  /// Empirical matrix from integer counts over `total` samples.
  ConfusionMatrix(std::vector<ClassCounts> counts, std::size_t total);

  int num_classes() const { return static_cast<int>(per_class_.size()); }
  const std::vector<ClassConfusion>& per_class() const { return per_class_; }
  const ClassConfusion& at_class(ClassLabel c) const {
    return per_class_.at(static_cast<std::size_t>(c - 1));
  }
  ConfusionKind kind() const { return kind_; }
  /// Present only for empirical matrices built from counts.
  const std::optional<std::vector<ClassCounts>>& counts() const { return counts_; }
  std::size_t sample_count() const { return total_; }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<ClassConfusion> per_class_;
  ConfusionKind kind_;
  std::optional<std::vector<ClassCounts>> counts_;
  std::size_t total_ = 0;
};

struct MetricReport {
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  double macro_f1 = 0.0;
};

/// Per-class counts with the indicator q_c * eta_c >= max_{j != c} q_j * eta_j
/// deciding a positive prediction. Ties are positive for every tied class.
std::vector<ClassCounts> empirical_confusion_counts(const RegressionTable& eta_hat,
                                                    std::span<const ClassLabel> labels,
                                                    const WeightVector& q);

ConfusionMatrix empirical_confusion(const RegressionTable& eta_hat,
                                    std::span<const ClassLabel> labels, const WeightVector& q);

/// Fits nothing: evaluates the model's regression estimate at every row of
/// `data` and counts against its labels.
ConfusionMatrix empirical_confusion(const KnnModel& model, const WeightVector& q,
                                    const Dataset& data, unsigned threads = 0);

/// Standard definitions; any zero denominator yields 0.
MetricReport precision_recall_f1(const ConfusionMatrix& cm);

/// Shortcut for precision_recall_f1(cm).macro_f1.
double macro_f1(const ConfusionMatrix& cm);

/// Entrywise |a - b| per class.
std::vector<ClassConfusion> matrix_deviation(const ConfusionMatrix& a, const ConfusionMatrix& b);

}  // namespace wknn
