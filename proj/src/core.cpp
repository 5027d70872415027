#include "wknn/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wknn {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw InvalidArgument("feature matrix: expected " + std::to_string(rows_ * cols_) +
                          " values, got " + std::to_string(values_.size()));
  }
}

void FeatureMatrix::append_row(std::span<const double> r) {
  if (rows_ == 0 && cols_ == 0) cols_ = r.size();
  if (r.size() != cols_) {
    throw InvalidArgument("feature matrix: row has " + std::to_string(r.size()) +
                          " columns, expected " + std::to_string(cols_));
  }
  values_.insert(values_.end(), r.begin(), r.end());
  ++rows_;
}

Dataset::Dataset(FeatureMatrix features, std::vector<ClassLabel> labels, int num_classes)
    : features_(std::move(features)), labels_(std::move(labels)), num_classes_(num_classes) {
  if (num_classes_ < 2) throw InvalidArgument("dataset: need at least 2 classes");
  if (labels_.empty()) throw DegenerateInput("dataset: no rows");
  if (features_.rows() != labels_.size()) {
    throw InvalidArgument("dataset: " + std::to_string(features_.rows()) + " feature rows but " +
                          std::to_string(labels_.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 1 || labels_[i] > num_classes_) {
      throw InvalidArgument("dataset: label " + std::to_string(labels_[i]) + " at row " +
                            std::to_string(i) + " outside 1.." + std::to_string(num_classes_));
    }
  }
  for (std::size_t k = 0; k < features_.values().size(); ++k) {
    if (!std::isfinite(features_.values()[k])) {
      throw InvalidArgument("dataset: non-finite feature at row " +
                            std::to_string(k / std::max<std::size_t>(features_.cols(), 1)) +
                            ", column " +
                            std::to_string(k % std::max<std::size_t>(features_.cols(), 1)));
    }
  }
}

Dataset Dataset::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw InvalidArgument("dataset slice out of range");
  const auto d = dimension();
  std::vector<double> values(features_.values().begin() + static_cast<std::ptrdiff_t>(first * d),
                             features_.values().begin() +
                                 static_cast<std::ptrdiff_t>((first + count) * d));
  std::vector<ClassLabel> labels(labels_.begin() + static_cast<std::ptrdiff_t>(first),
                                 labels_.begin() + static_cast<std::ptrdiff_t>(first + count));
  return {FeatureMatrix(count, d, std::move(values)), std::move(labels), num_classes_};
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  const auto d = dimension();
  std::vector<double> values;
  values.reserve(indices.size() * d);
  std::vector<ClassLabel> labels;
  labels.reserve(indices.size());
  for (auto i : indices) {
    if (i >= size()) throw InvalidArgument("dataset subset index out of range");
    auto r = features_.row(i);
    values.insert(values.end(), r.begin(), r.end());
    labels.push_back(labels_[i]);
  }
  return {FeatureMatrix(indices.size(), d, std::move(values)), std::move(labels), num_classes_};
}

WeightVector::WeightVector(std::vector<double> q) : q_(std::move(q)) {
  if (q_.empty()) throw InvalidArgument("weight vector: empty");
  for (double v : q_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("weight vector: entries must be finite and nonnegative");
    }
  }
  max_ = *std::max_element(q_.begin(), q_.end());
  if (max_ <= 0.0) throw InvalidArgument("weight vector: all entries are zero");
}

WeightVector WeightVector::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw InvalidArgument("weight vector: scale must be positive");
  std::vector<double> out(q_);
  for (auto& v : out) v *= lambda;
  return WeightVector(std::move(out));
}

WeightVector WeightVector::uniform(int num_classes) {
  if (num_classes < 1) throw InvalidArgument("weight vector: need at least one class");
  return WeightVector(std::vector<double>(static_cast<std::size_t>(num_classes),
                                          1.0 / static_cast<double>(num_classes)));
}

ProbabilityVector::ProbabilityVector(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw InvalidArgument("probability vector: empty");
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("probability vector: entry outside [0,1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
    throw InvalidArgument("probability vector: entries sum to " + std::to_string(sum));
  }
}

bool is_class_covered(const WeightVector& q, const CoverPair& pair, ClassLabel c) {
  const auto dim = q.size();
  if (pair.lower.size() != dim || pair.upper.size() != dim) {
    throw InvalidArgument("is_class_covered: dimension mismatch");
  }
  if (c < 1 || static_cast<std::size_t>(c) > dim) {
    throw InvalidArgument("is_class_covered: class index out of range");
  }
  const auto target = static_cast<std::size_t>(c - 1);
  for (std::size_t j = 0; j < dim; ++j) {
    if (j == target) {
      if (!(q[j] < pair.lower[j] && q[j] > pair.upper[j])) return false;
    } else {
      if (!(q[j] > pair.lower[j] && q[j] < pair.upper[j])) return false;
    }
  }
  return true;
}

ProbabilityVector normalize_to_simplex(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InvalidArgument("normalize_to_simplex: entries must be finite and nonnegative");
    }
    sum += x;
  }
  if (sum <= 0.0) throw DegenerateInput("normalize_to_simplex: all-zero input");
  std::vector<double> out(v.begin(), v.end());
  for (auto& x : out) x /= sum;
  return ProbabilityVector(std::move(out));
}

}  // namespace wknn
