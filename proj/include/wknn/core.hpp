#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wknn {

// Error hierarchy. The CLI maps ConfigError/InvalidArgument to exit code 2
// and FormatError/DegenerateInput to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class InfeasibleBudget : public Error {
 public:
  using Error::Error;
};

class OptimizationError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Tolerance on the sum of a probability vector.
inline constexpr double kProbabilitySumTolerance = 1e-9;

/// Row-major n x d feature matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols);
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

  const std::vector<double>& values() const { return values_; }

  void append_row(std::span<const double> r);

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Class index, 1-based on every public surface.
using ClassLabel = int;

/// Labeled sample: features plus labels in {1..C}.
class Dataset {
 public:
  Dataset(FeatureMatrix features, std::vector<ClassLabel> labels, int num_classes);

  const FeatureMatrix& features() const { return features_; }
  const std::vector<ClassLabel>& labels() const { return labels_; }
  int num_classes() const { return num_classes_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t dimension() const { return features_.cols(); }

  /// Rows [first, first + count) as a new dataset with the same C.
  Dataset slice(std::size_t first, std::size_t count) const;
  /// Rows at the given indices, in order.
  Dataset subset(std::span<const std::size_t> indices) const;

  bool operator==(const Dataset&) const = default;

 private:
  FeatureMatrix features_;
  std::vector<ClassLabel> labels_;
  int num_classes_;
};

/// Nonnegative class weights q; at least one entry positive.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> q);

  std::size_t size() const { return q_.size(); }
  double operator[](std::size_t i) const { return q_[i]; }
  /// 1-based accessor.
  double at_class(ClassLabel c) const { return q_.at(static_cast<std::size_t>(c - 1)); }
  double max() const { return max_; }
  const std::vector<double>& values() const { return q_; }

  WeightVector scaled(double lambda) const;

  bool operator==(const WeightVector& o) const { return q_ == o.q_; }

  /// (1/C, ..., 1/C).
  static WeightVector uniform(int num_classes);

 private:
  std::vector<double> q_;
  double max_ = 0.0;
};

/// Element of the probability simplex.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> p);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const { return p_; }

  bool operator==(const ProbabilityVector& o) const { return p_ == o.p_; }

 private:
  std::vector<double> p_;
};

/// Bracketing weights (q', q'') for one target class.
struct CoverPair {
  WeightVector lower;   // q'
  WeightVector upper;   // q''
  ClassLabel target_class;
};

/// True iff q is class-c covered by (pair.lower, pair.upper): q_c < q'_c,
/// q_j > q'_j for j != c, q_c > q''_c and q_j < q''_j for j != c.
bool is_class_covered(const WeightVector& q, const CoverPair& pair, ClassLabel c);

/// v / sum(v). Throws DegenerateInput on an all-zero vector.
ProbabilityVector normalize_to_simplex(std::span<const double> v);

}  // namespace wknn
