#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wknn/core.hpp"

namespace wknn {

enum class Metric { euclidean, manhattan };

Metric parse_metric(const std::string& name);
std::string to_string(Metric m);

/// How nearest_neighbors finds candidates. Both strategies are exact and
/// return identical results; `automatic` picks the tree for d <= 8.
enum class SearchStrategy { brute_force, kd_tree, automatic };

class KdTree;

struct NeighborSet {
  std::vector<std::size_t> indices;  // nondecreasing distance, ties by index
  std::vector<double> distances;
};

/// Per-query regression estimates, row-major queries x C.
struct RegressionTable {
  std::size_t rows = 0;
  int num_classes = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * static_cast<std::size_t>(num_classes),
            static_cast<std::size_t>(num_classes)};
  }
};

/// Training sample plus neighbor count k. Immutable once built.
class KnnModel {
 public:
  KnnModel(Dataset training, int k, Metric metric = Metric::euclidean,
           SearchStrategy strategy = SearchStrategy::automatic);
  ~KnnModel();
  KnnModel(KnnModel&&) noexcept;
  KnnModel& operator=(KnnModel&&) noexcept;

  const Dataset& training() const { return training_; }
  int k() const { return k_; }
  Metric metric() const { return metric_; }
  int num_classes() const { return training_.num_classes(); }
  bool uses_tree() const { return tree_ != nullptr; }

  /// Same training data and metric, different k; reuses nothing but is cheap
  /// relative to queries.
  KnnModel with_k(int k) const;

 private:
  friend NeighborSet nearest_neighbors(const KnnModel&, std::span<const double>);

  Dataset training_;
  int k_;
  Metric metric_;
  SearchStrategy strategy_;
  std::unique_ptr<KdTree> tree_;
};

/// Exact k nearest training rows; distance ties broken by smaller index.
NeighborSet nearest_neighbors(const KnnModel& model, std::span<const double> x);

/// Reference implementation: full sort of all n distances.
NeighborSet nearest_neighbors_brute_force(const Dataset& training, int k, Metric metric,
                                          std::span<const double> x);

/// Fraction of each class among the k neighbors.
ProbabilityVector knn_regress(const KnnModel& model, std::span<const double> x);

/// knn_regress for every row of `queries`.
RegressionTable knn_regress_batch(const KnnModel& model, const FeatureMatrix& queries,
                                  unsigned threads = 0);

/// argmax_c q_c * eta_c, ties to the smallest class. Returns a 1-based label.
ClassLabel weighted_argmax(std::span<const double> eta, const WeightVector& q);

ClassLabel classify_weighted(const KnnModel& model, const WeightVector& q,
                             std::span<const double> x);

std::vector<ClassLabel> classify_batch(const KnnModel& model, const WeightVector& q,
                                       const FeatureMatrix& queries, unsigned threads = 0);

enum class KRule { cube_root, rate_optimal };

KRule parse_k_rule(const std::string& name);

/// cube_root: min(n, round(5 n^{1/3})). rate_optimal: clamp(round(
/// n^{2a/(2a+d)} (log n)^{d/(2a+d)}), 1, n), constants dropped.
int suggest_k(long long n, double alpha, int d, KRule rule);

}  // namespace wknn
