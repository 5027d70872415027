#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "wknn/core.hpp"
#include "wknn/knn.hpp"

namespace wknn {

/// Monotone surrogate of the metric: squared l2 for euclidean, l1 for
/// manhattan. Coordinates are accumulated in index order so every caller
/// gets bit-identical values.
inline double reduced_distance(std::span<const double> a, std::span<const double> b,
                               Metric metric) {
  double acc = 0.0;
  if (metric == Metric::euclidean) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double diff = a[j] - b[j];
      acc += diff * diff;
    }
  } else {
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double diff = a[j] - b[j];
      acc += diff < 0 ? -diff : diff;
    }
  }
  return acc;
}

/// Lower bound contributed by a single coordinate gap.
inline double reduced_axis_gap(double gap, Metric metric) {
  return metric == Metric::euclidean ? gap * gap : (gap < 0 ? -gap : gap);
}

double to_distance(double reduced, Metric metric);

/// Exact kd-tree over the rows of a feature matrix. Queries return the same
/// (reduced distance, index) list as a full sort, including index tie-breaks.
class KdTree {
 public:
  KdTree(const FeatureMatrix& points, Metric metric, std::size_t leaf_size = 16);

  /// k smallest (reduced distance, row index) pairs in lexicographic order.
  std::vector<std::pair<double, std::size_t>> query(std::span<const double> x,
                                                    std::size_t k) const;

 private:
  struct Node {
    std::size_t begin = 0;  // into order_
    std::size_t end = 0;
    std::size_t axis = 0;
    double split = 0.0;
    int left = -1;
    int right = -1;
  };

  int build(const FeatureMatrix& points, std::size_t begin, std::size_t end);
  void search(int node, std::span<const double> x, std::size_t k,
              std::vector<std::pair<double, std::size_t>>& heap) const;

  std::size_t dim_;
  Metric metric_;
  std::size_t leaf_size_;
  std::vector<std::size_t> order_;  // tree position -> original row
  std::vector<double> coords_;      // rows copied in tree order
  std::vector<Node> nodes_;
};

}  // namespace wknn
