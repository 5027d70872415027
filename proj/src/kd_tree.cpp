#include "wknn/kd_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wknn {

double to_distance(double reduced, Metric metric) {
  return metric == Metric::euclidean ? std::sqrt(reduced) : reduced;
}

KdTree::KdTree(const FeatureMatrix& points, Metric metric, std::size_t leaf_size)
    : dim_(points.cols()), metric_(metric), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  order_.resize(points.rows());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!order_.empty()) build(points, 0, order_.size());
  coords_.reserve(points.rows() * dim_);
  for (auto i : order_) {
    auto r = points.row(i);
    coords_.insert(coords_.end(), r.begin(), r.end());
  }
}

int KdTree::build(const FeatureMatrix& points, std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= leaf_size_ || dim_ == 0) return id;

  std::size_t axis = 0;
  double widest = -1.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    double lo = points(order_[begin], j);
    double hi = lo;
    for (std::size_t p = begin + 1; p < end; ++p) {
      const double v = points(order_[p], j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = j;
    }
  }
  if (widest <= 0.0) return id;  // all points identical: keep as a leaf

  const std::size_t mid = begin + (end - begin) / 2;
  auto first = order_.begin() + static_cast<std::ptrdiff_t>(begin);
  std::nth_element(first, order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return points(a, axis) < points(b, axis); });
  const double split = points(order_[mid], axis);

  const int left = build(points, begin, mid);
  const int right = build(points, mid, end);
  nodes_[static_cast<std::size_t>(id)].axis = axis;
  nodes_[static_cast<std::size_t>(id)].split = split;
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

void KdTree::search(int node_id, std::span<const double> x, std::size_t k,
                    std::vector<std::pair<double, std::size_t>>& heap) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.left < 0) {
    for (std::size_t p = node.begin; p < node.end; ++p) {
      std::span<const double> row(coords_.data() + p * dim_, dim_);
      std::pair<double, std::size_t> cand{reduced_distance(row, x, metric_), order_[p]};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  const double gap = x[node.axis] - node.split;
  const int near = gap < 0 ? node.left : node.right;
  const int far = gap < 0 ? node.right : node.left;
  search(near, x, k, heap);
  // Equal bounds still descend: the far side may hold an equidistant row
  // with a smaller index.
  if (heap.size() < k || reduced_axis_gap(gap, metric_) <= heap.front().first) {
    search(far, x, k, heap);
  }
}

std::vector<std::pair<double, std::size_t>> KdTree::query(std::span<const double> x,
                                                          std::size_t k) const {
  std::vector<std::pair<double, std::size_t>> heap;
  k = std::min(k, order_.size());
  if (k == 0) return heap;
  heap.reserve(k);
  search(0, x, k, heap);
  std::sort_heap(heap.begin(), heap.end());
  return heap;
}

}  // namespace wknn
