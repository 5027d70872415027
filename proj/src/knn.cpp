#include "wknn/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wknn/kd_tree.hpp"
#include "wknn/parallel.hpp"

namespace wknn {

Metric parse_metric(const std::string& name) {
  if (name == "euclidean" || name == "l2") return Metric::euclidean;
  if (name == "manhattan" || name == "l1") return Metric::manhattan;
  throw ConfigError("unknown metric '" + name + "'");
}

std::string to_string(Metric m) { return m == Metric::euclidean ? "euclidean" : "manhattan"; }

KnnModel::KnnModel(Dataset training, int k, Metric metric, SearchStrategy strategy)
    : training_(std::move(training)), k_(k), metric_(metric), strategy_(strategy) {
  if (k_ < 1 || static_cast<std::size_t>(k_) > training_.size()) {
    throw InvalidArgument("knn: k=" + std::to_string(k_) + " outside 1.." +
                          std::to_string(training_.size()));
  }
  const bool tree = strategy_ == SearchStrategy::kd_tree ||
                    (strategy_ == SearchStrategy::automatic && training_.dimension() <= 8);
  if (tree) tree_ = std::make_unique<KdTree>(training_.features(), metric_);
}

KnnModel::~KnnModel() = default;
KnnModel::KnnModel(KnnModel&&) noexcept = default;
KnnModel& KnnModel::operator=(KnnModel&&) noexcept = default;

KnnModel KnnModel::with_k(int k) const { return KnnModel(training_, k, metric_, strategy_); }

NeighborSet nearest_neighbors_brute_force(const Dataset& training, int k, Metric metric,
                                          std::span<const double> x) {
  if (x.size() != training.dimension()) {
    throw InvalidArgument("nearest_neighbors: query has dimension " + std::to_string(x.size()) +
                          ", training has " + std::to_string(training.dimension()));
  }
  if (k < 1 || static_cast<std::size_t>(k) > training.size()) {
    throw InvalidArgument("nearest_neighbors: k out of range");
  }
  std::vector<std::pair<double, std::size_t>> all(training.size());
  for (std::size_t i = 0; i < training.size(); ++i) {
    all[i] = {reduced_distance(training.features().row(i), x, metric), i};
  }
  const auto kk = static_cast<std::size_t>(k);
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(kk), all.end());
  NeighborSet out;
  out.indices.reserve(kk);
  out.distances.reserve(kk);
  for (std::size_t i = 0; i < kk; ++i) {
    out.indices.push_back(all[i].second);
    out.distances.push_back(to_distance(all[i].first, metric));
  }
  return out;
}

NeighborSet nearest_neighbors(const KnnModel& model, std::span<const double> x) {
  if (!model.tree_) {
    return nearest_neighbors_brute_force(model.training_, model.k_, model.metric_, x);
  }
  if (x.size() != model.training_.dimension()) {
    throw InvalidArgument("nearest_neighbors: query has dimension " + std::to_string(x.size()) +
                          ", training has " + std::to_string(model.training_.dimension()));
  }
  auto hits = model.tree_->query(x, static_cast<std::size_t>(model.k_));
  NeighborSet out;
  out.indices.reserve(hits.size());
  out.distances.reserve(hits.size());
  for (const auto& [reduced, index] : hits) {
    out.indices.push_back(index);
    out.distances.push_back(to_distance(reduced, model.metric_));
  }
  return out;
}

namespace {

void regress_into(const KnnModel& model, std::span<const double> x, std::span<double> out) {
  const auto neighbors = nearest_neighbors(model, x);
  std::vector<int> counts(out.size(), 0);
  const auto& labels = model.training().labels();
  for (auto i : neighbors.indices) ++counts[static_cast<std::size_t>(labels[i] - 1)];
  const double k = model.k();
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = counts[c] / k;
}

}  // namespace

ProbabilityVector knn_regress(const KnnModel& model, std::span<const double> x) {
  std::vector<double> eta(static_cast<std::size_t>(model.num_classes()));
  regress_into(model, x, eta);
  return ProbabilityVector(std::move(eta));
}

RegressionTable knn_regress_batch(const KnnModel& model, const FeatureMatrix& queries,
                                  unsigned threads) {
  if (!queries.empty() && queries.cols() != model.training().dimension()) {
    throw InvalidArgument("knn_regress_batch: query dimension mismatch");
  }
  RegressionTable table;
  table.rows = queries.rows();
  table.num_classes = model.num_classes();
  const auto c = static_cast<std::size_t>(table.num_classes);
  table.values.assign(table.rows * c, 0.0);
  parallel_for(table.rows, threads, [&](std::size_t i) {
    regress_into(model, queries.row(i), std::span<double>(table.values.data() + i * c, c));
  });
  return table;
}

ClassLabel weighted_argmax(std::span<const double> eta, const WeightVector& q) {
  if (eta.size() != q.size()) {
    throw InvalidArgument("weighted_argmax: weight dimension " + std::to_string(q.size()) +
                          " does not match " + std::to_string(eta.size()) + " classes");
  }
  std::size_t best = 0;
  double best_score = q[0] * eta[0];
  for (std::size_t c = 1; c < eta.size(); ++c) {
    const double score = q[c] * eta[c];
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return static_cast<ClassLabel>(best + 1);
}

ClassLabel classify_weighted(const KnnModel& model, const WeightVector& q,
                             std::span<const double> x) {
  if (q.size() != static_cast<std::size_t>(model.num_classes())) {
    throw InvalidArgument("classify_weighted: weight vector has wrong dimension");
  }
  const auto eta = knn_regress(model, x);
  return weighted_argmax(eta.values(), q);
}

std::vector<ClassLabel> classify_batch(const KnnModel& model, const WeightVector& q,
                                       const FeatureMatrix& queries, unsigned threads) {
  if (q.size() != static_cast<std::size_t>(model.num_classes())) {
    throw InvalidArgument("classify_batch: weight vector has wrong dimension");
  }
  std::vector<ClassLabel> out(queries.rows());
  if (queries.empty()) return out;
  const auto table = knn_regress_batch(model, queries, threads);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = weighted_argmax(table.row(i), q);
  return out;
}

KRule parse_k_rule(const std::string& name) {
  if (name == "cube-root" || name == "cube_root") return KRule::cube_root;
  if (name == "rate-optimal" || name == "rate_optimal") return KRule::rate_optimal;
  throw ConfigError("unknown k rule '" + name + "'");
}

int suggest_k(long long n, double alpha, int d, KRule rule) {
  if (n < 1) throw InvalidArgument("suggest_k: n must be positive");
  if (!(alpha > 0.0)) throw InvalidArgument("suggest_k: alpha must be positive");
  if (d < 1) throw InvalidArgument("suggest_k: d must be positive");
  const double nd = static_cast<double>(n);
  double k = 0.0;
  if (rule == KRule::cube_root) {
    k = std::round(5.0 * std::cbrt(nd));
  } else {
    const double denom = 2.0 * alpha + d;
    k = std::round(std::pow(nd, 2.0 * alpha / denom) * std::pow(std::log(nd), d / denom));
  }
  k = std::clamp(k, 1.0, nd);
  return static_cast<int>(k);
}

}  // namespace wknn
