#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wknn/knn.hpp"
#include "wknn/random.hpp"

using namespace wknn;

namespace {

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t d, int classes, bool lattice) {
  FeatureMatrix f(n, d);
  std::vector<ClassLabel> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      // lattice coordinates force many exact distance ties
      f(i, j) = lattice ? std::floor(uniform01(rng) * 4.0) : uniform01(rng);
    }
    y[i] = 1 + static_cast<int>(uniform01(rng) * classes);
  }
  return Dataset(std::move(f), std::move(y), classes);
}

// Sort every training row by (distance, index) from scratch.
std::vector<std::size_t> oracle_neighbors(const Dataset& data, int k, Metric metric,
                                          const std::vector<double>& x) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = data.features()(i, j) - x[j];
      s += metric == Metric::euclidean ? diff * diff : std::abs(diff);
    }
    all.emplace_back(s, i);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> out;
  for (int i = 0; i < k; ++i) out.push_back(all[static_cast<std::size_t>(i)].second);
  return out;
}

}  // namespace

TEST_CASE("metric and k-rule parsing") {
  CHECK(parse_metric("euclidean") == Metric::euclidean);
  CHECK(parse_metric("manhattan") == Metric::manhattan);
  CHECK_THROWS_AS(parse_metric("cosine"), ConfigError);
  CHECK(parse_k_rule("cube-root") == KRule::cube_root);
  CHECK_THROWS_AS(parse_k_rule("sqrt"), ConfigError);
}

TEST_CASE("suggest_k") {
  CHECK(suggest_k(1000, 1.0, 1, KRule::cube_root) == 50);
  CHECK(suggest_k(100, 1.0, 1, KRule::cube_root) == 23);
  CHECK(suggest_k(10, 1.0, 1, KRule::cube_root) == 10);  // capped at n
  CHECK(suggest_k(10000, 1.0, 1, KRule::cube_root) == 108);
  // n^{2/3} (log n)^{1/3} for alpha = d = 1
  const double n = 1000.0;
  CHECK(suggest_k(1000, 1.0, 1, KRule::rate_optimal) ==
        static_cast<int>(std::lround(std::pow(n, 2.0 / 3.0) * std::cbrt(std::log(n)))));
  CHECK_THROWS_AS(suggest_k(0, 1.0, 1, KRule::cube_root), InvalidArgument);
}

TEST_CASE("model validates k") {
  FeatureMatrix f(3, 1, {0, 1, 2});
  Dataset d(f, {1, 2, 1}, 2);
  CHECK_THROWS_AS(KnnModel(d, 0), InvalidArgument);
  CHECK_THROWS_AS(KnnModel(d, 4), InvalidArgument);
  CHECK_NOTHROW(KnnModel(d, 3));
}

TEST_CASE("ties on distance go to the smaller index") {
  FeatureMatrix f(4, 1, {1.0, -1.0, 1.0, 3.0});
  Dataset d(f, {1, 2, 2, 1}, 2);
  const std::vector<double> x{0.0};
  for (auto s : {SearchStrategy::brute_force, SearchStrategy::kd_tree}) {
    KnnModel m(d, 2, Metric::euclidean, s);
    auto nb = nearest_neighbors(m, x);
    CHECK(nb.indices == std::vector<std::size_t>{0, 1});
    CHECK(nb.distances[0] == 1.0);
  }
}

TEST_CASE("tree and brute force agree with an independent sort") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 60);
    const std::size_t d = 1 + static_cast<std::size_t>(uniform01(rng) * 3);
    const bool lattice = trial % 2 == 0;
    const auto data = random_dataset(rng, n, d, 3, lattice);
    const int k = 1 + static_cast<int>(uniform01(rng) * static_cast<double>(n));
    const Metric metric = trial % 3 == 0 ? Metric::manhattan : Metric::euclidean;
    KnnModel tree(data, k, metric, SearchStrategy::kd_tree);
    KnnModel brute(data, k, metric, SearchStrategy::brute_force);
    std::vector<double> x(d);
    for (auto& v : x) v = lattice ? std::floor(uniform01(rng) * 4.0) : uniform01(rng);
    const auto expected = oracle_neighbors(data, k, metric, x);
    CHECK(nearest_neighbors(tree, x).indices == expected);
    CHECK(nearest_neighbors(brute, x).indices == expected);
    CHECK(nearest_neighbors_brute_force(data, k, metric, x).indices == expected);
  }
}

TEST_CASE("distances are true metric values") {
  FeatureMatrix f(1, 2, {3.0, 4.0});
  Dataset d(f, {1}, 2);
  const std::vector<double> x{0.0, 0.0};
  CHECK(nearest_neighbors(KnnModel(d, 1), x).distances[0] == 5.0);
  CHECK(nearest_neighbors(KnnModel(d, 1, Metric::manhattan), x).distances[0] == 7.0);
}

TEST_CASE("regression estimate counts over exactly k") {
  FeatureMatrix f(5, 1, {0, 1, 2, 3, 4});
  Dataset d(f, {1, 1, 2, 3, 3}, 3);
  KnnModel m(d, 4);
  const std::vector<double> x{0.4};
  auto p = knn_regress(m, x);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.25);
  CHECK(p[2] == 0.25);
  auto table = knn_regress_batch(m, d.features(), 2);
  CHECK(table.rows == 5);
  CHECK(table.row(0)[0] == 0.5);
}

TEST_CASE("weighted argmax") {
  const std::vector<double> eta{0.4, 0.35, 0.25};
  CHECK(weighted_argmax(eta, WeightVector({1, 1, 1})) == 1);
  CHECK(weighted_argmax(eta, WeightVector({0.2, 0.3, 0.5})) == 3);
  // exact tie goes to the smaller class
  const std::vector<double> tie{0.5, 0.5};
  CHECK(weighted_argmax(tie, WeightVector({1, 1})) == 1);
  CHECK_THROWS_AS(weighted_argmax(tie, WeightVector({1, 1, 1})), InvalidArgument);
}

TEST_CASE("batch classification matches per-query and is thread independent") {
  Rng rng(3);
  const auto data = random_dataset(rng, 200, 2, 4, false);
  KnnModel m(data, 9);
  const WeightVector q({0.1, 0.4, 0.3, 0.2});
  auto one = classify_batch(m, q, data.features(), 1);
  auto four = classify_batch(m, q, data.features(), 4);
  CHECK(one == four);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(one[i] == classify_weighted(m, q, data.features().row(i)));
  }
}

TEST_CASE("moved model still answers") {
  Rng rng(5);
  const auto data = random_dataset(rng, 100, 1, 3, false);
  KnnModel a(data, 5, Metric::euclidean, SearchStrategy::kd_tree);
  const std::vector<double> x{0.5};
  const auto before = nearest_neighbors(a, x).indices;
  KnnModel b = std::move(a);
  CHECK(nearest_neighbors(b, x).indices == before);
  CHECK(nearest_neighbors(b.with_k(7), x).indices.size() == 7);
}
