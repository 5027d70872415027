#include <doctest.h>

#include <algorithm>

#include "wknn/metrics.hpp"
#include "wknn/random.hpp"

using namespace wknn;

namespace {

RegressionTable table_from(std::vector<std::vector<double>> rows) {
  RegressionTable t;
  t.rows = rows.size();
  t.num_classes = static_cast<int>(rows.front().size());
  for (const auto& r : rows) t.values.insert(t.values.end(), r.begin(), r.end());
  return t;
}

}  // namespace

TEST_CASE("hand-checked confusion counts") {
  // scores q*eta: row0 -> class1, row1 -> class2, row2 -> tie 1/2, row3 -> class3
  const auto eta = table_from({{0.6, 0.2, 0.2}, {0.2, 0.6, 0.2}, {0.4, 0.4, 0.2}, {0.1, 0.1, 0.8}});
  const std::vector<ClassLabel> y{1, 1, 2, 3};
  const WeightVector q({1, 1, 1});
  auto counts = empirical_confusion_counts(eta, y, q);
  // class 1 predicted positive on rows 0 and 2
  CHECK(counts[0] == ClassCounts{1, 1, 1, 1});
  // class 2 predicted positive on rows 1 and 2
  CHECK(counts[1] == ClassCounts{2, 0, 1, 1});
  CHECK(counts[2] == ClassCounts{3, 0, 0, 1});
  auto cm = empirical_confusion(eta, y, q);
  CHECK(cm.at_class(1).tp == 0.25);
  CHECK(cm.sample_count() == 4);
  CHECK(cm.kind() == ConfusionKind::empirical);
}

TEST_CASE("count rows cover every sample on random tables") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int C = 2 + static_cast<int>(uniform01(rng) * 5);
    const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 300);
    RegressionTable t;
    t.rows = n;
    t.num_classes = C;
    std::vector<ClassLabel> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // multiples of 1/5 so ties occur
      std::vector<double> r(static_cast<std::size_t>(C));
      int left = 5;
      for (int c = 0; c < C - 1; ++c) {
        const int take = static_cast<int>(uniform01(rng) * (left + 1));
        r[static_cast<std::size_t>(c)] = take / 5.0;
        left -= take;
      }
      r.back() = left / 5.0;
      t.values.insert(t.values.end(), r.begin(), r.end());
      y[i] = 1 + static_cast<int>(uniform01(rng) * C);
    }
    std::vector<double> qv(static_cast<std::size_t>(C));
    for (auto& v : qv) v = 0.05 + uniform01(rng);
    const auto cm = empirical_confusion(t, y, WeightVector(qv));
    for (const auto& c : *cm.counts()) CHECK(c.sum() == n);
    for (const auto& c : cm.per_class()) CHECK(c.sum() == doctest::Approx(1.0).epsilon(1e-15));

    // oracle: direct indicator per row and class
    for (int c = 0; c < C; ++c) {
      std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = t.row(i);
        double best_other = -1.0;
        for (int j = 0; j < C; ++j) {
          if (j != c) best_other = std::max(best_other, qv[static_cast<std::size_t>(j)] * row[static_cast<std::size_t>(j)]);
        }
        const bool pos = qv[static_cast<std::size_t>(c)] * row[static_cast<std::size_t>(c)] >= best_other;
        const bool is = y[i] == c + 1;
        tp += pos && is;
        fp += pos && !is;
        fn += !pos && is;
        tn += !pos && !is;
      }
      CHECK((*cm.counts())[static_cast<std::size_t>(c)] == ClassCounts{tn, fn, fp, tp});
    }
  }
}

TEST_CASE("precision recall f1 with zero denominators") {
  ConfusionMatrix cm({{0.5, 0.1, 0.1, 0.3}, {0.9, 0.1, 0.0, 0.0}}, ConfusionKind::population);
  auto r = precision_recall_f1(cm);
  CHECK(r.precision[0] == doctest::Approx(0.75));
  CHECK(r.recall[0] == doctest::Approx(0.75));
  CHECK(r.f1[0] == doctest::Approx(0.75));
  CHECK(r.precision[1] == 0.0);
  CHECK(r.recall[1] == 0.0);
  CHECK(r.f1[1] == 0.0);
  CHECK(r.macro_f1 == doctest::Approx(0.375));
  CHECK(macro_f1(cm) == r.macro_f1);
}

TEST_CASE("matrix validation and deviation") {
  CHECK_THROWS_AS(ConfusionMatrix({{0.5, 0.5, 0.5, 0.0}}, ConfusionKind::population),
                  InvalidArgument);
  CHECK_THROWS_AS(ConfusionMatrix({{1.1, -0.1, 0.0, 0.0}}, ConfusionKind::population),
                  InvalidArgument);
  ConfusionMatrix a({{0.5, 0.1, 0.1, 0.3}}, ConfusionKind::population);
  ConfusionMatrix b({{0.4, 0.2, 0.1, 0.3}}, ConfusionKind::population);
  auto dev = matrix_deviation(a, b);
  CHECK(dev[0].tn == doctest::Approx(0.1));
  CHECK(dev[0].fn == doctest::Approx(0.1));
  CHECK(dev[0].fp == 0.0);
}

TEST_CASE("model overload matches table overload") {
  FeatureMatrix f(6, 1, {0, 1, 2, 3, 4, 5});
  Dataset d(f, {1, 1, 2, 2, 3, 3}, 3);
  KnnModel m(d, 3);
  const WeightVector q({0.2, 0.5, 0.3});
  CHECK(empirical_confusion(m, q, d, 2) ==
        empirical_confusion(knn_regress_batch(m, d.features(), 1), d.labels(), q));
}
