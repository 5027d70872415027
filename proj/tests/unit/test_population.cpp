#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wknn/population.hpp"

using namespace wknn;
using nlohmann::json;

namespace {

const json kThreeClassSpec = json::parse(R"({
  "name": "three-class-json",
  "eta": [
    {"mul": [{"exp": {"mul": [-2, "x"]}}, {"pow": [{"cos": {"mul": [4, "pi", "x"]}}, 2]}]},
    {"mul": [{"poly": [1, -1]}, {"sub": [1, {"eta": 1}]}]},
    {"mul": ["x", {"sub": [1, {"eta": 1}]}]}
  ]
})");

double eta1(double x) {
  const double c = std::cos(4.0 * std::numbers::pi * x);
  return std::exp(-2.0 * x) * c * c;
}

// Composite Simpson on [0,1] with m (even) panels.
template <typename F>
double simpson(F f, int m) {
  const double h = 1.0 / m;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("builtin three-class regression") {
  const auto d = SyntheticDistribution::three_class_example();
  CHECK(d.num_classes() == 3);
  CHECK(d.uniform_density());
  for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    const auto eta = d.regression(x);
    CHECK(eta[0] == doctest::Approx(eta1(x)).epsilon(1e-14));
    CHECK(eta[1] == doctest::Approx((1 - x) * (1 - eta1(x))).epsilon(1e-14));
    CHECK(eta[0] + eta[1] + eta[2] == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(SyntheticDistribution::by_name("paper-section5").name() == "three-class");
  CHECK_THROWS_AS(SyntheticDistribution::by_name("nope"), ConfigError);
}

TEST_CASE("json expression reproduces the builtin") {
  const auto j = SyntheticDistribution::from_json(kThreeClassSpec);
  const auto b = SyntheticDistribution::three_class_example();
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    const auto a = j.regression(x);
    const auto e = b.regression(x);
    for (int c = 0; c < 3; ++c) CHECK(a[c] == doctest::Approx(e[c]).epsilon(1e-13));
  }
}

TEST_CASE("expression grammar errors") {
  CHECK_THROWS_AS(Expression::parse(json("y"), 0), ConfigError);
  CHECK_THROWS_AS(Expression::parse(json::parse(R"({"eta": 1})"), 0), ConfigError);
  CHECK_THROWS_AS(Expression::parse(json::parse(R"({"sub": [1]})"), 0), ConfigError);
  CHECK_THROWS_AS(Expression::parse(json::parse(R"({"tan": 1})"), 0), ConfigError);
  CHECK_THROWS_AS(Expression::parse(json::parse(R"({"add": 1, "mul": 2})"), 0), ConfigError);
  const auto e = Expression::parse(json::parse(R"({"div": [{"sqrt": 16}, {"neg": {"log": 1}}]})"), 0);
  CHECK(std::isinf(e.evaluate(0.0, {})));
  const auto p = Expression::parse(json::parse(R"({"poly": [1, 2, 3]})"), 0);
  CHECK(p.evaluate(2.0, {}) == 17.0);
}

TEST_CASE("invalid distributions are rejected") {
  CHECK_THROWS_AS(SyntheticDistribution::from_json(json::parse(R"({"eta": [0.7, 0.7]})")),
                  ConfigError);
  CHECK_THROWS_AS(
      SyntheticDistribution::from_json(json::parse(R"({"eta": [0.5, 0.5], "density": 2})")),
      ConfigError);
  CHECK_NOTHROW(SyntheticDistribution::from_json(
      json::parse(R"({"eta": [0.5, 0.5], "density": {"mul": [2, "x"]}})")));
}

TEST_CASE("marginals against closed form and Simpson") {
  const auto d = SyntheticDistribution::three_class_example();
  const auto p = marginal_probs(d, EvaluationGrid(10000));
  const double e2 = std::exp(-2.0);
  const double pi = std::numbers::pi;
  const double p1 = (1 - e2) / 4.0 + (1 - e2) / (4.0 + 64.0 * pi * pi);
  const double p3 = simpson([](double x) { return x * (1 - eta1(x)); }, 200000);
  CHECK(p[0] == doctest::Approx(p1).epsilon(1e-7));
  CHECK(p[2] == doctest::Approx(p3).epsilon(1e-7));
  CHECK(p[1] == doctest::Approx(1 - p1 - p3).epsilon(1e-7));
}

TEST_CASE("trivial marginals") {
  const auto one = SyntheticDistribution::from_json(json::parse(R"({"eta": [1, 0, 0]})"));
  const auto p = marginal_probs(one, EvaluationGrid(100));
  CHECK(p[0] == 1.0);
  const auto half = SyntheticDistribution::from_json(json::parse(R"({"eta": [0.5, 0.5]})"));
  const auto h = marginal_probs(half, EvaluationGrid(100));
  CHECK(h[0] == doctest::Approx(0.5));
}

TEST_CASE("non-uniform density weights") {
  // density 2x, eta_1 = x: P(Y=1) = integral 2x^2 = 2/3
  const auto d = SyntheticDistribution::from_json(
      json::parse(R"({"eta": ["x", {"poly": [1, -1]}], "density": {"mul": [2, "x"]}})"));
  const auto p = marginal_probs(d, EvaluationGrid(10000));
  CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("population confusion on constant regression") {
  const auto d = SyntheticDistribution::from_json(json::parse(R"({"eta": [0.6, 0.4]})"));
  const auto cm = population_confusion(d, WeightVector({1, 1}), EvaluationGrid(1000));
  CHECK(cm.at_class(1).tp == doctest::Approx(0.6));
  CHECK(cm.at_class(1).fp == doctest::Approx(0.4));
  CHECK(cm.at_class(1).tn == 0.0);
  CHECK(cm.at_class(1).fn == 0.0);
  CHECK(cm.at_class(2).tn == doctest::Approx(0.6));
  CHECK(cm.kind() == ConfusionKind::population);
}

TEST_CASE("zero weight class is never positive") {
  const auto d = SyntheticDistribution::three_class_example();
  const auto cm = population_confusion(d, WeightVector({0.0, 0.5, 0.5}), EvaluationGrid(2000));
  CHECK(cm.at_class(1).tp < 1e-3);
}

TEST_CASE("population confusion matches a direct quadrature") {
  const auto d = SyntheticDistribution::three_class_example();
  const WeightVector q({0.5, 0.3, 0.2});
  const auto cm = population_confusion(d, q, EvaluationGrid(10000));
  double tp = 0, fp = 0;
  for (int i = 0; i < 10000; ++i) {
    const double x = (i + 0.5) / 10000.0;
    const double a = eta1(x), b = (1 - x) * (1 - a), c = x * (1 - a);
    if (0.5 * a >= std::max(0.3 * b, 0.2 * c)) {
      tp += a / 10000.0;
      fp += (1 - a) / 10000.0;
    }
  }
  CHECK(cm.at_class(1).tp == doctest::Approx(tp).epsilon(1e-10));
  CHECK(cm.at_class(1).fp == doctest::Approx(fp).epsilon(1e-10));
  for (const auto& r : cm.per_class()) CHECK(r.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("error masses for the three-class cover pair") {
  const auto d = SyntheticDistribution::three_class_example();
  const CoverPair pair{WeightVector({0.52, 0.29, 0.19}), WeightVector({0.48, 0.31, 0.21}), 1};
  const EvaluationGrid grid(1000);

  // independent evaluation of the band with an explicit radius
  auto oracle = [&](double r_lo, double r_hi) {
    double tne = 0, fne = 0;
    for (int i = 0; i < 1000; ++i) {
      const double x = (i + 0.5) / 1000.0;
      const double a = eta1(x), b = (1 - x) * (1 - a), c = x * (1 - a);
      const double lo = std::max(0.29 * b, 0.19 * c) / 0.52 - 0.1 * r_lo;
      const double hi = std::max(0.31 * b, 0.21 * c) / 0.48 + 0.1 * r_hi;
      if (lo <= a && a <= hi) {
        tne += (1 - a) / 1000.0;
        fne += a / 1000.0;
      }
    }
    return std::pair{tne, fne};
  };
  const auto unit = tnfn_error_masses(d, pair, 1, 0.1, grid, BandRadius::unit);
  const auto [ut, uf] = oracle(1.0, 1.0);
  CHECK(unit.tne == doctest::Approx(ut).epsilon(1e-12));
  CHECK(unit.fne == doctest::Approx(uf).epsilon(1e-12));

  const auto thm = tnfn_error_masses(d, pair, 1, 0.1, grid, BandRadius::theorem);
  const auto [tt, tf] = oracle(1.0 + 0.52 / 0.52, 1.0 + 0.48 / 0.48);
  CHECK(thm.tne == doctest::Approx(tt).epsilon(1e-12));
  CHECK(thm.fne == doctest::Approx(tf).epsilon(1e-12));
  CHECK(band_scale(pair.lower, 1) == 2.0);
}

TEST_CASE("band saturation covers the total mass") {
  const auto d = SyntheticDistribution::three_class_example();
  const CoverPair pair{WeightVector({0.52, 0.29, 0.19}), WeightVector({0.48, 0.31, 0.21}), 1};
  const auto m = tnfn_error_masses(d, pair, 1, 10.0, EvaluationGrid(500));
  CHECK(m.tne + m.fne == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("indicator mass equals tne + fne") {
  const auto d = SyntheticDistribution::three_class_example();
  const CoverPair pair{WeightVector({0.52, 0.29, 0.19}), WeightVector({0.48, 0.31, 0.21}), 1};
  const EvaluationGrid grid(1000);
  const auto band = error_band(d, pair, 1, 0.1, grid, BandRadius::unit);
  double count = 0;
  for (int v : band.in_band) count += v;
  const auto m = tnfn_error_masses(d, pair, 1, 0.1, grid, BandRadius::unit);
  CHECK(count / 1000.0 == doctest::Approx(m.tne + m.fne).epsilon(1e-12));
}

TEST_CASE("zero-width band collapses onto the decision threshold") {
  const auto d = SyntheticDistribution::three_class_example();
  const WeightVector q({0.5, 0.3, 0.2});
  const CoverPair pair{q, q, 1};
  const EvaluationGrid grid(10000);
  const auto band = error_band(d, pair, 1, 0.0, grid);
  double tne = 0, fne = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.point(i);
    const double a = eta1(x), b = (1 - x) * (1 - a), c = x * (1 - a);
    const double t = std::max(0.3 * b, 0.2 * c) / 0.5;
    CHECK(band.lower[i] == doctest::Approx(t).epsilon(1e-14));
    CHECK(band.upper[i] == band.lower[i]);
    if (a == t) {
      tne += (1 - a) / 10000.0;
      fne += a / 10000.0;
    }
  }
  const auto m = tnfn_error_masses(d, pair, 1, 0.0, grid);
  CHECK(m.tne == tne);
  CHECK(m.fne == fne);
}

TEST_CASE("sampling is deterministic and matches marginals") {
  const auto d = SyntheticDistribution::three_class_example();
  CHECK(sample(d, 50, 9) == sample(d, 50, 9));
  CHECK_FALSE(sample(d, 50, 9) == sample(d, 50, 10));
  const auto big = sample(d, 100000, 1);
  const auto p = marginal_probs(d, EvaluationGrid(10000));
  std::vector<double> freq(3, 0.0);
  for (auto y : big.labels()) freq[static_cast<std::size_t>(y - 1)] += 1e-5;
  for (int c = 0; c < 3; ++c) CHECK(std::abs(freq[c] - p[c]) < 0.01);

  const auto onehot = SyntheticDistribution::from_json(json::parse(R"({"eta": [0, 1]})"));
  const auto all_two = sample(onehot, 100, 3);
  for (auto y : all_two.labels()) CHECK(y == 2);
}

TEST_CASE("rejection sampling follows the density") {
  const auto d = SyntheticDistribution::from_json(
      json::parse(R"({"eta": [0.5, 0.5], "density": {"mul": [2, "x"]}})"));
  const auto s = sample(d, 20000, 4);
  double mean = 0;
  for (std::size_t i = 0; i < s.size(); ++i) mean += s.features()(i, 0) / 20000.0;
  CHECK(mean == doctest::Approx(2.0 / 3.0).epsilon(0.01));
}
