#include "wknn/population.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wknn/random.hpp"
#include "wknn/summation.hpp"

namespace wknn {

// ---------------------------------------------------------------------------
// Expression grammar

struct Expression::Node {
  enum class Kind { constant, variable, eta_ref, poly, unary, nary, binary, power };
  Kind kind = Kind::constant;
  std::string op;
  double value = 0.0;
  int ref = 0;  // 0-based class index for eta_ref
  std::vector<double> coeffs;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr parse_node(const nlohmann::json& spec, int max_eta_ref) {
  auto node = std::make_shared<Node>();
  if (spec.is_number()) {
    node->kind = Node::Kind::constant;
    node->value = spec.get<double>();
    return node;
  }
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    if (s == "x") {
      node->kind = Node::Kind::variable;
    } else if (s == "pi") {
      node->kind = Node::Kind::constant;
      node->value = std::numbers::pi;
    } else {
      throw ConfigError("expression: unknown symbol '" + s + "'");
    }
    return node;
  }
  if (!spec.is_object() || spec.size() != 1) {
    throw ConfigError("expression: expected a number, \"x\", \"pi\" or a one-key object, got " +
                      spec.dump());
  }
  const auto& [key, arg] = *spec.items().begin();
  static const std::vector<std::string> unary = {"exp", "log", "cos", "sin", "sqrt", "neg"};
  static const std::vector<std::string> nary = {"add", "mul"};
  static const std::vector<std::string> binary = {"sub", "div"};
  if (key == "eta") {
    const int j = arg.get<int>();
    if (j < 1 || j > max_eta_ref) {
      throw ConfigError("expression: eta reference " + std::to_string(j) +
                        " must name an earlier class (1.." + std::to_string(max_eta_ref) + ")");
    }
    node->kind = Node::Kind::eta_ref;
    node->ref = j - 1;
  } else if (key == "poly") {
    if (!arg.is_array() || arg.empty()) throw ConfigError("expression: poly needs coefficients");
    node->kind = Node::Kind::poly;
    node->coeffs = arg.get<std::vector<double>>();
  } else if (std::find(unary.begin(), unary.end(), key) != unary.end()) {
    node->kind = Node::Kind::unary;
    node->op = key;
    node->args.push_back(parse_node(arg, max_eta_ref));
  } else if (std::find(nary.begin(), nary.end(), key) != nary.end()) {
    if (!arg.is_array() || arg.empty()) throw ConfigError("expression: " + key + " needs a list");
    node->kind = Node::Kind::nary;
    node->op = key;
    for (const auto& a : arg) node->args.push_back(parse_node(a, max_eta_ref));
  } else if (std::find(binary.begin(), binary.end(), key) != binary.end() || key == "pow") {
    if (!arg.is_array() || arg.size() != 2) {
      throw ConfigError("expression: " + key + " needs exactly two operands");
    }
    node->kind = key == "pow" ? Node::Kind::power : Node::Kind::binary;
    node->op = key;
    node->args.push_back(parse_node(arg[0], max_eta_ref));
    node->args.push_back(parse_node(arg[1], max_eta_ref));
  } else {
    throw ConfigError("expression: unknown operator '" + key + "'");
  }
  return node;
}

double eval_node(const Node& n, double x, std::span<const double> etas) {
  switch (n.kind) {
    case Node::Kind::constant:
      return n.value;
    case Node::Kind::variable:
      return x;
    case Node::Kind::eta_ref:
      return etas[static_cast<std::size_t>(n.ref)];
    case Node::Kind::poly: {
      double acc = 0.0;
      for (auto it = n.coeffs.rbegin(); it != n.coeffs.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
    case Node::Kind::unary: {
      const double a = eval_node(*n.args[0], x, etas);
      if (n.op == "exp") return std::exp(a);
      if (n.op == "log") return std::log(a);
      if (n.op == "cos") return std::cos(a);
      if (n.op == "sin") return std::sin(a);
      if (n.op == "sqrt") return std::sqrt(a);
      return -a;
    }
    case Node::Kind::nary: {
      double acc = n.op == "add" ? 0.0 : 1.0;
      for (const auto& a : n.args) {
        const double v = eval_node(*a, x, etas);
        acc = n.op == "add" ? acc + v : acc * v;
      }
      return acc;
    }
    case Node::Kind::binary: {
      const double a = eval_node(*n.args[0], x, etas);
      const double b = eval_node(*n.args[1], x, etas);
      return n.op == "sub" ? a - b : a / b;
    }
    case Node::Kind::power:
      return std::pow(eval_node(*n.args[0], x, etas), eval_node(*n.args[1], x, etas));
  }
  return 0.0;
}

constexpr std::size_t kValidationGrid = 10000;
constexpr double kDensityTolerance = 1e-6;

}  // namespace

Expression Expression::parse(const nlohmann::json& spec, int max_eta_ref) {
  return Expression(parse_node(spec, max_eta_ref));
}

double Expression::evaluate(double x, std::span<const double> etas) const {
  return eval_node(*root_, x, etas);
}

// ---------------------------------------------------------------------------
// Distributions

SyntheticDistribution::SyntheticDistribution(std::string name, int num_classes,
                                             RegressionFn regression, DensityFn density)
    : name_(std::move(name)),
      num_classes_(num_classes),
      regression_(std::move(regression)),
      density_(std::move(density)) {
  if (num_classes_ < 2) throw ConfigError("distribution: need at least 2 classes");
  if (!regression_) throw ConfigError("distribution: missing regression function");
  const EvaluationGrid grid(kValidationGrid);
  std::vector<double> eta(static_cast<std::size_t>(num_classes_));
  KahanSum mass;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.point(i);
    regression_(x, eta);
    try {
      ProbabilityVector check(eta);
    } catch (const InvalidArgument& e) {
      throw ConfigError("distribution '" + name_ + "': regression at x=" + std::to_string(x) +
                        " is not a probability vector (" + e.what() + ")");
    }
    const double d = this->density(x);
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw ConfigError("distribution '" + name_ + "': density must be finite and nonnegative");
    }
    mass.add(d / static_cast<double>(grid.size()));
  }
  if (std::abs(mass.value() - 1.0) > kDensityTolerance) {
    throw ConfigError("distribution '" + name_ + "': density integrates to " +
                      std::to_string(mass.value()) + ", expected 1");
  }
}

std::vector<double> SyntheticDistribution::regression(double x) const {
  std::vector<double> out(static_cast<std::size_t>(num_classes_));
  regression_(x, out);
  return out;
}

SyntheticDistribution SyntheticDistribution::three_class_example() {
  return SyntheticDistribution("three-class", 3, [](double x, std::span<double> out) {
    const double c = std::cos(4.0 * std::numbers::pi * x);
    const double e1 = std::exp(-2.0 * x) * c * c;
    out[0] = e1;
    out[1] = (1.0 - x) * (1.0 - e1);
    out[2] = x * (1.0 - e1);
  });
}

SyntheticDistribution SyntheticDistribution::by_name(const std::string& name) {
  if (name == "three-class" || name == "paper-section5") return three_class_example();
  throw ConfigError("unknown distribution '" + name + "'");
}

SyntheticDistribution SyntheticDistribution::from_json(const nlohmann::json& spec) {
  if (spec.is_string()) return by_name(spec.get<std::string>());
  if (!spec.is_object()) throw ConfigError("distribution: expected an object or a name");
  if (spec.contains("builtin")) return by_name(spec.at("builtin").get<std::string>());
  if (!spec.contains("eta") || !spec.at("eta").is_array()) {
    throw ConfigError("distribution: missing \"eta\" array");
  }
  std::vector<Expression> etas;
  int c = 0;
  for (const auto& e : spec.at("eta")) etas.push_back(Expression::parse(e, c++));
  const int num_classes = static_cast<int>(etas.size());
  DensityFn density;
  if (spec.contains("density")) {
    auto expr = Expression::parse(spec.at("density"), 0);
    density = [expr](double x) { return expr.evaluate(x, {}); };
  }
  auto regression = [etas](double x, std::span<double> out) {
    for (std::size_t j = 0; j < etas.size(); ++j) {
      out[j] = etas[j].evaluate(x, out.first(j));
    }
  };
  return SyntheticDistribution(spec.value("name", std::string("custom")), num_classes,
                               std::move(regression), std::move(density));
}

EvaluationGrid::EvaluationGrid(std::size_t size) : size_(size) {
  if (size_ < 2) throw InvalidArgument("evaluation grid: need at least 2 points");
}

FeatureMatrix EvaluationGrid::as_features() const {
  std::vector<double> xs(size_);
  for (std::size_t i = 0; i < size_; ++i) xs[i] = point(i);
  return FeatureMatrix(size_, 1, std::move(xs));
}

// ---------------------------------------------------------------------------
// Quadrature

GridTable tabulate(const SyntheticDistribution& dist, const EvaluationGrid& grid) {
  GridTable t;
  const auto c = static_cast<std::size_t>(dist.num_classes());
  t.eta.rows = grid.size();
  t.eta.num_classes = dist.num_classes();
  t.eta.values.assign(grid.size() * c, 0.0);
  t.weights.assign(grid.size(), 1.0 / static_cast<double>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    dist.regression_into(grid.point(i), std::span<double>(t.eta.values.data() + i * c, c));
  }
  if (!dist.uniform_density()) {
    KahanSum total;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      t.weights[i] = dist.density(grid.point(i));
      total.add(t.weights[i]);
    }
    const double z = total.value();
    for (auto& w : t.weights) w /= z;
  }
  return t;
}

ProbabilityVector marginal_probs(const SyntheticDistribution& dist, const EvaluationGrid& grid) {
  const auto t = tabulate(dist, grid);
  const auto c = static_cast<std::size_t>(dist.num_classes());
  std::vector<KahanSum> acc(c);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto eta = t.eta.row(i);
    for (std::size_t j = 0; j < c; ++j) acc[j].add(t.weights[i] * eta[j]);
  }
  std::vector<double> p(c);
  for (std::size_t j = 0; j < c; ++j) p[j] = std::clamp(acc[j].value(), 0.0, 1.0);
  return ProbabilityVector(std::move(p));
}

ConfusionMatrix population_confusion(const GridTable& truth, const WeightVector& q,
                                     const RegressionTable& estimate) {
  const auto c = static_cast<std::size_t>(truth.eta.num_classes);
  if (q.size() != c) throw InvalidArgument("population_confusion: weight dimension mismatch");
  if (estimate.rows != truth.eta.rows || static_cast<std::size_t>(estimate.num_classes) != c) {
    throw InvalidArgument("population_confusion: estimate does not match the grid");
  }
  struct Acc {
    KahanSum tn, fn, fp, tp;
  };
  std::vector<Acc> acc(c);
  std::vector<double> score(c);
  for (std::size_t i = 0; i < truth.eta.rows; ++i) {
    const auto est = estimate.row(i);
    const auto eta = truth.eta.row(i);
    const double w = truth.weights[i];
    for (std::size_t j = 0; j < c; ++j) score[j] = q[j] * est[j];
    for (std::size_t j = 0; j < c; ++j) {
      double others = -1.0;
      for (std::size_t m = 0; m < c; ++m) {
        if (m != j) others = std::max(others, score[m]);
      }
      const bool positive = score[j] >= others;
      const double in_class = w * eta[j];
      const double out_class = w * (1.0 - eta[j]);
      if (positive) {
        acc[j].tp.add(in_class);
        acc[j].fp.add(out_class);
      } else {
        acc[j].fn.add(in_class);
        acc[j].tn.add(out_class);
      }
    }
  }
  std::vector<ClassConfusion> rows;
  rows.reserve(c);
  for (const auto& a : acc) {
    rows.push_back({std::clamp(a.tn.value(), 0.0, 1.0), std::clamp(a.fn.value(), 0.0, 1.0),
                    std::clamp(a.fp.value(), 0.0, 1.0), std::clamp(a.tp.value(), 0.0, 1.0)});
  }
  return ConfusionMatrix(std::move(rows), ConfusionKind::population);
}

ConfusionMatrix population_confusion(const SyntheticDistribution& dist, const WeightVector& q,
                                     const EvaluationGrid& grid) {
  const auto t = tabulate(dist, grid);
  return population_confusion(t, q, t.eta);
}

// ---------------------------------------------------------------------------
// Error masses

BandRadius parse_band_radius(const std::string& name) {
  if (name == "theorem") return BandRadius::theorem;
  if (name == "unit") return BandRadius::unit;
  throw ConfigError("unknown band radius '" + name + "'");
}

std::string to_string(BandRadius r) { return r == BandRadius::theorem ? "theorem" : "unit"; }

double decision_threshold(const WeightVector& q, ClassLabel c, std::span<const double> eta) {
  const auto target = static_cast<std::size_t>(c - 1);
  double best = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) {
    if (j != target) best = std::max(best, q[j] * eta[j]);
  }
  return best / q[target];
}

double band_scale(const WeightVector& q, ClassLabel c) {
  return 1.0 + q.max() / q.at_class(c);
}

ErrorBand error_band(const SyntheticDistribution& dist, const CoverPair& pair, ClassLabel c,
                     double epsilon, const EvaluationGrid& grid, BandRadius radius) {
  const auto classes = static_cast<std::size_t>(dist.num_classes());
  if (pair.lower.size() != classes || pair.upper.size() != classes) {
    throw InvalidArgument("error band: cover pair dimension mismatch");
  }
  if (c < 1 || static_cast<std::size_t>(c) > classes) {
    throw InvalidArgument("error band: class index out of range");
  }
  if (!(epsilon >= 0.0)) throw InvalidArgument("error band: epsilon must be nonnegative");
  if (pair.lower.at_class(c) <= 0.0 || pair.upper.at_class(c) <= 0.0) {
    throw InvalidArgument("error band: target-class weights must be positive");
  }
  const double r_lower = radius == BandRadius::theorem ? band_scale(pair.lower, c) : 1.0;
  const double r_upper = radius == BandRadius::theorem ? band_scale(pair.upper, c) : 1.0;

  const auto t = tabulate(dist, grid);
  ErrorBand band;
  band.weights = t.weights;
  const auto target = static_cast<std::size_t>(c - 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto eta = t.eta.row(i);
    const double lo = decision_threshold(pair.lower, c, eta) - epsilon * r_lower;
    const double hi = decision_threshold(pair.upper, c, eta) + epsilon * r_upper;
    band.x.push_back(grid.point(i));
    band.eta_c.push_back(eta[target]);
    band.lower.push_back(lo);
    band.upper.push_back(hi);
    band.in_band.push_back(lo <= eta[target] && eta[target] <= hi ? 1 : 0);
  }
  return band;
}

ErrorMasses tnfn_error_masses(const SyntheticDistribution& dist, const CoverPair& pair,
                              ClassLabel c, double epsilon, const EvaluationGrid& grid,
                              BandRadius radius) {
  const auto band = error_band(dist, pair, c, epsilon, grid, radius);
  KahanSum tne;
  KahanSum fne;
  for (std::size_t i = 0; i < band.x.size(); ++i) {
    if (!band.in_band[i]) continue;
    tne.add(band.weights[i] * (1.0 - band.eta_c[i]));
    fne.add(band.weights[i] * band.eta_c[i]);
  }
  return {tne.value(), fne.value()};
}

// ---------------------------------------------------------------------------
// Sampling

Dataset sample(const SyntheticDistribution& dist, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample: n must be positive");
  Rng rng(seed);
  double envelope = 1.0;
  if (!dist.uniform_density()) {
    // Rejection envelope: grid maximum with 5% headroom.
    const EvaluationGrid grid(10001);
    envelope = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      envelope = std::max(envelope, dist.density(grid.point(i)));
    }
    envelope *= 1.05;
  }
  const auto c = static_cast<std::size_t>(dist.num_classes());
  std::vector<double> xs(n);
  std::vector<ClassLabel> labels(n);
  std::vector<double> eta(c);
  for (std::size_t i = 0; i < n; ++i) {
    double x = uniform01(rng);
    if (!dist.uniform_density()) {
      while (uniform01(rng) * envelope > dist.density(x)) x = uniform01(rng);
    }
    dist.regression_into(x, eta);
    const double u = uniform01(rng);
    double cumulative = 0.0;
    ClassLabel y = static_cast<ClassLabel>(c);
    for (std::size_t j = 0; j < c; ++j) {
      cumulative += eta[j];
      if (u < cumulative) {
        y = static_cast<ClassLabel>(j + 1);
        break;
      }
    }
    // Guard against rounding in the cumulative sum landing on a zero-mass class.
    while (eta[static_cast<std::size_t>(y - 1)] <= 0.0 && y > 1) --y;
    xs[i] = x;
    labels[i] = y;
  }
  return Dataset(FeatureMatrix(n, 1, std::move(xs)), std::move(labels), dist.num_classes());
}

}  // namespace wknn
