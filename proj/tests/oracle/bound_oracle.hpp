#pragma once

// Fifty-digit reference evaluations of the bound formulas, written directly
// from the closed forms without sharing code with the library.

#include <algorithm>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "wknn/bounds.hpp"
#include "wknn/random.hpp"

namespace oracle {

using Big = boost::multiprecision::cpp_dec_float_50;

inline Big big(double v) { return Big(v); }

struct Accuracy {
  Big p, delta_gap;
};

inline Accuracy accuracy(const wknn::BoundBudget& b, double qmax) {
  using boost::multiprecision::log;
  using boost::multiprecision::sqrt;
  const Big k = big(static_cast<double>(b.k));
  const Big n = big(static_cast<double>(b.n));
  const Big l = log(Big(2) / big(b.delta));
  const Big p = (k / n) / (Big(1) - sqrt(Big(4) / k * l));
  const Big q = big(qmax);
  Big gap = sqrt(Big(2) * q * q / k * (log(Big(b.num_classes)) + Big(2) * l));
  if (gap > 1) gap = 1;
  return {p, gap};
}

struct Uniform {
  Big bias, noise, deviation, value, side;
  bool valid;
};

inline Uniform uniform(const wknn::SmoothnessParams& s, const wknn::BoundBudget& b,
                       std::optional<double> shattering) {
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  using boost::multiprecision::pow;
  using boost::multiprecision::sqrt;
  const Big k = big(static_cast<double>(b.k));
  const Big n = big(static_cast<double>(b.n));
  const Big d = Big(s.d);
  const Big ratio = Big(2) * k / (big(s.p_star) * n);
  const Big S = shattering ? big(*shattering) : Big(2) * pow(n, d + 1) + 2;
  Uniform u;
  u.bias = pow(Big(2), big(s.alpha)) * big(s.L) * pow(ratio, big(s.alpha) / d);
  u.noise = Big(1) / sqrt(k);
  u.deviation = sqrt(log(S / big(b.delta)) / (Big(2) * k));
  u.value = u.bias + u.noise + u.deviation;
  const Big r = pow(ratio, Big(1) / d);
  u.side = pow(Big(2) / r, d) * exp(-k / 4);
  u.valid = k / n <= big(s.p_star) * pow(big(s.r_star), d) / 2;
  return u;
}

inline Big root_term(const wknn::BoundBudget& b) {
  using boost::multiprecision::log;
  using boost::multiprecision::sqrt;
  const Big N = big(static_cast<double>(b.cover_size));
  return sqrt((log(Big(24) * N / big(b.delta)) + Big(2) * log(Big(b.num_classes))) /
              (Big(2) * big(static_cast<double>(b.n))));
}

/// The same quantity with the constant folded into one logarithm.
inline Big root_term_folded(const wknn::BoundBudget& b) {
  using boost::multiprecision::log;
  using boost::multiprecision::sqrt;
  const Big N = big(static_cast<double>(b.cover_size));
  const Big C = Big(b.num_classes);
  return sqrt(log(Big(24) * N * C * C / big(b.delta)) / (Big(2) * big(static_cast<double>(b.n))));
}

inline Big mass_bound(double mass, const wknn::BoundBudget& b) {
  return Big(3) * big(mass) + Big(3) * root_term(b);
}

struct Metric {
  std::optional<Big> precision, recall, f1;
};

inline Metric metric(const wknn::ClassConfusion& cm, const wknn::ClassConfusionBound& e) {
  Metric m;
  const Big tp = big(cm.tp), fp = big(cm.fp), fn = big(cm.fn);
  const Big etp = big(e.tp), efp = big(e.fp), efn = big(e.fn);
  const Big pd = tp + fp - etp - efp;
  if (pd > 0) m.precision = Big(3) * (etp + efp) / pd;
  const Big rd = tp + fn - etp - efn;
  if (rd > 0) m.recall = Big(3) * (etp + efn) / rd;
  if (m.precision && m.recall) {
    const Big prec = tp + fp > 0 ? tp / (tp + fp) : Big(0);
    const Big rec = tp + fn > 0 ? tp / (tp + fn) : Big(0);
    const Big fd = prec + rec - *m.precision - *m.recall;
    if (fd > 0) m.f1 = Big(9) * (*m.precision + *m.recall) / fd;
  }
  return m;
}

inline double rel_error(double got, const Big& want) {
  using boost::multiprecision::abs;
  if (want == 0) return got == 0.0 ? 0.0 : 1.0;
  return static_cast<double>(abs((Big(got) - want) / want));
}

// Random parameter draws shared by the unit and acceptance suites.
struct Draw {
  wknn::BoundBudget budget;
  wknn::SmoothnessParams smooth;
  std::vector<double> q;
  std::optional<double> shattering;
  std::vector<wknn::ErrorMassQuad> masses;
  std::vector<wknn::ClassConfusion> population;
};

inline Draw draw(wknn::Rng& rng) {
  auto u = [&] { return wknn::uniform01(rng); };
  Draw d;
  d.budget.delta = 0.001 + 0.4 * u();
  d.budget.n = 100 + static_cast<long long>(u() * 1e6);
  d.budget.num_classes = 2 + static_cast<int>(u() * 9);
  const long long kmin = static_cast<long long>(4.0 * std::log(2.0 / d.budget.delta)) + 2;
  d.budget.k = kmin + static_cast<long long>(u() * 2000.0);
  d.budget.k = std::min(d.budget.k, d.budget.n);
  d.budget.cover_size = 1 + static_cast<long long>(u() * 1e6);
  d.budget.epsilon = u() * 0.2;
  d.smooth.alpha = 0.2 + 1.8 * u();
  d.smooth.L = 0.1 + 5.0 * u();
  d.smooth.d = 1 + static_cast<int>(u() * 5);
  d.smooth.p_star = 0.1 + 2.0 * u();
  d.smooth.r_star = 0.1 + 2.0 * u();
  for (int c = 0; c < d.budget.num_classes; ++c) d.q.push_back(0.01 + u());
  if (u() < 0.5) d.shattering = 1.0 + u() * 1e12;
  for (int c = 0; c < d.budget.num_classes; ++c) {
    const double small = 0.02 * u();
    d.masses.push_back({small * u(), small * u(), small * u(), small * u()});
    double a = u() + 0.01, b = u() + 0.01, e = u() + 0.01, f = u() + 0.01;
    const double s = a + b + e + f;
    d.population.push_back({a / s, b / s, e / s, 1.0 - a / s - b / s - e / s});
  }
  return d;
}

}  // namespace oracle
