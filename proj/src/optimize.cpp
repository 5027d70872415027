#include "wknn/optimize.hpp"

#include <cmath>
#include <ostream>

namespace wknn {

void GreedyConfig::validate() const {
  if (!(step_size > 0.0)) throw InvalidArgument("greedy: step size must be positive");
  if (num_steps < 0) throw InvalidArgument("greedy: number of steps must be nonnegative");
}

namespace {

double evaluate(const Objective& objective, const WeightVector& q) {
  const double v = objective(q);
  if (std::isnan(v)) throw OptimizationError("objective returned NaN");
  return v;
}

std::optional<WeightVector> coordinate_candidate(const WeightVector& from, std::size_t i,
                                                 int sign, double step) {
  std::vector<double> q = from.values();
  q[i] += sign * step;
  double total = 0.0;
  for (auto& v : q) {
    v = std::max(v, 0.0);
    total += v;
  }
  if (total <= 0.0) return std::nullopt;
  for (auto& v : q) v /= total;
  return WeightVector(std::move(q));
}

}  // namespace

GreedyResult greedy_search(const Objective& objective, const GreedyConfig& config) {
  config.validate();
  WeightVector current = config.initial;
  double current_metric = evaluate(objective, current);
  SearchTrace trace;
  trace.records.push_back({0, 0, 0, true, current_metric, current_metric, current.values()});

  const std::size_t num_classes = current.size();
  for (int t = 1; t <= config.num_steps; ++t) {
    const WeightVector step_start = current;
    for (std::size_t i = 0; i < num_classes; ++i) {
      for (int sign : {+1, -1}) {
        const WeightVector& base = config.update == GreedyUpdate::chained ? current : step_start;
        auto candidate = coordinate_candidate(base, i, sign, config.step_size);
        if (!candidate) continue;
        const double value = evaluate(objective, *candidate);
        const bool accept = value >= current_metric;
        if (accept) {
          current = std::move(*candidate);
          current_metric = value;
        }
        trace.records.push_back({t, static_cast<int>(i + 1), sign, accept, value, current_metric,
                                 current.values()});
      }
    }
  }
  return {current, current_metric, std::move(trace)};
}

void SearchTrace::write_csv(std::ostream& out) const {
  out << "step,coordinate,sign,accepted,metric,candidate_metric";
  const std::size_t c = records.empty() ? 0 : records.front().weight.size();
  for (std::size_t j = 1; j <= c; ++j) out << ",q_" << j;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& r : records) {
    out << r.step << ',' << r.coordinate << ',' << r.sign << ',' << (r.accepted ? 1 : 0) << ','
        << r.metric << ',' << r.candidate_metric;
    for (double w : r.weight) out << ',' << w;
    out << '\n';
  }
  out.precision(old_precision);
}

int SimplexGrid::divisions() const {
  if (!(spacing > 0.0) || spacing > 1.0) throw InvalidArgument("simplex grid: spacing must be in (0,1]");
  const double inverse = 1.0 / spacing;
  const double m = std::round(inverse);
  if (std::abs(inverse - m) > 0.01 * m) {
    throw InvalidArgument("simplex grid: 1/spacing = " + std::to_string(inverse) +
                          " is not close to an integer");
  }
  return static_cast<int>(m);
}

void SimplexGrid::validate() const {
  if (num_classes < 1) throw InvalidArgument("simplex grid: need at least one class");
  if (!(min_weight >= 0.0)) throw InvalidArgument("simplex grid: min_weight must be nonnegative");
  (void)divisions();
  if (min_weight * num_classes > 1.0 + 1e-12) {
    throw DegenerateInput("simplex grid: min_weight * C exceeds 1");
  }
}

namespace {

int min_units_of(const SimplexGrid& grid) {
  const int m = grid.divisions();
  return static_cast<int>(std::ceil(grid.min_weight * m - 1e-9));
}

}  // namespace

SimplexGridIterator::SimplexGridIterator(const SimplexGrid& grid)
    : divisions_(grid.divisions()),
      min_units_(min_units_of(grid)),
      units_(static_cast<std::size_t>(grid.num_classes), 0) {
  grid.validate();
  if (static_cast<long long>(min_units_) * grid.num_classes > divisions_) {
    throw DegenerateInput("simplex grid: no lattice point satisfies min_weight");
  }
}

bool SimplexGridIterator::fill_from(std::size_t position) {
  int used = 0;
  for (std::size_t j = 0; j < position; ++j) used += units_[j];
  for (std::size_t j = position; j + 1 < units_.size(); ++j) {
    units_[j] = min_units_;
    used += min_units_;
  }
  units_.back() = divisions_ - used;
  return units_.back() >= min_units_;
}

bool SimplexGridIterator::advance() {
  // Rightmost free coordinate that can grow while the tail stays feasible.
  for (std::size_t p = units_.size() - 1; p-- > 0;) {
    int prefix = 0;
    for (std::size_t j = 0; j <= p; ++j) prefix += units_[j];
    const int tail_slots = static_cast<int>(units_.size() - 1 - p);
    if (divisions_ - (prefix + 1) >= tail_slots * min_units_) {
      ++units_[p];
      return fill_from(p + 1);
    }
  }
  return false;
}

std::optional<WeightVector> SimplexGridIterator::next() {
  if (done_) return std::nullopt;
  if (!started_) {
    started_ = true;
    if (!fill_from(0)) {
      done_ = true;
      return std::nullopt;
    }
  } else if (units_.size() == 1 || !advance()) {
    done_ = true;
    return std::nullopt;
  }
  std::vector<double> q(units_.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    q[j] = static_cast<double>(units_[j]) / divisions_;
  }
  return WeightVector(std::move(q));
}

std::vector<WeightVector> enumerate_simplex_grid(const SimplexGrid& grid) {
  SimplexGridIterator it(grid);
  std::vector<WeightVector> out;
  while (auto q = it.next()) out.push_back(std::move(*q));
  if (out.empty()) throw DegenerateInput("simplex grid is empty");
  return out;
}

std::size_t simplex_grid_size(const SimplexGrid& grid) {
  grid.validate();
  const long long free_units =
      grid.divisions() - static_cast<long long>(min_units_of(grid)) * grid.num_classes;
  if (free_units < 0) return 0;
  // binom(free + C - 1, C - 1)
  const long long r = grid.num_classes - 1;
  long double count = 1.0L;
  for (long long j = 1; j <= r; ++j) count = count * static_cast<long double>(free_units + j) / j;
  return static_cast<std::size_t>(std::llround(count));
}

namespace {

class GridSearchState {
 public:
  explicit GridSearchState(const Objective& objective) : objective_(objective) {}

  void offer(const WeightVector& q, std::size_t index) {
    const double v = evaluate(objective_, q);
    if (!best_ || v > best_metric_) {
      best_ = q;
      best_metric_ = v;
      best_index_ = index;
    }
    ++evaluated_;
  }

  GridSearchResult result() const {
    if (!best_) throw DegenerateInput("grid_search: no candidates");
    return {*best_, best_metric_, best_index_, evaluated_};
  }

 private:
  const Objective& objective_;
  std::optional<WeightVector> best_;
  double best_metric_ = 0.0;
  std::size_t best_index_ = 0;
  std::size_t evaluated_ = 0;
};

}  // namespace

GridSearchResult grid_search(const Objective& objective,
                             const std::vector<WeightVector>& candidates) {
  GridSearchState state(objective);
  for (std::size_t i = 0; i < candidates.size(); ++i) state.offer(candidates[i], i);
  return state.result();
}

GridSearchResult grid_search(const Objective& objective, const SimplexGrid& grid) {
  GridSearchState state(objective);
  SimplexGridIterator it(grid);
  std::size_t i = 0;
  while (auto q = it.next()) state.offer(*q, i++);
  return state.result();
}

}  // namespace wknn
