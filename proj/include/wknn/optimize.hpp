#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "wknn/core.hpp"

namespace wknn {

using Objective = std::function<double(const WeightVector&)>;

/// Where each step's candidates are built from.
///  chained:    from the current weight, which moves as soon as a candidate
///              is accepted within the step.
///  step_start: always from the weight the step started at; acceptance still
///              compares against the best weight accepted so far.
enum class GreedyUpdate { chained, step_start };

struct GreedyConfig {
  double step_size = 0.01;  // gamma
  int num_steps = 20;       // T
  WeightVector initial;
  GreedyUpdate update = GreedyUpdate::chained;

  void validate() const;
};

struct TraceRecord {
  int step = 0;         // 0 for the initial evaluation
  int coordinate = 0;   // 1-based; 0 for the initial evaluation
  int sign = 0;         // +1 / -1; 0 for the initial evaluation
  bool accepted = false;
  double candidate_metric = 0.0;
  double metric = 0.0;  // objective of the accepted weight after this record
  std::vector<double> weight;  // accepted weight after this record
};

struct SearchTrace {
  std::vector<TraceRecord> records;

  /// Columns: step,coordinate,sign,accepted,metric,candidate_metric,q_1..q_C.
  void write_csv(std::ostream& out) const;
};

struct GreedyResult {
  WeightVector weight;
  double metric;
  SearchTrace trace;
};

/// Coordinate search over the simplex. Each step tries, for i = 1..C and
/// sign = +1 then -1, the candidate (q + sign * gamma * e_i)_+ / ||.||_1 and
/// accepts it when objective(candidate) >= objective(current). Candidates
/// whose positive part is all zero are skipped. A NaN objective throws
/// OptimizationError.
GreedyResult greedy_search(const Objective& objective, const GreedyConfig& config);

/// Lattice points of the simplex with spacing 1/m, m = round(1/spacing), and
/// every coordinate >= min_weight.
struct SimplexGrid {
  double spacing = 0.1;
  double min_weight = 0.0;
  int num_classes = 3;

  /// m; throws if 1/spacing is not within 1% of an integer.
  int divisions() const;
  void validate() const;
};

/// Lazy lexicographic enumeration of a SimplexGrid; O(C) memory.
class SimplexGridIterator {
 public:
  explicit SimplexGridIterator(const SimplexGrid& grid);

  /// Next lattice point, or nullopt when exhausted.
  std::optional<WeightVector> next();

 private:
  bool advance();
  bool fill_from(std::size_t position);

  int divisions_;
  int min_units_;
  std::vector<int> units_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<WeightVector> enumerate_simplex_grid(const SimplexGrid& grid);

/// Number of points enumerate_simplex_grid would produce.
std::size_t simplex_grid_size(const SimplexGrid& grid);

struct GridSearchResult {
  WeightVector weight;
  double metric;
  std::size_t index;      // position of the winner in enumeration order
  std::size_t evaluated;  // candidates evaluated
};

/// First candidate attaining the maximum (strict > update).
GridSearchResult grid_search(const Objective& objective, const std::vector<WeightVector>& candidates);
GridSearchResult grid_search(const Objective& objective, const SimplexGrid& grid);

}  // namespace wknn
