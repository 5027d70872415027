#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wknn/core.hpp"

namespace wknn {

/// Label column selector: header name or 0-based column index.
using ColumnRef = std::variant<std::string, std::size_t>;

struct LoadedDataset {
  Dataset data;
  /// Original label text for class c at position c - 1.
  std::vector<std::string> label_names;
  std::vector<std::string> feature_names;  // empty when the file has no header
};

/// Comma-separated file, one row per sample. Integer labels map to 1..C in
/// ascending numeric order; other labels are factorized by first appearance.
/// Errors name the offending (1-based) line.
LoadedDataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column,
                       bool has_header);

/// Writes features then the label as the last column, with 17 significant
/// digits so reloading reproduces every value.
void write_csv(const std::filesystem::path& path, const Dataset& data, bool header = true);

struct CovertypeSplit {
  Dataset train;
  Dataset dev;
  Dataset test;
};

inline constexpr std::size_t kCovertypeTrain = 11340;
inline constexpr std::size_t kCovertypeDev = 3780;
inline constexpr std::size_t kCovertypeTest = 565892;
inline constexpr std::size_t kCovertypeRows = kCovertypeTrain + kCovertypeDev + kCovertypeTest;
inline constexpr std::size_t kCovertypeFeatures = 54;
inline constexpr std::size_t kCovertypeContinuous = 10;

/// UCI covtype.data: 54 features + label in 1..7, no header, file order split
/// into 11340 / 3780 / 565892 rows. `expected_rows` exists for tests on
/// truncated fixtures; the canonical loader requires the full file.
CovertypeSplit load_covertype(const std::filesystem::path& path,
                              std::size_t expected_rows = kCovertypeRows);

struct SplitSpec {
  enum class Mode { fixed_prefix, shuffled };
  Mode mode = Mode::fixed_prefix;
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;
  std::uint64_t seed = 0;

  /// Sizes from fractions of n (floor), remainder unassigned.
  static SplitSpec from_fractions(std::size_t n, double train, double dev, double test,
                                  Mode mode = Mode::shuffled, std::uint64_t seed = 0);
};

struct DatasetSplit {
  Dataset train;
  std::optional<Dataset> dev;
  std::optional<Dataset> test;
  std::vector<std::size_t> train_rows, dev_rows, test_rows;
};

DatasetSplit split_dataset(const Dataset& data, const SplitSpec& spec);

struct StandardizationParams {
  std::vector<double> mean;
  std::vector<double> stddev;     // population (divide by n)
  std::vector<bool> standardized; // columns left untouched are false

  std::vector<double> apply(std::span<const double> row) const;
  Dataset apply(const Dataset& data) const;
};

/// Training-set statistics, computed on `columns` (all when empty).
StandardizationParams fit_standardization(const Dataset& train,
                                          const std::vector<std::size_t>& columns = {});

struct StandardizedSets {
  Dataset train;
  std::vector<Dataset> others;
  StandardizationParams params;
};

/// (x - mean) / std per selected feature using only `train` statistics;
/// zero-variance features become 0.
StandardizedSets standardize(const Dataset& train, const std::vector<Dataset>& others,
                             const std::vector<std::size_t>& columns = {});

}  // namespace wknn
