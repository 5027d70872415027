#include "wknn/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "wknn/random.hpp"

namespace wknn {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(std::move(field));
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<long long> parse_integer(const std::string& s) {
  if (s.empty()) return std::nullopt;
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

LoadedDataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column,
                       bool has_header) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  if (has_header) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line != "\r") break;
    }
    if (line_no == 0) throw FormatError("'" + path.string() + "': empty file");
    header = split_fields(line);
  }

  std::optional<std::size_t> label_index;
  if (const auto* idx = std::get_if<std::size_t>(&label_column)) {
    label_index = *idx;
  } else {
    const auto& name = std::get<std::string>(label_column);
    if (!has_header) throw ConfigError("label column given by name but the file has no header");
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FormatError("label column '" + name + "' not in header");
    label_index = static_cast<std::size_t>(it - header.begin());
  }

  std::size_t width = header.size();
  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::vector<std::size_t> label_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_fields(line);
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                        " columns, found " + std::to_string(fields.size()));
    }
    if (*label_index >= width) {
      throw FormatError("label column index " + std::to_string(*label_index) + " out of range");
    }
    for (std::size_t j = 0; j < width; ++j) {
      if (j == *label_index) continue;
      auto v = parse_double(fields[j]);
      if (!v || !std::isfinite(*v)) {
        throw FormatError("line " + std::to_string(line_no) + ", column " + std::to_string(j + 1) +
                          ": invalid feature value '" + fields[j] + "'");
      }
      values.push_back(*v);
    }
    raw_labels.push_back(fields[*label_index]);
    label_lines.push_back(line_no);
  }
  if (raw_labels.empty()) throw FormatError("'" + path.string() + "': no data rows");

  // Integer labels keep numeric order; anything else is factorized.
  bool all_integer = true;
  for (const auto& s : raw_labels) {
    if (!parse_integer(s)) {
      all_integer = false;
      break;
    }
  }
  std::vector<std::string> names;
  std::vector<ClassLabel> labels;
  labels.reserve(raw_labels.size());
  if (all_integer) {
    std::map<long long, ClassLabel> order;
    for (const auto& s : raw_labels) order.emplace(*parse_integer(s), 0);
    ClassLabel next = 1;
    for (auto& [value, label] : order) {
      label = next++;
      names.push_back(std::to_string(value));
    }
    for (const auto& s : raw_labels) labels.push_back(order.at(*parse_integer(s)));
  } else {
    std::unordered_map<std::string, ClassLabel> seen;
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      const auto& s = raw_labels[i];
      if (s.empty()) throw FormatError("line " + std::to_string(label_lines[i]) + ": empty label");
      auto [it, inserted] = seen.emplace(s, static_cast<ClassLabel>(names.size() + 1));
      if (inserted) names.push_back(s);
      labels.push_back(it->second);
    }
  }
  if (names.size() < 2) throw FormatError("'" + path.string() + "': fewer than 2 classes");

  std::vector<std::string> feature_names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != *label_index) feature_names.push_back(header[j]);
  }
  const std::size_t rows = raw_labels.size();
  Dataset data(FeatureMatrix(rows, width - 1, std::move(values)), std::move(labels),
               static_cast<int>(names.size()));
  return {std::move(data), std::move(names), std::move(feature_names)};
}

void write_csv(const std::filesystem::path& path, const Dataset& data, bool header) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  if (header) {
    for (std::size_t j = 0; j < data.dimension(); ++j) out << 'x' << (j + 1) << ',';
    out << "label\n";
  }
  char buf[40];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features().row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    out << data.labels()[i] << '\n';
  }
}

CovertypeSplit load_covertype(const std::filesystem::path& path, std::size_t expected_rows) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::vector<double> values;
  values.reserve(expected_rows * kCovertypeFeatures);
  std::vector<ClassLabel> labels;
  labels.reserve(expected_rows);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto end = comma == std::string::npos ? line.size() : comma;
      const std::string token = line.substr(start, end - start);
      if (field < kCovertypeFeatures) {
        auto v = parse_double(token);
        if (!v) {
          throw FormatError("covertype line " + std::to_string(line_no) + ": bad value '" + token +
                            "'");
        }
        values.push_back(*v);
      } else if (field == kCovertypeFeatures) {
        auto y = parse_integer(token.back() == '\r' ? token.substr(0, token.size() - 1) : token);
        if (!y || *y < 1 || *y > 7) {
          throw FormatError("covertype line " + std::to_string(line_no) + ": label '" + token +
                            "' outside 1..7");
        }
        labels.push_back(static_cast<ClassLabel>(*y));
      }
      ++field;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (field != kCovertypeFeatures + 1) {
      throw FormatError("covertype line " + std::to_string(line_no) + ": expected " +
                        std::to_string(kCovertypeFeatures + 1) + " columns, found " +
                        std::to_string(field));
    }
  }
  if (labels.size() != expected_rows) {
    throw FormatError("covertype: expected " + std::to_string(expected_rows) + " rows, found " +
                      std::to_string(labels.size()));
  }
  const std::size_t rows = labels.size();
  Dataset all(FeatureMatrix(rows, kCovertypeFeatures, std::move(values)), std::move(labels), 7);
  // Split sizes scale down proportionally only for test fixtures.
  std::size_t train = kCovertypeTrain;
  std::size_t dev = kCovertypeDev;
  if (expected_rows != kCovertypeRows) {
    train = expected_rows * kCovertypeTrain / kCovertypeRows;
    dev = expected_rows * kCovertypeDev / kCovertypeRows;
  }
  const std::size_t test = expected_rows - train - dev;
  return {all.slice(0, train), all.slice(train, dev), all.slice(train + dev, test)};
}

SplitSpec SplitSpec::from_fractions(std::size_t n, double train, double dev, double test,
                                    Mode mode, std::uint64_t seed) {
  for (double f : {train, dev, test}) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("split fractions must lie in [0,1]");
  }
  if (train + dev + test > 1.0 + 1e-12) throw ConfigError("split fractions sum above 1");
  const double nd = static_cast<double>(n);
  return {mode, static_cast<std::size_t>(std::floor(train * nd)),
          static_cast<std::size_t>(std::floor(dev * nd)),
          static_cast<std::size_t>(std::floor(test * nd)), seed};
}

DatasetSplit split_dataset(const Dataset& data, const SplitSpec& spec) {
  if (spec.train + spec.dev + spec.test > data.size()) {
    throw ConfigError("split sizes exceed the " + std::to_string(data.size()) + " available rows");
  }
  if (spec.train == 0) throw ConfigError("split: training set is empty");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (spec.mode == SplitSpec::Mode::shuffled) {
    Rng rng(spec.seed);
    // Fisher-Yates with our own uniform draw so the order is platform-stable.
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
      std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }
  }
  auto take = [&](std::size_t first, std::size_t count) {
    return std::vector<std::size_t>(order.begin() + static_cast<std::ptrdiff_t>(first),
                                    order.begin() + static_cast<std::ptrdiff_t>(first + count));
  };
  auto train_rows = take(0, spec.train);
  auto dev_rows = take(spec.train, spec.dev);
  auto test_rows = take(spec.train + spec.dev, spec.test);
  DatasetSplit out{data.subset(train_rows), std::nullopt, std::nullopt, train_rows, dev_rows,
                   test_rows};
  if (!dev_rows.empty()) out.dev = data.subset(dev_rows);
  if (!test_rows.empty()) out.test = data.subset(test_rows);
  return out;
}

std::vector<double> StandardizationParams::apply(std::span<const double> row) const {
  std::vector<double> out(row.begin(), row.end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (!standardized[j]) continue;
    out[j] = stddev[j] > 0.0 ? (out[j] - mean[j]) / stddev[j] : 0.0;
  }
  return out;
}

Dataset StandardizationParams::apply(const Dataset& data) const {
  if (data.dimension() != mean.size()) {
    throw InvalidArgument("standardize: dimension mismatch");
  }
  std::vector<double> values;
  values.reserve(data.features().values().size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto r = apply(data.features().row(i));
    values.insert(values.end(), r.begin(), r.end());
  }
  return {FeatureMatrix(data.size(), data.dimension(), std::move(values)), data.labels(),
          data.num_classes()};
}

StandardizationParams fit_standardization(const Dataset& train,
                                          const std::vector<std::size_t>& columns) {
  const auto d = train.dimension();
  StandardizationParams p;
  p.mean.assign(d, 0.0);
  p.stddev.assign(d, 0.0);
  p.standardized.assign(d, columns.empty());
  for (auto j : columns) {
    if (j >= d) throw InvalidArgument("standardize: column " + std::to_string(j) + " out of range");
    p.standardized[j] = true;
  }
  const double n = static_cast<double>(train.size());
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i) sum += train.features()(i, j);
    p.mean[j] = sum / n;
    double sq = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const double diff = train.features()(i, j) - p.mean[j];
      sq += diff * diff;
    }
    p.stddev[j] = std::sqrt(sq / n);
  }
  return p;
}

StandardizedSets standardize(const Dataset& train, const std::vector<Dataset>& others,
                             const std::vector<std::size_t>& columns) {
  auto params = fit_standardization(train, columns);
  StandardizedSets out{params.apply(train), {}, params};
  for (const auto& o : others) out.others.push_back(params.apply(o));
  return out;
}

}  // namespace wknn
