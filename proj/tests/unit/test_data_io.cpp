#include <doctest.h>

#include <fstream>

#include "temp_dir.hpp"
#include "wknn/data_io.hpp"
#include "wknn/random.hpp"

using namespace wknn;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

// Synthetic file in the covtype.data layout.
void write_covertype_fixture(const std::filesystem::path& p, std::size_t rows, std::uint64_t seed,
                             int bad_label_row = -1) {
  std::ofstream out(p);
  Rng rng(seed);
  for (std::size_t i = 0; i < rows; ++i) {
    const int y = 1 + static_cast<int>(uniform01(rng) * 7);
    for (std::size_t j = 0; j < kCovertypeFeatures; ++j) {
      if (j < kCovertypeContinuous) {
        out << static_cast<int>(100.0 * y + 50.0 * uniform01(rng) * (j + 1)) << ',';
      } else {
        out << (uniform01(rng) < 0.1 ? 1 : 0) << ',';
      }
    }
    out << (static_cast<int>(i) == bad_label_row ? 9 : y) << '\n';
  }
}

}  // namespace

TEST_CASE("csv with header and string labels") {
  TempDir dir;
  write_text(dir / "a.csv", "f1,f2,cls\n0.5,1,a\n1.5,2,b\n2.5,3,a\n");
  const auto l = load_csv(dir / "a.csv", std::string("cls"), true);
  CHECK(l.data.labels() == std::vector<ClassLabel>{1, 2, 1});
  CHECK(l.data.num_classes() == 2);
  CHECK(l.label_names == std::vector<std::string>{"a", "b"});
  CHECK(l.feature_names == std::vector<std::string>{"f1", "f2"});
  CHECK(l.data.features()(2, 0) == 2.5);
}

TEST_CASE("integer labels keep numeric order") {
  TempDir dir;
  write_text(dir / "b.csv", "7,0.1\n3,0.2\n5,0.3\n");
  const auto l = load_csv(dir / "b.csv", std::size_t{0}, false);
  CHECK(l.data.labels() == std::vector<ClassLabel>{3, 1, 2});
  CHECK(l.label_names == std::vector<std::string>{"3", "5", "7"});
}

TEST_CASE("bad cells name the line and column") {
  TempDir dir;
  write_text(dir / "c.csv", "x,label\n1.0,1\nnan,2\n");
  try {
    load_csv(dir / "c.csv", std::string("label"), true);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column 1") != std::string::npos);
  }
  write_text(dir / "d.csv", "x,label\n1.0,1\n2.0\n");
  CHECK_THROWS_AS(load_csv(dir / "d.csv", std::string("label"), true), FormatError);
  CHECK_THROWS_AS(load_csv(dir / "d.csv", std::string("missing"), true), FormatError);
  CHECK_THROWS_AS(load_csv(dir / "none.csv", std::string("label"), true), FormatError);
}

TEST_CASE("write and reload round trip") {
  TempDir dir;
  FeatureMatrix f(3, 2, {0.1, 1.0 / 3.0, -2e-17, 5.0, 1e300, 0.7});
  Dataset d(f, {1, 2, 2}, 2);
  write_csv(dir / "r.csv", d);
  const auto back = load_csv(dir / "r.csv", std::string("label"), true);
  CHECK(back.data == d);
}

TEST_CASE("covertype loader splits in file order") {
  TempDir dir;
  const std::size_t rows = 2000;
  write_covertype_fixture(dir / "cov.data", rows, 1);
  const auto s = load_covertype(dir / "cov.data", rows);
  const std::size_t train = rows * kCovertypeTrain / kCovertypeRows;
  const std::size_t dev = rows * kCovertypeDev / kCovertypeRows;
  CHECK(s.train.size() == train);
  CHECK(s.dev.size() == dev);
  CHECK(s.test.size() == rows - train - dev);
  CHECK(s.train.dimension() == 54);
  CHECK(s.train.num_classes() == 7);
  CHECK_THROWS_AS(load_covertype(dir / "cov.data"), FormatError);  // truncated vs full size

  write_covertype_fixture(dir / "bad.data", 50, 2, 10);
  CHECK_THROWS_AS(load_covertype(dir / "bad.data", 50), FormatError);
  CHECK(kCovertypeTrain + kCovertypeDev + kCovertypeTest == 581012);
}

TEST_CASE("dataset splits") {
  FeatureMatrix f(10, 1, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  Dataset d(f, {1, 2, 1, 2, 1, 2, 1, 2, 1, 2}, 2);
  const auto fixed = split_dataset(d, {SplitSpec::Mode::fixed_prefix, 6, 2, 2, 0});
  CHECK(fixed.train_rows == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  CHECK(fixed.test->features()(1, 0) == 9);
  const auto a = split_dataset(d, SplitSpec::from_fractions(10, 0.5, 0.2, 0.3, SplitSpec::Mode::shuffled, 3));
  const auto b = split_dataset(d, SplitSpec::from_fractions(10, 0.5, 0.2, 0.3, SplitSpec::Mode::shuffled, 3));
  CHECK(a.train_rows == b.train_rows);
  CHECK(a.train_rows.size() == 5);
  std::vector<std::size_t> all = a.train_rows;
  all.insert(all.end(), a.dev_rows.begin(), a.dev_rows.end());
  all.insert(all.end(), a.test_rows.begin(), a.test_rows.end());
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK_THROWS_AS(split_dataset(d, {SplitSpec::Mode::fixed_prefix, 8, 2, 2, 0}), ConfigError);
}

TEST_CASE("standardization uses training statistics only") {
  FeatureMatrix tf(2, 2, {0.0, 4.0, 2.0, 4.0});
  Dataset train(tf, {1, 2}, 2);
  FeatureMatrix of(1, 2, {3.0, 7.0});
  Dataset other(of, {1}, 2);
  const auto s = standardize(train, {other});
  CHECK(s.train.features()(0, 0) == -1.0);
  CHECK(s.train.features()(1, 0) == 1.0);
  CHECK(s.train.features()(0, 1) == 0.0);  // constant column
  CHECK(s.others[0].features()(0, 0) == 2.0);
  CHECK(s.others[0].features()(0, 1) == 0.0);

  const auto partial = standardize(train, {}, {0});
  CHECK(partial.train.features()(0, 1) == 4.0);
  CHECK_THROWS_AS(fit_standardization(train, {5}), InvalidArgument);
}
