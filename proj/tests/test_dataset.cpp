#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "nmdim/dataset.hpp"

using namespace nmdim;
namespace fs = std::filesystem;

namespace {

GridSpec tiny_grid() {
  GridSpec g;
  g.k1_values = {1, 2};
  g.k2_values = {1, 2};
  g.phi_values = {0.2, 1.0};
  g.per_cell = 3;
  g.master_seed = 99;
  return g;
}

fs::path temp_csv(const char* name) {
  return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("phi-zero grid produces constant labels and repeatable rows") {
  GridSpec g;
  g.k1_values = {1};
  g.k2_values = {1};
  g.phi_values = {0.0};
  g.per_cell = 5;
  g.master_seed = 7;
  const Dataset ds = generate_dataset(g);
  REQUIRE(ds.size() == 5);
  for (const auto& row : ds.rows) {
    CHECK(row[kColLabel] == 0.0);
    CHECK(row[kColK1] == 1.0);
    CHECK(row[kColPhi] == 0.0);
  }
}

TEST_CASE("generation is deterministic and worker-count independent") {
  const GridSpec g = tiny_grid();
  const Dataset a = generate_dataset(g, 1);
  const Dataset b = generate_dataset(g, 4);
  const Dataset c = generate_dataset(g, 1);
  REQUIRE(a.rows == b.rows);
  REQUIRE(a.rows == c.rows);
}

TEST_CASE("labels equal log2 of the generating k2 and cells are balanced") {
  const GridSpec g = tiny_grid();
  const Dataset ds = generate_dataset(g);
  REQUIRE(ds.size() == 8 * 3);
  std::map<std::tuple<double, double, double>, int> counts;
  for (const auto& row : ds.rows) {
    const double k2 = std::exp2(row[kColLabel]);
    CHECK(k2 == doctest::Approx(std::round(k2)));
    counts[{row[kColK1], row[kColPhi], row[kColLabel]}]++;
  }
  CHECK(counts.size() == 8);
  for (const auto& [key, n] : counts) CHECK(n == g.per_cell);
}

TEST_CASE("split sizes follow floor arithmetic with remainder to train") {
  GridSpec g = tiny_grid();
  g.per_cell = 2;  // 16 rows
  Dataset ds = generate_dataset(g);
  ds.rows.resize(10);
  const Splits s = split_dataset(ds, {0.7, 0.2, 0.1}, 5);
  CHECK(s.train.size() == 7);
  CHECK(s.val.size() == 2);
  CHECK(s.test.size() == 1);
}

TEST_CASE("splits partition the dataset as a multiset") {
  const Dataset ds = generate_dataset(tiny_grid());
  const Splits s = split_dataset(ds, {0.7, 0.2, 0.1}, 5);
  CHECK(s.train.size() + s.val.size() + s.test.size() == ds.size());
  auto key = [](const std::vector<double>& row) { return row; };
  std::map<std::vector<double>, int> before, after;
  for (const auto& r : ds.rows) before[key(r)]++;
  for (const auto* part : {&s.train, &s.val, &s.test})
    for (const auto& r : part->rows) after[key(r)]++;
  CHECK(before == after);
}

TEST_CASE("stratified split keeps per-cell proportions") {
  GridSpec g = tiny_grid();
  g.per_cell = 10;
  const Dataset ds = generate_dataset(g);
  const Splits s = split_dataset(ds, {0.7, 0.2, 0.1}, 5, true);
  std::map<std::tuple<double, double, double>, int> train_counts;
  for (const auto& row : s.train.rows)
    train_counts[{row[kColK1], row[kColPhi], row[kColLabel]}]++;
  for (const auto& [cell, n] : train_counts) CHECK(n == 7);
}

TEST_CASE("split rejects bad inputs") {
  const Dataset ds = generate_dataset(tiny_grid());
  Dataset empty;
  empty.schema = ds.schema;
  CHECK_THROWS_AS(split_dataset(empty, {0.7, 0.2, 0.1}, 1), ParamError);
  CHECK_THROWS_AS(split_dataset(ds, {0.7, 0.2, 0.2}, 1), ParamError);
  CHECK_THROWS_AS(split_dataset(ds, {1.0, -0.1, 0.1}, 1), ParamError);
}

TEST_CASE("ood test sets match the published grids") {
  const Dataset one = generate_ood_testset(1, 1, 3);
  CHECK(one.size() == 15);
  for (const auto& row : one.rows) CHECK(row[kColLabel] == 2.0);
  const Dataset two = generate_ood_testset(2, 4, 3);
  CHECK(two.size() == 4);
  for (const auto& row : two.rows) {
    CHECK(row[kColLabel] == 6.0);
    CHECK(row[kColK1] == 2.0);
    CHECK(row[kColPhi] == 0.5);
  }
  CHECK_THROWS_AS(generate_ood_testset(3, 1, 3), ParamError);
}

TEST_CASE("save and load round-trip exactly") {
  const Dataset ds = generate_dataset(tiny_grid());
  const auto path = temp_csv("nmdim_roundtrip.csv");
  save_dataset(ds, path.string());
  const Dataset back = load_dataset(path.string());
  CHECK(back.schema == ds.schema);
  CHECK(back.rows == ds.rows);
  CHECK(back.manifest.master_seed == ds.manifest.master_seed);
  CHECK(back.manifest.per_cell == ds.manifest.per_cell);
  CHECK(back.manifest.k1_values == ds.manifest.k1_values);
  CHECK(back.manifest.phi_values == ds.manifest.phi_values);
  CHECK(back.manifest.cells.size() == ds.manifest.cells.size());
}

TEST_CASE("loading a file with a missing column is a schema error") {
  const Dataset ds = generate_dataset(tiny_grid());
  const auto path = temp_csv("nmdim_badschema.csv");
  save_dataset(ds, path.string());
  // Drop the first column from the header.
  std::ifstream in(path);
  std::string header, rest((std::istreambuf_iterator<char>(in)), {});
  const auto nl = rest.find('\n');
  header = rest.substr(0, nl);
  header = header.substr(header.find(',') + 1);
  std::ofstream out(path);
  out << header << rest.substr(nl);
  out.close();
  CHECK_THROWS_AS(load_dataset(path.string()), SchemaError);
}

TEST_CASE("loading a malformed number names line and column") {
  const Dataset ds = generate_dataset(tiny_grid());
  const auto path = temp_csv("nmdim_badnum.csv");
  save_dataset(ds, path.string());
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  in.close();
  const auto pos = text.find('\n') + 1;
  text.replace(pos, 3, "xyz");
  std::ofstream(path) << text;
  try {
    load_dataset(path.string());
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("column 1") != std::string::npos);
  }
}

TEST_CASE("checksums are stable across identical generations") {
  const auto p1 = temp_csv("nmdim_sum1.csv");
  const auto p2 = temp_csv("nmdim_sum2.csv");
  save_dataset(generate_dataset(tiny_grid(), 1), p1.string());
  save_dataset(generate_dataset(tiny_grid(), 3), p2.string());
  CHECK(file_checksum(p1.string()) == file_checksum(p2.string()));
}
