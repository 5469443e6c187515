#include "nmdim/dataset.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "nmdim/parallel.hpp"
#include "nmdim/process.hpp"
#include "nmdim/rng.hpp"

namespace nmdim {

const std::vector<std::string>& canonical_schema() {
  static const std::vector<std::string> schema = [] {
    std::vector<std::string> s;
    s.reserve(kNumColumns);
    for (int i = 0; i < kNumFeatures; ++i) s.push_back(feature_name(i));
    s.push_back("k1");
    s.push_back("phi");
    s.push_back("log2k2");
    return s;
  }();
  return schema;
}

namespace {

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t child_seed(std::uint64_t master, int k1, int k2, int phi_index,
                         int example_index) {
  std::uint64_t s = Rng::mix(master, static_cast<std::uint64_t>(k1));
  s = Rng::mix(s, static_cast<std::uint64_t>(k2));
  s = Rng::mix(s, static_cast<std::uint64_t>(phi_index));
  return Rng::mix(s, static_cast<std::uint64_t>(example_index));
}

void validate_grid(const GridSpec& grid) {
  if (grid.k1_values.empty() || grid.k2_values.empty() ||
      grid.phi_values.empty())
    throw ParamError("generate_dataset: empty grid value list");
  if (grid.per_cell < 1)
    throw ParamError("generate_dataset: per_cell must be >= 1");
  for (int k : grid.k1_values)
    if (k < 1) throw ParamError("generate_dataset: k1 values must be >= 1");
  for (int k : grid.k2_values)
    if (k < 1) throw ParamError("generate_dataset: k2 values must be >= 1");
}

// Recount cells from rows; used for split outputs where the parent
// manifest's per-cell counts no longer apply.
std::vector<CellCount> recount_cells(const Dataset& ds) {
  std::map<std::tuple<int, int, double>, int> counts;
  for (const auto& row : ds.rows) {
    const int k1 = static_cast<int>(row[kColK1]);
    const int k2 = static_cast<int>(std::llround(std::exp2(row[kColLabel])));
    counts[{k1, k2, row[kColPhi]}]++;
  }
  std::vector<CellCount> cells;
  for (const auto& [key, n] : counts)
    cells.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), n});
  return cells;
}

}  // namespace

Dataset generate_dataset(const GridSpec& grid, int workers) {
  validate_grid(grid);
  struct Cell {
    int k1, k2, phi_index;
    double phi;
  };
  std::vector<Cell> cells;
  for (int k1 : grid.k1_values)
    for (int k2 : grid.k2_values)
      for (int pi = 0; pi < static_cast<int>(grid.phi_values.size()); ++pi)
        cells.push_back({k1, k2, pi, grid.phi_values[pi]});

  Dataset ds;
  ds.schema = canonical_schema();
  ds.rows.assign(cells.size() * grid.per_cell,
                 std::vector<double>(kNumColumns));

  parallel_for(ds.rows.size(), workers, [&](std::size_t g) {
    const Cell& cell = cells[g / grid.per_cell];
    const int index = static_cast<int>(g % grid.per_cell);
    Rng rng(child_seed(grid.master_seed, cell.k1, cell.k2, cell.phi_index,
                       index));
    const ProcessParams params{cell.k1, cell.k2, cell.phi};
    const ProcessInstance inst = sample_process(params, rng);
    const auto features = generate_features(inst);
    auto& row = ds.rows[g];
    std::copy(features.begin(), features.end(), row.begin());
    row[kColK1] = cell.k1;
    row[kColPhi] = cell.phi;
    row[kColLabel] = std::log2(static_cast<double>(cell.k2));
  });

  ds.manifest.k1_values = grid.k1_values;
  ds.manifest.k2_values = grid.k2_values;
  ds.manifest.phi_values = grid.phi_values;
  ds.manifest.per_cell = grid.per_cell;
  ds.manifest.master_seed = grid.master_seed;
  ds.manifest.created_at = now_iso8601();
  for (const Cell& c : cells)
    ds.manifest.cells.push_back({c.k1, c.k2, c.phi, grid.per_cell});
  return ds;
}

Splits split_dataset(const Dataset& ds, const SplitFractions& f,
                     std::uint64_t seed, bool stratified) {
  if (ds.rows.empty()) throw ParamError("split_dataset: empty dataset");
  if (!(f.train > 0 && f.val > 0 && f.test > 0))
    throw ParamError("split_dataset: fractions must be positive");
  if (std::abs(f.train + f.val + f.test - 1.0) > 1e-9)
    throw ParamError("split_dataset: fractions must sum to 1");

  auto shuffle = [](std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
  };
  auto partition = [&](const std::vector<std::size_t>& idx, Splits& out) {
    const std::size_t m = idx.size();
    const auto n_val = static_cast<std::size_t>(std::floor(m * f.val));
    const auto n_test = static_cast<std::size_t>(std::floor(m * f.test));
    const std::size_t n_train = m - n_val - n_test;  // remainder to train
    for (std::size_t i = 0; i < m; ++i) {
      Dataset& dst = i < n_train          ? out.train
                     : i < n_train + n_val ? out.val
                                           : out.test;
      dst.rows.push_back(ds.rows[idx[i]]);
    }
  };

  Splits out;
  Rng rng(seed);
  if (!stratified) {
    std::vector<std::size_t> idx(ds.rows.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    shuffle(idx, rng);
    partition(idx, out);
  } else {
    std::map<std::tuple<double, double, double>, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < ds.rows.size(); ++i)
      cells[{ds.rows[i][kColK1], ds.rows[i][kColPhi], ds.rows[i][kColLabel]}]
          .push_back(i);
    for (auto& [key, idx] : cells) {
      shuffle(idx, rng);
      partition(idx, out);
    }
  }
  for (Dataset* d : {&out.train, &out.val, &out.test}) {
    d->schema = ds.schema;
    d->manifest = ds.manifest;
    d->manifest.cells = recount_cells(*d);
    d->manifest.created_at = now_iso8601();
  }
  return out;
}

Dataset generate_ood_testset(int kind, int per_cell, std::uint64_t master_seed,
                             int workers) {
  GridSpec grid;
  grid.per_cell = per_cell;
  grid.master_seed = master_seed;
  if (kind == 1) {
    grid.k1_values = {1, 2, 4};
    grid.k2_values = {4};
    grid.phi_values = {0.1, 0.2, 0.5, 0.7, 1.0};
  } else if (kind == 2) {
    grid.k1_values = {2};
    grid.k2_values = {64};
    grid.phi_values = {0.5};
  } else {
    throw ParamError("generate_ood_testset: kind must be 1 or 2");
  }
  return generate_dataset(grid, workers);
}

namespace {

std::filesystem::path manifest_path(const std::string& csv_path) {
  return std::filesystem::path(csv_path).replace_extension(".manifest");
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, double>)
      out += format_value(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

void save_manifest(const Manifest& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << "artifact_version=" << m.artifact_version << '\n'
      << "feature_order=" << m.feature_order << '\n'
      << "master_seed=" << m.master_seed << '\n'
      << "per_cell=" << m.per_cell << '\n'
      << "k1_values=" << join(m.k1_values) << '\n'
      << "k2_values=" << join(m.k2_values) << '\n'
      << "phi_values=" << join(m.phi_values) << '\n'
      << "created_at=" << m.created_at << '\n'
      << "cells=" << m.cells.size() << '\n';
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    const CellCount& c = m.cells[i];
    out << "cell_" << i << '=' << c.k1 << ',' << c.k2 << ','
        << format_value(c.phi) << ',' << c.count << '\n';
  }
  if (!out) throw IoError("failed writing manifest: " + path.string());
}

std::vector<std::string> split_csv_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest: " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("malformed manifest line in " + path.string());
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  Manifest m;
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw SchemaError("manifest missing key '" + key + "': " + path.string());
    return it->second;
  };
  m.artifact_version = get("artifact_version");
  m.feature_order = get("feature_order");
  m.master_seed = std::stoull(get("master_seed"));
  m.per_cell = std::stoi(get("per_cell"));
  m.created_at = get("created_at");
  for (const auto& s : split_csv_fields(get("k1_values")))
    m.k1_values.push_back(std::stoi(s));
  for (const auto& s : split_csv_fields(get("k2_values")))
    m.k2_values.push_back(std::stoi(s));
  for (const auto& s : split_csv_fields(get("phi_values")))
    m.phi_values.push_back(std::stod(s));
  const int ncells = std::stoi(get("cells"));
  for (int i = 0; i < ncells; ++i) {
    const auto fields = split_csv_fields(get("cell_" + std::to_string(i)));
    if (fields.size() != 4)
      throw IoError("malformed cell entry in " + path.string());
    m.cells.push_back({std::stoi(fields[0]), std::stoi(fields[1]),
                       std::stod(fields[2]), std::stoi(fields[3])});
  }
  return m;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset: " + path);
  for (std::size_t c = 0; c < ds.schema.size(); ++c)
    out << (c ? "," : "") << ds.schema[c];
  out << '\n';
  std::string line;
  for (const auto& row : ds.rows) {
    line.clear();
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += ',';
      line += format_value(row[c]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("failed writing dataset: " + path);
  save_manifest(ds.manifest, manifest_path(path));
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read dataset: " + path);
  Dataset ds;
  std::string line;
  if (!std::getline(in, line))
    throw IoError("empty dataset file: " + path);
  ds.schema = split_csv_fields(line);
  if (ds.schema != canonical_schema())
    throw SchemaError("dataset header does not match the expected schema: " +
                      path);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv_fields(line);
    if (fields.size() != ds.schema.size())
      throw IoError("line " + std::to_string(lineno) + ": expected " +
                    std::to_string(ds.schema.size()) + " columns, got " +
                    std::to_string(fields.size()) + " in " + path);
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto& f = fields[c];
      const auto res =
          std::from_chars(f.data(), f.data() + f.size(), row[c]);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
        throw IoError("line " + std::to_string(lineno) + ", column " +
                      std::to_string(c + 1) + ": bad number '" + f + "' in " +
                      path);
    }
    ds.rows.push_back(std::move(row));
  }
  ds.manifest = load_manifest(manifest_path(path));
  return ds;
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file for checksum: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace nmdim
