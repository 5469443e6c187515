#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmdim/errors.hpp"

namespace nmdim {

/// Parameter grid for dataset generation. One cell per (k1, k2, phi) triple;
/// cells are enumerated with k1 outermost and phi innermost.
struct GridSpec {
  std::vector<int> k1_values;
  std::vector<int> k2_values;
  std::vector<double> phi_values;
  int per_cell = 1;
  std::uint64_t master_seed = 0;
};

struct CellCount {
  int k1 = 0;
  int k2 = 0;
  double phi = 0.0;
  int count = 0;
};

struct Manifest {
  std::vector<int> k1_values;
  std::vector<int> k2_values;
  std::vector<double> phi_values;
  int per_cell = 0;
  std::uint64_t master_seed = 0;
  std::string artifact_version = "1";
  std::string feature_order = "lex(i1,i2,i3,i4);i4-fastest";
  std::string created_at;  // excluded from checksums
  std::vector<CellCount> cells;
};

/// Row layout is fixed: 192 probability features, then k1, phi, log2k2.
struct Dataset {
  std::vector<std::string> schema;
  std::vector<std::vector<double>> rows;
  Manifest manifest;

  std::size_t size() const { return rows.size(); }
};

inline constexpr int kColK1 = 192;
inline constexpr int kColPhi = 193;
inline constexpr int kColLabel = 194;
inline constexpr int kNumColumns = 195;

/// The canonical 195-name column list shared by every dataset file.
const std::vector<std::string>& canonical_schema();

/// Deterministically generates one example per (cell, index) pair; the child
/// seed is derived from (master_seed, k1, k2, phi-index, example-index), so
/// output is identical for any worker count.
Dataset generate_dataset(const GridSpec& grid, int workers = 0);

struct SplitFractions {
  double train = 0.7;
  double val = 0.2;
  double test = 0.1;
};

struct Splits {
  Dataset train, val, test;
};

/// Uniform shuffle by seed, then contiguous partition. Validation and test
/// sizes are floor(m * fraction); the remainder goes to train. Optional
/// stratification applies the same rule within each grid cell.
Splits split_dataset(const Dataset& ds, const SplitFractions& fractions,
                     std::uint64_t seed, bool stratified = false);

/// Out-of-range test sets. Kind 1: k2=4 over k1 in {1,2,4} and phi in
/// {0.1,0.2,0.5,0.7,1}. Kind 2: the single cell k1=2, k2=64, phi=0.5.
Dataset generate_ood_testset(int kind, int per_cell, std::uint64_t master_seed,
                             int workers = 0);

/// CSV with header row; manifest sidecar at the same basename + ".manifest".
/// Values are written with 17 significant digits, so round-trips are exact.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

/// FNV-1a over the CSV bytes (the manifest timestamp is not part of the CSV).
std::uint64_t file_checksum(const std::string& path);

}  // namespace nmdim
