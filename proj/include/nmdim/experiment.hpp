#pragma once

#include <string>
#include <vector>

#include "nmdim/dataset.hpp"
#include "nmdim/forest.hpp"
#include "nmdim/metrics.hpp"

namespace nmdim {

/// Everything a reproducible run needs. The single master seed drives all
/// randomized stages through derived child seeds; per-stage seeds cannot be
/// set independently.
struct ExperimentConfig {
  GridSpec grid{{1, 2, 4}, {1, 2, 8, 16}, {0.1, 0.2, 0.7, 1.0}, 4096, 0};
  SplitFractions fractions;
  ForestConfig forest;
  bool include_k1 = true;
  bool include_phi = true;
  std::vector<int> feature_subset;  // indices into the model schema; empty = all
  std::string out_dir = ".";
  std::string dataset_path;
  std::uint64_t master_seed = 0;
  int workers = 0;
  bool stratified = false;
  int importance_repeats = 5;
  int top_k = 0;
};

/// Flat key=value config file; unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);

/// Stage seeds derived from the master seed.
std::uint64_t stage_seed(const ExperimentConfig& cfg, const std::string& stage);

/// Feature-name list the model trains on: the 192 probability columns, then
/// k1 and phi when included, optionally restricted to a subset.
std::vector<std::string> model_schema(bool include_k1, bool include_phi,
                                      const std::vector<int>& subset = {});

/// Column extraction by name; throws SchemaError for names the dataset lacks.
Matrix extract_features(const Dataset& ds,
                        const std::vector<std::string>& names);
std::vector<double> labels_of(const Dataset& ds);

struct TrainResult {
  Forest forest;
  EvalReport train_report;
  EvalReport val_report;
  std::optional<double> oob_r2;
  double oob_coverage = 0.0;
  double fit_seconds = 0.0;
};

/// Split, fit, and score: the shared core of the train/reduce commands.
TrainResult train_model(const Dataset& ds, const ExperimentConfig& cfg);

/// Per-cell mean prediction lines for OOD evaluation reports.
std::string per_cell_summary(const Dataset& ds,
                             const std::vector<double>& predictions);

}  // namespace nmdim
