#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nmdim/errors.hpp"

namespace nmdim {

/// Hyper-parameters for the extremely randomized trees regressor.
/// max_features = 0 means "all features"; max_depth = 0 means unlimited.
/// Bootstrap defaults on so out-of-bag scores are available.
struct ForestConfig {
  int n_trees = 80;
  int max_features = 0;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  int max_depth = 0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct Tree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf: mean of training labels reaching it
  };
  std::vector<Node> nodes;

  double predict(std::span<const double> x) const;
};

struct Forest {
  ForestConfig config;
  std::vector<std::string> schema;  // training feature names
  std::vector<Tree> trees;
  // Per-tree bootstrap index multisets; kept in memory for OOB scoring,
  // not serialized with the model.
  std::vector<std::vector<std::size_t>> bootstrap_indices;
  double label_min = 0.0;
  double label_max = 0.0;

  double predict(std::span<const double> x) const;
};

using Matrix = std::vector<std::vector<double>>;

/// Fits n_trees independent trees. Per tree: optional bootstrap resample,
/// then recursive growth where each node draws max_features distinct
/// candidate features, one uniform threshold inside each candidate's node
/// range, and keeps the split with the largest variance reduction (ties to
/// the first candidate drawn). Deterministic for any worker count.
Forest fit(const Matrix& x, const std::vector<double>& y,
           const std::vector<std::string>& schema, const ForestConfig& cfg,
           int workers = 0);

std::vector<double> predict_all(const Forest& forest, const Matrix& x,
                                int workers = 0);

struct OobResult {
  std::optional<double> r2;  // empty when label variance is zero
  std::vector<double> predictions;  // per covered row
  std::vector<std::size_t> covered_rows;
  double coverage = 0.0;  // fraction of rows with at least one excluding tree
};

/// OOB prediction for each row = mean over trees whose bootstrap excluded it.
/// Requires a forest fitted with bootstrap on.
OobResult oob_score(const Forest& forest, const Matrix& x,
                    const std::vector<double>& y);

/// Mean drop in R^2 over `repeats` independent permutations of each feature
/// column. Returned in feature order (not ranked).
std::vector<double> permutation_importance(const Forest& forest,
                                           const Matrix& x,
                                           const std::vector<double>& y,
                                           int repeats, std::uint64_t seed,
                                           int workers = 0);

/// Indices of the k largest importances, descending; ties to the lower index.
std::vector<int> select_top_features(const std::vector<double>& importances,
                                     int k);

/// Versioned text serialization of config + trees + schema; exact round-trip.
void save_forest(const Forest& forest, const std::string& path);
Forest load_forest(const std::string& path);

}  // namespace nmdim
