#include "nmdim/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>

#include "nmdim/metrics.hpp"
#include "nmdim/parallel.hpp"
#include "nmdim/rng.hpp"

namespace nmdim {

double Tree::predict(std::span<const double> x) const {
  int i = 0;
  while (nodes[i].feature >= 0)
    i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left
                                                  : nodes[i].right;
  return nodes[i].value;
}

double Forest::predict(std::span<const double> x) const {
  if (x.size() != schema.size())
    throw SchemaError("predict: feature row width does not match the model");
  double acc = 0.0;
  for (const Tree& t : trees) acc += t.predict(x);
  return acc / static_cast<double>(trees.size());
}

namespace {

struct TreeBuilder {
  const Matrix& x;
  const std::vector<double>& y;
  const ForestConfig& cfg;
  int n_features;
  Rng rng;
  Tree tree;
  std::vector<int> feature_pool;  // scratch for candidate draws

  TreeBuilder(const Matrix& x_, const std::vector<double>& y_,
              const ForestConfig& cfg_, std::uint64_t seed)
      : x(x_), y(y_), cfg(cfg_),
        n_features(static_cast<int>(x_[0].size())), rng(seed) {
    feature_pool.resize(n_features);
    std::iota(feature_pool.begin(), feature_pool.end(), 0);
  }

  int make_leaf(double mean) {
    tree.nodes.push_back({-1, 0.0, -1, -1, mean});
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  int grow(std::vector<std::size_t>& rows, int depth) {
    const double n = static_cast<double>(rows.size());
    double sum = 0.0, sumsq = 0.0;
    double ymin = y[rows[0]], ymax = y[rows[0]];
    for (std::size_t r : rows) {
      sum += y[r];
      sumsq += y[r] * y[r];
      ymin = std::min(ymin, y[r]);
      ymax = std::max(ymax, y[r]);
    }
    const double mean = sum / n;
    if (rows.size() < static_cast<std::size_t>(cfg.min_samples_split) ||
        (cfg.max_depth > 0 && depth >= cfg.max_depth) || ymin == ymax)
      return make_leaf(mean);

    const double parent_var = std::max(0.0, sumsq / n - mean * mean);
    const int mf = cfg.max_features > 0
                       ? std::min(cfg.max_features, n_features)
                       : n_features;

    int best_feature = -1;
    double best_threshold = 0.0, best_score = -1.0;
    for (int j = 0; j < mf; ++j) {
      // Partial Fisher-Yates draw of distinct candidate features.
      const std::size_t pick =
          j + rng.uniform_index(static_cast<std::uint64_t>(n_features - j));
      std::swap(feature_pool[j], feature_pool[pick]);
      const int f = feature_pool[j];

      double lo = x[rows[0]][f], hi = lo;
      for (std::size_t r : rows) {
        lo = std::min(lo, x[r][f]);
        hi = std::max(hi, x[r][f]);
      }
      if (std::nextafter(lo, hi) >= hi) continue;  // constant feature

      double t;
      do {
        t = rng.uniform(lo, hi);
      } while (!(t > lo && t < hi));

      double nl = 0.0, suml = 0.0, sumsql = 0.0;
      for (std::size_t r : rows)
        if (x[r][f] <= t) {
          nl += 1.0;
          suml += y[r];
          sumsql += y[r] * y[r];
        }
      const double nr = n - nl;
      if (nl < cfg.min_samples_leaf || nr < cfg.min_samples_leaf) continue;
      const double meanl = suml / nl;
      const double meanr = (sum - suml) / nr;
      const double varl = std::max(0.0, sumsql / nl - meanl * meanl);
      const double varr =
          std::max(0.0, (sumsq - sumsql) / nr - meanr * meanr);
      const double score = parent_var - (nl / n) * varl - (nr / n) * varr;
      // Strict improvement only: ties keep the first candidate drawn.
      if (score > best_score) {
        best_score = score;
        best_feature = f;
        best_threshold = t;
      }
    }
    if (best_feature < 0) return make_leaf(mean);  // all candidates constant

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows)
      (x[r][best_feature] <= best_threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int node = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({best_feature, best_threshold, -1, -1, mean});
    tree.nodes[node].left = grow(left, depth + 1);
    tree.nodes[node].right = grow(right, depth + 1);
    return node;
  }
};

}  // namespace

Forest fit(const Matrix& x, const std::vector<double>& y,
           const std::vector<std::string>& schema, const ForestConfig& cfg,
           int workers) {
  if (x.empty()) throw ParamError("fit: empty training set");
  if (x.size() != y.size())
    throw ParamError("fit: feature/label count mismatch");
  const std::size_t width = schema.size();
  if (width == 0 || x[0].size() != width)
    throw SchemaError("fit: schema width does not match the feature matrix");
  if (cfg.n_trees < 1) throw ParamError("fit: n_trees must be >= 1");
  if (cfg.max_features > static_cast<int>(width))
    throw ParamError("fit: max_features exceeds the feature count");
  if (cfg.min_samples_split < 2 || cfg.min_samples_leaf < 1)
    throw ParamError("fit: invalid split/leaf minimums");

  Forest forest;
  forest.config = cfg;
  forest.schema = schema;
  forest.trees.resize(cfg.n_trees);
  if (cfg.bootstrap) forest.bootstrap_indices.resize(cfg.n_trees);
  forest.label_min = *std::min_element(y.begin(), y.end());
  forest.label_max = *std::max_element(y.begin(), y.end());

  const std::size_t m = x.size();
  parallel_for(static_cast<std::size_t>(cfg.n_trees), workers,
               [&](std::size_t t) {
                 TreeBuilder builder(x, y, cfg,
                                     Rng::mix(cfg.seed, t));
                 std::vector<std::size_t> rows(m);
                 if (cfg.bootstrap) {
                   for (std::size_t i = 0; i < m; ++i)
                     rows[i] = builder.rng.uniform_index(m);
                   forest.bootstrap_indices[t] = rows;
                 } else {
                   std::iota(rows.begin(), rows.end(), std::size_t{0});
                 }
                 builder.grow(rows, 0);
                 forest.trees[t] = std::move(builder.tree);
               });
  return forest;
}

std::vector<double> predict_all(const Forest& forest, const Matrix& x,
                                int workers) {
  std::vector<double> out(x.size());
  parallel_for(x.size(), workers,
               [&](std::size_t i) { out[i] = forest.predict(x[i]); });
  return out;
}

OobResult oob_score(const Forest& forest, const Matrix& x,
                    const std::vector<double>& y) {
  if (!forest.config.bootstrap || forest.bootstrap_indices.empty())
    throw ParamError("oob_score: forest was not fitted with bootstrap on");
  const std::size_t m = x.size();
  if (y.size() != m) throw ParamError("oob_score: feature/label mismatch");

  std::vector<std::vector<char>> in_bag(forest.trees.size(),
                                        std::vector<char>(m, 0));
  for (std::size_t t = 0; t < forest.trees.size(); ++t)
    for (std::size_t r : forest.bootstrap_indices[t]) in_bag[t][r] = 1;

  OobResult res;
  std::vector<double> truth;
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    int n_excluding = 0;
    for (std::size_t t = 0; t < forest.trees.size(); ++t)
      if (!in_bag[t][i]) {
        acc += forest.trees[t].predict(x[i]);
        ++n_excluding;
      }
    if (n_excluding == 0) continue;
    res.covered_rows.push_back(i);
    res.predictions.push_back(acc / n_excluding);
    truth.push_back(y[i]);
  }
  res.coverage = static_cast<double>(res.covered_rows.size()) /
                 static_cast<double>(m);
  if (!truth.empty()) res.r2 = r2(truth, res.predictions);
  return res;
}

std::vector<double> permutation_importance(const Forest& forest,
                                           const Matrix& x,
                                           const std::vector<double>& y,
                                           int repeats, std::uint64_t seed,
                                           int workers) {
  if (x.empty()) throw ParamError("permutation_importance: empty dataset");
  if (repeats < 1)
    throw ParamError("permutation_importance: repeats must be >= 1");
  const auto baseline_opt = r2(y, predict_all(forest, x, workers));
  if (!baseline_opt)
    throw ParamError("permutation_importance: label variance is zero");
  const double baseline = *baseline_opt;

  const std::size_t m = x.size();
  const std::size_t width = forest.schema.size();
  std::vector<double> drops(width, 0.0);
  parallel_for(width, workers, [&](std::size_t f) {
    Rng rng(Rng::mix(seed, f));
    std::vector<std::size_t> perm(m);
    std::vector<double> row(width), yhat(m);
    double total = 0.0;
    for (int rep = 0; rep < repeats; ++rep) {
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (std::size_t i = m; i > 1; --i)
        std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
      for (std::size_t i = 0; i < m; ++i) {
        row.assign(x[i].begin(), x[i].end());
        row[f] = x[perm[i]][f];
        yhat[i] = forest.predict(row);
      }
      total += r2(y, yhat).value_or(baseline);
    }
    drops[f] = baseline - total / repeats;
  });
  return drops;
}

std::vector<int> select_top_features(const std::vector<double>& importances,
                                     int k) {
  if (k < 0 || k > static_cast<int>(importances.size()))
    throw ParamError("select_top_features: k out of range");
  std::vector<int> idx(importances.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (importances[a] != importances[b]) return importances[a] > importances[b];
    return a < b;
  });
  idx.resize(k);
  return idx;
}

void save_forest(const Forest& forest, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model: " + path);
  char buf[64];
  auto hex = [&](double v) {
    std::snprintf(buf, sizeof buf, "%a", v);
    return std::string(buf);
  };
  const ForestConfig& c = forest.config;
  out << "nmdim-forest v1\n"
      << "n_trees=" << c.n_trees << '\n'
      << "max_features=" << c.max_features << '\n'
      << "min_samples_split=" << c.min_samples_split << '\n'
      << "min_samples_leaf=" << c.min_samples_leaf << '\n'
      << "max_depth=" << c.max_depth << '\n'
      << "bootstrap=" << (c.bootstrap ? 1 : 0) << '\n'
      << "seed=" << c.seed << '\n'
      << "label_min=" << hex(forest.label_min) << '\n'
      << "label_max=" << hex(forest.label_max) << '\n'
      << "features=" << forest.schema.size() << '\n';
  for (const auto& name : forest.schema) out << name << '\n';
  out << "trees=" << forest.trees.size() << '\n';
  for (const Tree& t : forest.trees) {
    out << "nodes=" << t.nodes.size() << '\n';
    for (const auto& node : t.nodes)
      out << node.feature << ' ' << node.left << ' ' << node.right << ' '
          << hex(node.threshold) << ' ' << hex(node.value) << '\n';
  }
  if (!out) throw IoError("failed writing model: " + path);
}

Forest load_forest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read model: " + path);
  std::string line;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line))
      throw IoError("truncated model file: " + path);
    return line;
  };
  auto expect_kv = [&](const std::string& key) {
    next_line();
    const std::string prefix = key + "=";
    if (line.rfind(prefix, 0) != 0)
      throw IoError("model file: expected key '" + key + "' in " + path);
    return line.substr(prefix.size());
  };
  if (next_line() != "nmdim-forest v1")
    throw SchemaError("unrecognized model file version: " + path);

  Forest forest;
  ForestConfig& c = forest.config;
  c.n_trees = std::stoi(expect_kv("n_trees"));
  c.max_features = std::stoi(expect_kv("max_features"));
  c.min_samples_split = std::stoi(expect_kv("min_samples_split"));
  c.min_samples_leaf = std::stoi(expect_kv("min_samples_leaf"));
  c.max_depth = std::stoi(expect_kv("max_depth"));
  c.bootstrap = std::stoi(expect_kv("bootstrap")) != 0;
  c.seed = std::stoull(expect_kv("seed"));
  forest.label_min = std::strtod(expect_kv("label_min").c_str(), nullptr);
  forest.label_max = std::strtod(expect_kv("label_max").c_str(), nullptr);
  const int n_features = std::stoi(expect_kv("features"));
  for (int i = 0; i < n_features; ++i) forest.schema.push_back(next_line());
  const int n_trees = std::stoi(expect_kv("trees"));
  for (int t = 0; t < n_trees; ++t) {
    const int n_nodes = std::stoi(expect_kv("nodes"));
    Tree tree;
    tree.nodes.reserve(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      next_line();
      Tree::Node node;
      char tbuf[64], vbuf[64];
      if (std::sscanf(line.c_str(), "%d %d %d %63s %63s", &node.feature,
                      &node.left, &node.right, tbuf, vbuf) != 5)
        throw IoError("malformed node line in model file: " + path);
      node.threshold = std::strtod(tbuf, nullptr);
      node.value = std::strtod(vbuf, nullptr);
      tree.nodes.push_back(node);
    }
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

}  // namespace nmdim
