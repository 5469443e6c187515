#include "nmdim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "nmdim/process.hpp"
#include "nmdim/rng.hpp"

namespace nmdim {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "on") return true;
  if (s == "0" || s == "false" || s == "off") return false;
  throw SchemaError("config: expected boolean, got '" + s + "'");
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw SchemaError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "k1_values") {
        cfg.grid.k1_values.clear();
        for (const auto& v : split_list(value))
          cfg.grid.k1_values.push_back(std::stoi(v));
      } else if (key == "k2_values") {
        cfg.grid.k2_values.clear();
        for (const auto& v : split_list(value))
          cfg.grid.k2_values.push_back(std::stoi(v));
      } else if (key == "phi_values") {
        cfg.grid.phi_values.clear();
        for (const auto& v : split_list(value))
          cfg.grid.phi_values.push_back(std::stod(v));
      } else if (key == "per_cell") {
        cfg.grid.per_cell = std::stoi(value);
      } else if (key == "seed") {
        cfg.master_seed = std::stoull(value);
      } else if (key == "train_fraction") {
        cfg.fractions.train = std::stod(value);
      } else if (key == "val_fraction") {
        cfg.fractions.val = std::stod(value);
      } else if (key == "test_fraction") {
        cfg.fractions.test = std::stod(value);
      } else if (key == "stratified") {
        cfg.stratified = parse_bool(value);
      } else if (key == "trees") {
        cfg.forest.n_trees = std::stoi(value);
      } else if (key == "max_features") {
        cfg.forest.max_features = value == "all" ? 0 : std::stoi(value);
      } else if (key == "min_samples_split") {
        cfg.forest.min_samples_split = std::stoi(value);
      } else if (key == "min_samples_leaf") {
        cfg.forest.min_samples_leaf = std::stoi(value);
      } else if (key == "max_depth") {
        cfg.forest.max_depth = value == "unlimited" ? 0 : std::stoi(value);
      } else if (key == "bootstrap") {
        cfg.forest.bootstrap = parse_bool(value);
      } else if (key == "include_k1") {
        cfg.include_k1 = parse_bool(value);
      } else if (key == "include_phi") {
        cfg.include_phi = parse_bool(value);
      } else if (key == "feature_subset") {
        cfg.feature_subset.clear();
        for (const auto& v : split_list(value))
          cfg.feature_subset.push_back(std::stoi(v));
      } else if (key == "out") {
        cfg.out_dir = value;
      } else if (key == "dataset") {
        cfg.dataset_path = value;
      } else if (key == "workers") {
        cfg.workers = std::stoi(value);
      } else if (key == "importance_repeats") {
        cfg.importance_repeats = std::stoi(value);
      } else if (key == "top_k") {
        cfg.top_k = std::stoi(value);
      } else {
        throw SchemaError("config line " + std::to_string(lineno) +
                          ": unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw SchemaError("config line " + std::to_string(lineno) +
                        ": bad value for '" + key + "'");
    }
  }
  cfg.grid.master_seed = cfg.master_seed;
  return cfg;
}

std::uint64_t stage_seed(const ExperimentConfig& cfg,
                         const std::string& stage) {
  std::uint64_t h = cfg.master_seed;
  for (char c : stage) h = Rng::mix(h, static_cast<unsigned char>(c));
  return h;
}

std::vector<std::string> model_schema(bool include_k1, bool include_phi,
                                      const std::vector<int>& subset) {
  std::vector<std::string> names;
  for (int i = 0; i < kNumFeatures; ++i) names.push_back(feature_name(i));
  if (include_k1) names.push_back("k1");
  if (include_phi) names.push_back("phi");
  if (subset.empty()) return names;
  std::vector<std::string> selected;
  for (int idx : subset) {
    if (idx < 0 || idx >= static_cast<int>(names.size()))
      throw SchemaError("feature subset index out of range");
    selected.push_back(names[idx]);
  }
  return selected;
}

Matrix extract_features(const Dataset& ds,
                        const std::vector<std::string>& names) {
  std::vector<std::size_t> cols;
  for (const auto& name : names) {
    const auto it = std::find(ds.schema.begin(), ds.schema.end(), name);
    if (it == ds.schema.end())
      throw SchemaError("dataset lacks column '" + name + "'");
    cols.push_back(static_cast<std::size_t>(it - ds.schema.begin()));
  }
  Matrix x(ds.rows.size(), std::vector<double>(cols.size()));
  for (std::size_t i = 0; i < ds.rows.size(); ++i)
    for (std::size_t c = 0; c < cols.size(); ++c)
      x[i][c] = ds.rows[i][cols[c]];
  return x;
}

std::vector<double> labels_of(const Dataset& ds) {
  std::vector<double> y(ds.rows.size());
  for (std::size_t i = 0; i < ds.rows.size(); ++i)
    y[i] = ds.rows[i][kColLabel];
  return y;
}

TrainResult train_model(const Dataset& ds, const ExperimentConfig& cfg) {
  const Splits splits = split_dataset(ds, cfg.fractions,
                                      stage_seed(cfg, "split"),
                                      cfg.stratified);
  const auto schema =
      model_schema(cfg.include_k1, cfg.include_phi, cfg.feature_subset);
  const Matrix x_train = extract_features(splits.train, schema);
  const Matrix x_val = extract_features(splits.val, schema);
  const std::vector<double> y_train = labels_of(splits.train);
  const std::vector<double> y_val = labels_of(splits.val);

  ForestConfig fcfg = cfg.forest;
  fcfg.seed = stage_seed(cfg, "fit");

  TrainResult res;
  const auto t0 = std::chrono::steady_clock::now();
  res.forest = fit(x_train, y_train, schema, fcfg, cfg.workers);
  res.fit_seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  res.train_report =
      evaluate(y_train, predict_all(res.forest, x_train, cfg.workers));
  res.val_report =
      evaluate(y_val, predict_all(res.forest, x_val, cfg.workers));
  if (fcfg.bootstrap) {
    const OobResult oob = oob_score(res.forest, x_train, y_train);
    res.oob_r2 = oob.r2;
    res.oob_coverage = oob.coverage;
  }
  return res;
}

std::string per_cell_summary(const Dataset& ds,
                             const std::vector<double>& predictions) {
  std::map<std::tuple<int, double, double>, std::pair<double, int>> cells;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    auto& [sum, n] = cells[{static_cast<int>(ds.rows[i][kColK1]),
                            ds.rows[i][kColPhi], ds.rows[i][kColLabel]}];
    sum += predictions[i];
    ++n;
  }
  std::string out;
  char buf[128];
  for (const auto& [key, agg] : cells) {
    std::snprintf(buf, sizeof buf,
                  "cell_mean k1=%d phi=%g log2k2=%g mean=%.6f n=%d\n",
                  std::get<0>(key), std::get<1>(key), std::get<2>(key),
                  agg.first / agg.second, agg.second);
    out += buf;
  }
  return out;
}

}  // namespace nmdim
