// Command-line front end: dataset generation, training, evaluation, and
// feature-importance workflows, all driven by one master seed.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nmdim/experiment.hpp"
#include "nmdim/process.hpp"

namespace fs = std::filesystem;
using namespace nmdim;

namespace {

struct Options {
  std::string config_path;
  std::string data_path;
  std::string model_path;
  std::string out_dir;
  int kind = 1;
  // Flag overrides; negative/unset values mean "keep the config value".
  long long seed = -1;
  int workers = -1;
  int trees = -1;
  int per_cell = -1;
  int top_k = -1;
  int repeats = -1;
  bool flag_include_k1 = false, flag_no_include_k1 = false;
  bool flag_include_phi = false, flag_no_include_phi = false;

  int include_k1() const {
    return flag_include_k1 ? 1 : flag_no_include_k1 ? 0 : -1;
  }
  int include_phi() const {
    return flag_include_phi ? 1 : flag_no_include_phi ? 0 : -1;
  }
};

ExperimentConfig resolve_config(const Options& opt) {
  ExperimentConfig cfg;
  if (!opt.config_path.empty()) cfg = load_config(opt.config_path);
  if (opt.seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(opt.seed);
  if (opt.workers >= 0) cfg.workers = opt.workers;
  if (opt.trees >= 0) cfg.forest.n_trees = opt.trees;
  if (opt.per_cell >= 0) cfg.grid.per_cell = opt.per_cell;
  if (opt.top_k >= 0) cfg.top_k = opt.top_k;
  if (opt.repeats >= 0) cfg.importance_repeats = opt.repeats;
  if (opt.include_k1() >= 0) cfg.include_k1 = opt.include_k1() != 0;
  if (opt.include_phi() >= 0) cfg.include_phi = opt.include_phi() != 0;
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (!opt.data_path.empty()) cfg.dataset_path = opt.data_path;
  cfg.grid.master_seed = cfg.master_seed;
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write: " + path.string());
  out << text;
  if (!out) throw IoError("failed writing: " + path.string());
}

std::string report_block(const char* tag, const EvalReport& rep) {
  std::string out = std::string("[") + tag + "]\n" + to_text(rep);
  return out;
}

void print_cells_and_checksum(const Dataset& ds, const fs::path& csv) {
  for (const auto& c : ds.manifest.cells)
    std::printf("cell k1=%d k2=%d phi=%g count=%d\n", c.k1, c.k2, c.phi,
                c.count);
  std::printf("rows=%zu\nchecksum=%016llx\n", ds.size(),
              static_cast<unsigned long long>(file_checksum(csv.string())));
}

Dataset load_required_dataset(const ExperimentConfig& cfg) {
  if (cfg.dataset_path.empty())
    throw SchemaError("no dataset given (use --data or the config key)");
  return load_dataset(cfg.dataset_path);
}

int cmd_generate(const Options& opt) {
  const ExperimentConfig cfg = resolve_config(opt);
  fs::create_directories(cfg.out_dir);
  const Dataset ds = generate_dataset(cfg.grid, cfg.workers);
  const fs::path csv = fs::path(cfg.out_dir) / "dataset.csv";
  save_dataset(ds, csv.string());
  print_cells_and_checksum(ds, csv);
  return 0;
}

int cmd_oodgen(const Options& opt) {
  const ExperimentConfig cfg = resolve_config(opt);
  fs::create_directories(cfg.out_dir);
  const Dataset ds = generate_ood_testset(opt.kind, cfg.grid.per_cell,
                                          cfg.master_seed, cfg.workers);
  const fs::path csv =
      fs::path(cfg.out_dir) / ("ood" + std::to_string(opt.kind) + ".csv");
  save_dataset(ds, csv.string());
  print_cells_and_checksum(ds, csv);
  return 0;
}

int cmd_split(const Options& opt) {
  const ExperimentConfig cfg = resolve_config(opt);
  fs::create_directories(cfg.out_dir);
  const Dataset ds = load_required_dataset(cfg);
  const Splits splits = split_dataset(ds, cfg.fractions,
                                      stage_seed(cfg, "split"),
                                      cfg.stratified);
  save_dataset(splits.train, (fs::path(cfg.out_dir) / "train.csv").string());
  save_dataset(splits.val, (fs::path(cfg.out_dir) / "val.csv").string());
  save_dataset(splits.test, (fs::path(cfg.out_dir) / "test.csv").string());
  std::printf("train=%zu val=%zu test=%zu\n", splits.train.size(),
              splits.val.size(), splits.test.size());
  return 0;
}

int cmd_train(const Options& opt) {
  const ExperimentConfig cfg = resolve_config(opt);
  fs::create_directories(cfg.out_dir);
  const Dataset ds = load_required_dataset(cfg);
  const TrainResult res = train_model(ds, cfg);
  save_forest(res.forest, (fs::path(cfg.out_dir) / "model.txt").string());

  std::string report = report_block("train", res.train_report) +
                       report_block("validation", res.val_report);
  char buf[96];
  if (res.oob_r2)
    std::snprintf(buf, sizeof buf, "[oob]\nr2=%.17g\ncoverage=%.6f\n",
                  *res.oob_r2, res.oob_coverage);
  else
    std::snprintf(buf, sizeof buf, "[oob]\nr2=undefined\ncoverage=%.6f\n",
                  res.oob_coverage);
  report += buf;
  std::snprintf(buf, sizeof buf, "fit_seconds=%.3f\n", res.fit_seconds);
  report += buf;
  write_text(fs::path(cfg.out_dir) / "train_report.txt", report);
  std::fputs(report.c_str(), stdout);
  return 0;
}

int cmd_evaluate(const Options& opt) {
  const ExperimentConfig cfg = resolve_config(opt);
  fs::create_directories(cfg.out_dir);
  const Forest model = load_forest(opt.model_path);
  const Dataset ds = load_required_dataset(cfg);
  const Matrix x = extract_features(ds, model.schema);
  const std::vector<double> y = labels_of(ds);
  const std::vector<double> yhat = predict_all(model, x, cfg.workers);
  std::string report = report_block("evaluation", evaluate(y, yhat));
  report += per_cell_summary(ds, yhat);
  write_text(fs::path(cfg.out_dir) / "eval_report.txt", report);
  std::fputs(report.c_str(), stdout);
  return 0;
}

int cmd_importance(const Options& opt) {
  const ExperimentConfig cfg = resolve_config(opt);
  fs::create_directories(cfg.out_dir);
  const Forest model = load_forest(opt.model_path);
  const Dataset ds = load_required_dataset(cfg);
  const Matrix x = extract_features(ds, model.schema);
  const std::vector<double> y = labels_of(ds);
  const auto drops = permutation_importance(model, x, y,
                                            cfg.importance_repeats,
                                            stage_seed(cfg, "importance"),
                                            cfg.workers);
  const auto order =
      select_top_features(drops, static_cast<int>(drops.size()));
  std::string out;
  char buf[96];
  for (int idx : order) {
    std::snprintf(buf, sizeof buf, "%s %.17g\n", model.schema[idx].c_str(),
                  drops[idx]);
    out += buf;
  }
  write_text(fs::path(cfg.out_dir) / "importance.txt", out);
  std::fputs(out.c_str(), stdout);
  return 0;
}

int cmd_reduce(const Options& opt) {
  ExperimentConfig cfg = resolve_config(opt);
  if (cfg.top_k < 1)
    throw SchemaError("reduce: --top-k must be given and positive");
  fs::create_directories(cfg.out_dir);
  const Dataset ds = load_required_dataset(cfg);

  const TrainResult full = train_model(ds, cfg);
  const Splits splits = split_dataset(ds, cfg.fractions,
                                      stage_seed(cfg, "split"),
                                      cfg.stratified);
  const auto schema = model_schema(cfg.include_k1, cfg.include_phi);
  const Matrix x_val = extract_features(splits.val, schema);
  const auto drops = permutation_importance(full.forest, x_val,
                                            labels_of(splits.val),
                                            cfg.importance_repeats,
                                            stage_seed(cfg, "importance"),
                                            cfg.workers);
  ExperimentConfig reduced_cfg = cfg;
  reduced_cfg.feature_subset = select_top_features(drops, cfg.top_k);
  const TrainResult reduced = train_model(ds, reduced_cfg);

  save_forest(full.forest, (fs::path(cfg.out_dir) / "model_full.txt").string());
  save_forest(reduced.forest,
              (fs::path(cfg.out_dir) / "model_reduced.txt").string());
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "full_val_r2=%.17g\nreduced_val_r2=%.17g\ntop_k=%d\n",
                full.val_report.r2.value_or(NAN),
                reduced.val_report.r2.value_or(NAN), cfg.top_k);
  write_text(fs::path(cfg.out_dir) / "reduce_report.txt", buf);
  std::fputs(buf, stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Markovian environment dimension estimation pipeline"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "flat key=value config file");
    sub->add_option("--seed", opt.seed, "master seed (overrides config)");
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--workers", opt.workers, "worker thread cap");
  };

  CLI::App* generate = app.add_subcommand("generate", "generate a labelled dataset");
  add_common(generate);
  generate->add_option("--per-cell", opt.per_cell, "examples per grid cell");

  CLI::App* oodgen = app.add_subcommand("oodgen", "generate an out-of-range test set");
  add_common(oodgen);
  oodgen->add_option("--kind", opt.kind, "1 (k2=4 grid) or 2 (k2=64 cell)");
  oodgen->add_option("--per-cell", opt.per_cell, "examples per grid cell");

  CLI::App* split = app.add_subcommand("split", "shuffle and split a dataset");
  add_common(split);
  split->add_option("--data", opt.data_path, "dataset CSV");

  CLI::App* train = app.add_subcommand("train", "split, fit, and score a forest");
  add_common(train);
  train->add_option("--data", opt.data_path, "dataset CSV");
  train->add_option("--trees", opt.trees, "number of trees");
  train->add_flag("--include-k1", opt.flag_include_k1,
                  "train with the k1 side-feature");
  train->add_flag("--no-include-k1", opt.flag_no_include_k1,
                  "train without the k1 side-feature");
  train->add_flag("--include-phi", opt.flag_include_phi,
                  "train with the phi side-feature");
  train->add_flag("--no-include-phi", opt.flag_no_include_phi,
                  "train without the phi side-feature");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a model on a dataset");
  add_common(evaluate);
  evaluate->add_option("--model", opt.model_path, "model file")->required();
  evaluate->add_option("--data", opt.data_path, "dataset CSV");

  CLI::App* importance = app.add_subcommand("importance", "permutation feature importance");
  add_common(importance);
  importance->add_option("--model", opt.model_path, "model file")->required();
  importance->add_option("--data", opt.data_path, "dataset CSV");
  importance->add_option("--repeats", opt.repeats, "permutations per feature");

  CLI::App* reduce = app.add_subcommand("reduce", "retrain on the top-k features");
  add_common(reduce);
  reduce->add_option("--data", opt.data_path, "dataset CSV");
  reduce->add_option("--trees", opt.trees, "number of trees");
  reduce->add_option("--top-k", opt.top_k, "feature count to keep");
  reduce->add_option("--repeats", opt.repeats, "permutations per feature");
  reduce->add_flag("--include-k1", opt.flag_include_k1,
                   "train with the k1 side-feature");
  reduce->add_flag("--no-include-k1", opt.flag_no_include_k1,
                   "train without the k1 side-feature");
  reduce->add_flag("--include-phi", opt.flag_include_phi,
                   "train with the phi side-feature");
  reduce->add_flag("--no-include-phi", opt.flag_no_include_phi,
                   "train without the phi side-feature");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(opt);
    if (oodgen->parsed()) return cmd_oodgen(opt);
    if (split->parsed()) return cmd_split(opt);
    if (train->parsed()) return cmd_train(opt);
    if (evaluate->parsed()) return cmd_evaluate(opt);
    if (importance->parsed()) return cmd_importance(opt);
    if (reduce->parsed()) return cmd_reduce(opt);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "schema/config error: " << e.what() << '\n';
    return 3;
  } catch (const ParamError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
