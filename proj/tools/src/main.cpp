// abc: anomaly-detection toolkit command line.
//
// Subcommands: gen-toy, train, score, heatmap, bench. Options come from a
// JSON config file (--config) with flag overrides; flags win. The resolved
// configuration is echoed to the output directory so any run can be repeated
// exactly from its artifacts.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "abc/data.hpp"
#include "abc/errors.hpp"
#include "abc/eval.hpp"
#include "abc/serialize.hpp"
#include "abc/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutDirEnv = "ABC_OUT_DIR";

// ---------------------------------------------------------------------------
// config plumbing

json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw abc::ConfigError("config: cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw abc::ConfigError("config: " + path + ": " + e.what());
  }
}

const json* section(const json& cfg, const char* name) {
  const auto it = cfg.find(name);
  if (it == cfg.end()) return nullptr;
  if (!it->is_object())
    throw abc::ConfigError(std::string("config: section '") + name + "' must be an object");
  return &*it;
}

template <typename T>
void merge_json(std::optional<T>& slot, const json* sec, const char* sec_name,
                const char* key) {
  if (slot.has_value() || sec == nullptr) return;
  const auto it = sec->find(key);
  if (it == sec->end() || it->is_null()) return;
  try {
    slot = it->get<T>();
  } catch (const json::exception&) {
    throw abc::ConfigError(std::string("config: ") + sec_name + "." + key +
                           ": wrong type (" + it->dump() + ")");
  }
}

// Every knob of train/bench, each unset until a flag or config supplies it.
struct Options {
  std::string config_path;
  std::optional<std::string> out_dir;

  std::optional<std::string> source;
  std::optional<std::string> data_path;
  std::optional<std::size_t> n_normal, n_known, n_unknown;
  std::optional<double> data_noise_std;
  std::optional<std::uint64_t> data_seed;
  std::optional<bool> scaling;

  std::optional<std::string> model_kind;
  std::optional<std::vector<std::size_t>> hidden;
  std::optional<std::size_t> latent;
  std::optional<std::string> distance;
  std::optional<double> model_noise_std;
  std::optional<double> clamp_min_error;

  std::optional<std::size_t> batch_size, max_epochs, patience;
  std::optional<double> validation_fraction;
  std::optional<std::uint64_t> seed;
  std::optional<double> learning_rate, beta1, beta2, epsilon;

  std::optional<int> setting;
  std::optional<std::size_t> contaminants;
  std::optional<std::size_t> known_cap;
  std::optional<std::vector<std::size_t>> known_caps;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> base_seed;
  std::optional<std::vector<std::string>> models;
  std::optional<std::size_t> workers;
};

void merge_config(Options& o) {
  if (o.config_path.empty()) return;
  const json cfg = load_config_file(o.config_path);
  const json* data = section(cfg, "data");
  merge_json(o.source, data, "data", "source");
  merge_json(o.data_path, data, "data", "path");
  merge_json(o.n_normal, data, "data", "n_normal");
  merge_json(o.n_known, data, "data", "n_known");
  merge_json(o.n_unknown, data, "data", "n_unknown");
  merge_json(o.data_noise_std, data, "data", "noise_std");
  merge_json(o.data_seed, data, "data", "seed");
  merge_json(o.scaling, data, "data", "scaling");

  const json* model = section(cfg, "model");
  merge_json(o.model_kind, model, "model", "kind");
  merge_json(o.hidden, model, "model", "hidden");
  merge_json(o.latent, model, "model", "latent");
  merge_json(o.distance, model, "model", "distance");
  merge_json(o.model_noise_std, model, "model", "noise_std");
  merge_json(o.clamp_min_error, model, "model", "clamp_min_error");

  const json* train = section(cfg, "train");
  merge_json(o.batch_size, train, "train", "batch_size");
  merge_json(o.max_epochs, train, "train", "max_epochs");
  merge_json(o.validation_fraction, train, "train", "validation_fraction");
  merge_json(o.patience, train, "train", "patience");
  merge_json(o.seed, train, "train", "seed");
  merge_json(o.learning_rate, train, "train", "learning_rate");
  merge_json(o.beta1, train, "train", "beta1");
  merge_json(o.beta2, train, "train", "beta2");
  merge_json(o.epsilon, train, "train", "epsilon");

  const json* exp = section(cfg, "experiment");
  merge_json(o.setting, exp, "experiment", "setting");
  merge_json(o.contaminants, exp, "experiment", "contaminants");
  merge_json(o.known_cap, exp, "experiment", "known_cap");
  merge_json(o.known_caps, exp, "experiment", "known_caps");
  merge_json(o.runs, exp, "experiment", "runs");
  merge_json(o.base_seed, exp, "experiment", "base_seed");
  merge_json(o.models, exp, "experiment", "models");
  merge_json(o.workers, exp, "experiment", "workers");

  const json* output = section(cfg, "output");
  merge_json(o.out_dir, output, "output", "dir");
}

// The fully resolved configuration a run executes under.
struct Effective {
  std::string source;
  std::string data_path;
  std::size_t n_normal = 20000, n_known = 20000, n_unknown = 10000;
  double data_noise_std = 0.3;
  std::uint64_t data_seed = 1;
  bool scaling = false;

  abc::TrainConfig train;  // model + optimizer + loop knobs

  abc::Setting setting = abc::Setting::S1;
  std::size_t contaminants = 100;
  std::optional<std::size_t> known_cap;
  std::vector<std::size_t> known_caps;
  std::size_t runs = 5;
  std::uint64_t base_seed = 7;
  std::vector<abc::ModelKind> models;
  std::size_t workers = 0;

  std::string out_dir;
};

std::string default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? env : ".";
}

abc::Setting setting_from_int(int s) {
  switch (s) {
    case 1: return abc::Setting::S1;
    case 2: return abc::Setting::S2;
    case 3: return abc::Setting::S3;
  }
  throw abc::ConfigError("experiment.setting must be 1, 2, or 3");
}

Effective resolve(Options o) {
  merge_config(o);

  Effective e;
  e.source = o.source.value_or("toy");
  if (e.source != "toy" && e.source != "csv")
    throw abc::ConfigError("data.source must be 'toy' or 'csv', got '" + e.source + "'");
  e.data_path = o.data_path.value_or("");
  if (e.source == "csv" && e.data_path.empty())
    throw abc::ConfigError("data.path is required when data.source is 'csv'");
  e.n_normal = o.n_normal.value_or(e.n_normal);
  e.n_known = o.n_known.value_or(e.n_known);
  e.n_unknown = o.n_unknown.value_or(e.n_unknown);
  e.data_noise_std = o.data_noise_std.value_or(e.data_noise_std);
  e.data_seed = o.data_seed.value_or(e.data_seed);

  // toy protocol: no scaling, 10-10 hidden, 1-d latent; anything else defaults
  // to the wide protocol with min-max scaling
  const bool toy = e.source == "toy";
  e.scaling = o.scaling.value_or(!toy);
  e.train.hidden = o.hidden.value_or(
      toy ? std::vector<std::size_t>{10, 10} : std::vector<std::size_t>{300, 100});
  e.train.latent = o.latent.value_or(toy ? 1 : 20);

  e.train.kind = abc::model_kind_from_string(o.model_kind.value_or("abc-ae"));
  e.train.distance = abc::distance_from_string(o.distance.value_or("squared-l2"));
  e.train.noise.noise_std = o.model_noise_std.value_or(e.train.noise.noise_std);
  e.train.clamp.min_error = o.clamp_min_error.value_or(e.train.clamp.min_error);
  e.train.batch_size = o.batch_size.value_or(e.train.batch_size);
  e.train.max_epochs = o.max_epochs.value_or(e.train.max_epochs);
  e.train.validation_fraction = o.validation_fraction.value_or(e.train.validation_fraction);
  e.train.patience = o.patience.value_or(e.train.patience);
  e.train.seed = o.seed.value_or(e.train.seed);
  e.train.adam.learning_rate = o.learning_rate.value_or(e.train.adam.learning_rate);
  e.train.adam.beta1 = o.beta1.value_or(e.train.adam.beta1);
  e.train.adam.beta2 = o.beta2.value_or(e.train.adam.beta2);
  e.train.adam.epsilon = o.epsilon.value_or(e.train.adam.epsilon);

  e.setting = setting_from_int(o.setting.value_or(1));
  e.contaminants = o.contaminants.value_or(e.contaminants);
  e.known_cap = o.known_cap;
  e.known_caps = o.known_caps.value_or(std::vector<std::size_t>{10, 100, 1000, 10000});
  e.runs = o.runs.value_or(e.runs);
  e.base_seed = o.base_seed.value_or(e.base_seed);
  const std::vector<std::string> roster = o.models.value_or(
      std::vector<std::string>{"abc-ae", "abc-dae", "lrc", "dnn", "ae", "dae"});
  for (const std::string& name : roster)
    e.models.push_back(abc::model_kind_from_string(name));
  e.workers = o.workers.value_or(0);

  e.out_dir = o.out_dir.value_or(default_out_dir());
  return e;
}

json effective_to_json(const Effective& e, bool bench) {
  json data{{"source", e.source},
            {"path", e.data_path.empty() ? json(nullptr) : json(e.data_path)},
            {"noise_std", e.data_noise_std},
            {"seed", e.data_seed},
            {"scaling", e.scaling}};
  if (e.source == "toy") {
    data["n_normal"] = e.n_normal;
    data["n_known"] = e.n_known;
    data["n_unknown"] = e.n_unknown;
  }
  json model{{"kind", abc::to_string(e.train.kind)},
             {"hidden", e.train.hidden},
             {"latent", e.train.latent},
             {"distance", abc::to_string(e.train.distance)},
             {"noise_std", e.train.noise.noise_std},
             {"clamp_min_error", e.train.clamp.min_error}};
  json train{{"batch_size", e.train.batch_size},
             {"max_epochs", e.train.max_epochs},
             {"validation_fraction", e.train.validation_fraction},
             {"patience", e.train.patience},
             {"seed", e.train.seed},
             {"learning_rate", e.train.adam.learning_rate},
             {"beta1", e.train.adam.beta1},
             {"beta2", e.train.adam.beta2},
             {"epsilon", e.train.adam.epsilon}};
  json exp{{"setting", static_cast<int>(e.setting)},
           {"contaminants", e.contaminants},
           {"known_cap", e.known_cap ? json(*e.known_cap) : json(nullptr)}};
  if (bench) {
    exp["known_caps"] = e.known_caps;
    exp["runs"] = e.runs;
    exp["base_seed"] = e.base_seed;
    json names = json::array();
    for (abc::ModelKind k : e.models) names.push_back(abc::to_string(k));
    exp["models"] = names;
    exp["workers"] = e.workers;
  }
  return json{{"data", data},
              {"model", model},
              {"train", train},
              {"experiment", exp},
              {"output", json{{"dir", e.out_dir}}}};
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw abc::ParseError(path.string() + ": cannot open file for writing");
  out << text;
  if (!out) throw abc::ParseError(path.string() + ": write failed");
}

abc::Dataset load_source(const Effective& e) {
  if (e.source == "csv") return abc::load_csv(e.data_path);
  return abc::gen_toy(e.n_normal, e.n_known, e.n_unknown, e.data_noise_std, e.data_seed);
}

// ---------------------------------------------------------------------------
// subcommands

struct GenToyOpts {
  std::size_t n_normal = 10000, n_known = 10000, n_unknown = 10000;
  double noise_std = 0.3;
  std::uint64_t seed = 1;
  std::string out_file;
};

int run_gen_toy(const GenToyOpts& opts) {
  const abc::Dataset ds =
      abc::gen_toy(opts.n_normal, opts.n_known, opts.n_unknown, opts.noise_std, opts.seed);
  fs::path out = opts.out_file.empty() ? fs::path(default_out_dir()) / "toy.csv"
                                       : fs::path(opts.out_file);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  abc::save_csv(ds, out.string());
  std::printf("wrote %s: %zu points (%zu normal, %zu known_anomaly, %zu unknown_anomaly)\n",
              out.string().c_str(), ds.size(), ds.count_role(abc::Role::Normal),
              ds.count_role(abc::Role::KnownAnomaly),
              ds.count_role(abc::Role::UnknownAnomaly));
  return 0;
}

int run_train(const Options& options) {
  const Effective e = resolve(options);
  const abc::Dataset source = load_source(e);
  abc::SettingParams params{e.contaminants, e.known_cap};
  abc::ExperimentSplit split =
      abc::assemble_setting(source, e.setting, params, e.train.seed);
  if (e.scaling) {
    const abc::MinMaxScaler scaler = abc::minmax_fit(split.train);
    split.train = abc::minmax_apply(scaler, split.train);
    split.test = abc::minmax_apply(scaler, split.test);
  }

  const abc::TrainedModel trained = abc::train(split.train, e.train);

  const fs::path dir(e.out_dir);
  fs::create_directories(dir);
  abc::save_model(trained.params, (dir / "model.json").string());
  abc::write_trainlog_csv(trained.log, (dir / "trainlog.csv").string());
  write_text_file(dir / "split_manifest.json", abc::split_manifest_json(split));
  write_text_file(dir / "effective_config.json",
                  effective_to_json(e, false).dump(2) + "\n");

  std::printf("trained %s: %zu epochs, best epoch %zu, best validation loss %.6g\n",
              abc::display_name(e.train.kind).c_str(), trained.log.epochs.size(),
              trained.best_epoch, trained.best_val_loss);
  std::printf("artifacts in %s: model.json trainlog.csv split_manifest.json "
              "effective_config.json\n",
              dir.string().c_str());
  return 0;
}

struct ScoreOpts {
  std::string model_file;
  std::string input_file;
  std::string out_file;
};

int run_score(const ScoreOpts& opts) {
  const abc::ModelParams model = abc::load_model(opts.model_file);
  const abc::Dataset input = abc::load_csv_features(opts.input_file);
  if (!input.points.empty() && input.dim != model.input_dim())
    throw abc::ShapeError("score: input has " + std::to_string(input.dim) +
                          " feature columns, model expects " +
                          std::to_string(model.input_dim()));

  fs::path out = opts.out_file.empty() ? fs::path(default_out_dir()) / "scores.csv"
                                       : fs::path(opts.out_file);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  const bool flagged = abc::has_calibrated_threshold(model.kind);

  std::ofstream file(out, std::ios::binary);
  if (!file) throw abc::ParseError(out.string() + ": cannot open file for writing");
  file << (flagged ? "score,flag\n" : "score\n");
  char buf[40];
  std::size_t n_flagged = 0;
  for (const abc::LabeledPoint& p : input.points) {
    const double s = abc::anomaly_score(model, p.x);
    std::snprintf(buf, sizeof buf, "%.17g", s);
    file << buf;
    if (flagged) {
      const bool anomalous = s > 0.5;
      n_flagged += anomalous;
      file << (anomalous ? ",true" : ",false");
    }
    file << '\n';
  }
  if (!file) throw abc::ParseError(out.string() + ": write failed");
  if (flagged)
    std::printf("scored %zu points -> %s (%zu flagged anomalous)\n", input.size(),
                out.string().c_str(), n_flagged);
  else
    std::printf("scored %zu points -> %s\n", input.size(), out.string().c_str());
  return 0;
}

struct HeatmapOpts {
  std::string model_file;
  std::string data_file;
  std::vector<double> bbox;  // xmin xmax ymin ymax
  std::size_t nx = 200, ny = 200;
  std::string out_file;
};

int run_heatmap(const HeatmapOpts& opts) {
  const abc::ModelParams model = abc::load_model(opts.model_file);
  abc::BBox box;
  if (!opts.bbox.empty()) {
    box = abc::BBox{opts.bbox[0], opts.bbox[1], opts.bbox[2], opts.bbox[3]};
  } else if (!opts.data_file.empty()) {
    box = abc::default_bbox(abc::load_csv_features(opts.data_file));
  } else {
    throw abc::ConfigError("heatmap: provide --bbox or --data for the bounding box");
  }
  const abc::HeatmapGrid grid = abc::heatmap(model, box, opts.nx, opts.ny);
  fs::path out = opts.out_file.empty() ? fs::path(default_out_dir()) / "heatmap.csv"
                                       : fs::path(opts.out_file);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  abc::write_heatmap_csv(grid, out.string());
  std::printf("wrote %s: %zux%zu grid over [%.6g, %.6g] x [%.6g, %.6g]\n",
              out.string().c_str(), grid.nx, grid.ny, box.xmin, box.xmax, box.ymin,
              box.ymax);
  return 0;
}

void write_bench_artifacts(const fs::path& dir, const abc::ExperimentResult& result,
                           const abc::Dataset& source) {
  fs::create_directories(dir);
  write_text_file(dir / "report.json", abc::report_to_json(result.report));
  const std::string table = abc::report_to_table(result.report);
  write_text_file(dir / "report.txt", table);
  std::fputs(table.c_str(), stdout);
  for (const auto& [kind, trained] : result.first_run_models) {
    const std::string name = abc::to_string(kind);
    abc::write_trainlog_csv(trained.log, (dir / ("trainlog_" + name + ".csv")).string());
    if (source.dim == 2) {
      const abc::HeatmapGrid grid =
          abc::heatmap(trained.params, abc::default_bbox(source), 200, 200);
      abc::write_heatmap_csv(grid, (dir / ("heatmap_" + name + ".csv")).string());
    }
  }
}

bool all_runs_failed(const abc::EvalReport& report) {
  for (const abc::ModelEvalRow& row : report.rows)
    if (row.run_errors.size() < report.runs) return false;
  return true;
}

int run_bench(const Options& options) {
  const Effective e = resolve(options);
  const abc::Dataset source = load_source(e);

  abc::ExperimentConfig xc;
  xc.models = e.models;
  xc.setting = e.setting;
  xc.setting_params.contaminants = e.contaminants;
  xc.apply_scaling = e.scaling;
  xc.runs = e.runs;
  xc.base_seed = e.base_seed;
  xc.train = e.train;
  xc.workers = e.workers;

  const fs::path dir(e.out_dir);
  fs::create_directories(dir);
  write_text_file(dir / "effective_config.json",
                  effective_to_json(e, true).dump(2) + "\n");

  bool everything_failed = true;
  if (e.setting == abc::Setting::S3) {
    // one report per known-anomaly cap (the class-imbalance sweep)
    std::vector<std::size_t> caps = e.known_caps;
    if (e.known_cap) caps = {*e.known_cap};
    for (std::size_t cap : caps) {
      xc.setting_params.known_cap = cap;
      std::printf("-- known-anomaly cap %zu --\n", cap);
      const abc::ExperimentResult result = abc::run_experiment(source, xc);
      write_bench_artifacts(dir / ("cap_" + std::to_string(cap)), result, source);
      everything_failed = everything_failed && all_runs_failed(result.report);
    }
  } else {
    const abc::ExperimentResult result = abc::run_experiment(source, xc);
    write_bench_artifacts(dir, result, source);
    everything_failed = all_runs_failed(result.report);
  }

  if (everything_failed) {
    std::fprintf(stderr, "error: every configured run failed\n");
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// wiring

void add_common_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "JSON config file; flags override it");
  cmd->add_option("--out", o.out_dir,
                  "output directory (default: $" + std::string(kOutDirEnv) + " or .)");

  cmd->add_option("--source", o.source, "data source: toy | csv");
  cmd->add_option("--data-path", o.data_path, "CSV dataset path (source=csv)");
  cmd->add_option("--n-normal", o.n_normal, "toy: normal count (default 20000)");
  cmd->add_option("--n-known", o.n_known, "toy: known-anomaly count (default 20000)");
  cmd->add_option("--n-unknown", o.n_unknown, "toy: unknown-anomaly count (default 10000)");
  cmd->add_option("--data-noise-std", o.data_noise_std, "toy: moon jitter std (default 0.3)");
  cmd->add_option("--data-seed", o.data_seed, "toy: generation seed (default 1)");
  cmd->add_option("--scaling", o.scaling,
                  "min-max scale from the train split (default: false for toy, true for csv)");

  cmd->add_option("--model", o.model_kind,
                  "model kind: abc-ae | abc-dae | lrc | dnn | ae | dae");
  cmd->add_option("--hidden", o.hidden, "hidden layer sizes (default: toy 10,10; csv 300,100)")
      ->delimiter(',');
  cmd->add_option("--latent", o.latent, "latent dimension (default: toy 1, csv 20)");
  cmd->add_option("--distance", o.distance, "reconstruction distance: squared-l2 | l2");
  cmd->add_option("--model-noise-std", o.model_noise_std,
                  "denoising input noise std (default 0.2)");
  cmd->add_option("--clamp", o.clamp_min_error,
                  "reconstruction-error floor in the anomaly loss term (default 1e-10)");

  cmd->add_option("--batch-size", o.batch_size, "minibatch size (default 100)");
  cmd->add_option("--max-epochs", o.max_epochs, "epoch cap (default 300)");
  cmd->add_option("--val-fraction", o.validation_fraction,
                  "validation fraction (default 0.2)");
  cmd->add_option("--patience", o.patience, "early-stopping patience (default 10)");
  cmd->add_option("--seed", o.seed, "training seed (default 7)");
  cmd->add_option("--lr", o.learning_rate, "Adam learning rate (default 1e-3)");
  cmd->add_option("--beta1", o.beta1, "Adam beta1 (default 0.9)");
  cmd->add_option("--beta2", o.beta2, "Adam beta2 (default 0.999)");
  cmd->add_option("--epsilon", o.epsilon, "Adam epsilon (default 1e-8)");

  cmd->add_option("--setting", o.setting, "experimental setting: 1 | 2 | 3");
  cmd->add_option("--contaminants", o.contaminants,
                  "setting 2: unknown anomalies mixed into training (default 100)");
  cmd->add_option("--known-cap", o.known_cap, "setting 3: known-anomaly training count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anomaly-detection toolkit: autoencoding binary classifiers and baselines"};
  app.require_subcommand(1);

  GenToyOpts gen_opts;
  CLI::App* gen = app.add_subcommand("gen-toy", "generate the 2-d toy dataset as CSV");
  gen->add_option("--n-normal", gen_opts.n_normal, "normal count (default 10000)");
  gen->add_option("--n-known", gen_opts.n_known, "known-anomaly count (default 10000)");
  gen->add_option("--n-unknown", gen_opts.n_unknown, "unknown-anomaly count (default 10000)");
  gen->add_option("--noise-std", gen_opts.noise_std, "moon jitter std (default 0.3)");
  gen->add_option("--seed", gen_opts.seed, "generation seed (default 1)");
  gen->add_option("--out-file", gen_opts.out_file, "output CSV (default <out>/toy.csv)");

  Options train_opts;
  CLI::App* train = app.add_subcommand("train", "train one model, write model + logs");
  add_common_options(train, train_opts);

  ScoreOpts score_opts;
  CLI::App* score = app.add_subcommand("score", "score a CSV with a trained model");
  score->add_option("--model-file", score_opts.model_file, "trained model JSON")->required();
  score->add_option("--input", score_opts.input_file, "input CSV (role column optional)")
      ->required();
  score->add_option("--out-file", score_opts.out_file, "output CSV (default <out>/scores.csv)");

  HeatmapOpts heat_opts;
  CLI::App* heat = app.add_subcommand("heatmap", "anomaly-score grid of a 2-d model");
  heat->add_option("--model-file", heat_opts.model_file, "trained model JSON")->required();
  heat->add_option("--data", heat_opts.data_file, "CSV whose bounding box (plus 20%) to use");
  heat->add_option("--bbox", heat_opts.bbox, "explicit box: xmin,xmax,ymin,ymax")
      ->delimiter(',')
      ->expected(4);
  heat->add_option("--nx", heat_opts.nx, "grid columns (default 200)");
  heat->add_option("--ny", heat_opts.ny, "grid rows (default 200)");
  heat->add_option("--out-file", heat_opts.out_file, "output CSV (default <out>/heatmap.csv)");

  Options bench_opts;
  CLI::App* bench = app.add_subcommand(
      "bench", "multi-run experiment: AUROC table, heatmaps, loss curves");
  add_common_options(bench, bench_opts);
  bench->add_option("--runs", bench_opts.runs, "independent runs (default 5)");
  bench->add_option("--base-seed", bench_opts.base_seed, "run r uses base+r (default 7)");
  bench->add_option("--models", bench_opts.models, "model roster (default: all six)")
      ->delimiter(',');
  bench->add_option("--known-caps", bench_opts.known_caps,
                    "setting 3 sweep values (default 10,100,1000,10000)")
      ->delimiter(',');
  bench->add_option("--workers", bench_opts.workers,
                    "parallel runs (default 0 = hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // map CLI11's exit codes onto the documented contract: 0 help, 1 usage
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return run_gen_toy(gen_opts);
    if (train->parsed()) return run_train(train_opts);
    if (score->parsed()) return run_score(score_opts);
    if (heat->parsed()) return run_heatmap(heat_opts);
    if (bench->parsed()) return run_bench(bench_opts);
  } catch (const abc::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const abc::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
