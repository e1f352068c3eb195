#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abc/data.hpp"
#include "abc/train.hpp"

namespace abc {

/// Parallel lists of (anomaly score, is-anomaly).
struct ScoredSet {
  std::vector<double> scores;
  std::vector<int> is_anomaly;

  void add(double score, bool anomaly) {
    scores.push_back(score);
    is_anomaly.push_back(anomaly ? 1 : 0);
  }
  std::size_t size() const { return scores.size(); }
};

/// AUROC as the Mann-Whitney statistic: over all (anomaly, normal) pairs the
/// fraction with score(anomaly) > score(normal), ties counted 1/2. Computed
/// in O(n log n) via average ranks. Throws InputError on single-class input.
double auroc(const ScoredSet& scored);

/// Known-anomaly AUROC over normals + known anomalies, unknown-anomaly AUROC
/// over normals + unknown anomalies. An absent role yields an absent value.
struct SplitAurocs {
  std::optional<double> known;
  std::optional<double> unknown;
};
SplitAurocs evaluate_split(const ModelParams& model, const Dataset& test);

/// Two-sided Welch unequal-variance t-test. Both lists need >= 2 values.
/// Degenerate zero-variance inputs: p = 1 when the means agree, 0 otherwise.
double welch_t_test(const std::vector<double>& runs_a, const std::vector<double>& runs_b);

struct BBox {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

/// Data bounding box expanded 20% per side.
BBox default_bbox(const Dataset& ds, double margin = 0.2);

struct HeatmapGrid {
  BBox bbox;
  std::size_t nx = 0, ny = 0;
  std::vector<double> scores;  // row-major over y rows, evaluated at cell centers
};

/// Anomaly score of the model at every grid cell center. 2-D models only.
HeatmapGrid heatmap(const ModelParams& model, const BBox& bbox, std::size_t nx,
                    std::size_t ny);

void write_heatmap_csv(const HeatmapGrid& grid, const std::string& path);

struct ExperimentConfig {
  std::vector<ModelKind> models{ModelKind::AbcAe, ModelKind::AbcDae, ModelKind::Lrc,
                                ModelKind::Dnn,   ModelKind::Ae,     ModelKind::Dae};
  Setting setting = Setting::S1;
  SettingParams setting_params;
  bool apply_scaling = false;
  std::size_t runs = 5;
  std::uint64_t base_seed = 7;
  TrainConfig train;     // seed and kind overridden per run/model
  std::size_t workers = 0;  // 0 = hardware concurrency
};

struct ModelEvalRow {
  ModelKind kind = ModelKind::Ae;
  std::vector<double> known_runs;    // successful runs only
  std::vector<double> unknown_runs;
  std::vector<std::string> run_errors;  // one entry per failed run
  std::optional<double> known_mean, known_std;
  std::optional<double> unknown_mean, unknown_std;
  bool known_best_group = false;    // best or statistically indistinguishable
  bool unknown_best_group = false;  // from best (Welch p >= 0.05)
};

struct EvalReport {
  std::size_t runs = 0;
  Setting setting = Setting::S1;
  std::vector<ModelEvalRow> rows;
};

/// Result of one full experiment. First-run models and logs are retained so
/// callers can export heatmaps and loss curves without retraining.
struct ExperimentResult {
  EvalReport report;
  std::map<ModelKind, TrainedModel> first_run_models;
};

/// Runs the full protocol: per run r, assemble the split with seed
/// base_seed + r, train every model with that seed, evaluate on the test
/// side; then aggregate mean/std and mark best-or-indistinguishable entries
/// per anomaly class. Runs execute on a bounded worker pool; a run's
/// training failure is recorded in the report without affecting other runs.
ExperimentResult run_experiment(const Dataset& source, const ExperimentConfig& config);

std::string report_to_json(const EvalReport& report);

/// Aligned text table: one column per model, rows for known/unknown AUROC,
/// mean with parenthesized std in thousandths, '*' marking the best group.
std::string report_to_table(const EvalReport& report);

}  // namespace abc
