#include "abc/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <thread>

#include "abc/errors.hpp"
#include "abc/stats.hpp"

#include <nlohmann/json.hpp>

namespace abc {

double auroc(const ScoredSet& scored) {
  if (scored.scores.size() != scored.is_anomaly.size())
    throw InputError("auroc: parallel lists differ in length");
  const std::size_t n = scored.scores.size();
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(scored.scores[i])) throw InputError("auroc: non-finite score");
    if (scored.is_anomaly[i]) ++n_pos;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw InputError("auroc: need at least one anomaly and one normal point");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored.scores[a] < scored.scores[b];
  });

  // average ranks over tie groups; rank sum of the anomaly class gives the
  // Mann-Whitney U
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scored.scores[order[j]] == scored.scores[order[i]]) ++j;
    const double avg_rank = static_cast<double>(i + 1 + j) / 2.0;  // 1-based ranks
    for (std::size_t k = i; k < j; ++k)
      if (scored.is_anomaly[order[k]]) pos_rank_sum += avg_rank;
    i = j;
  }
  const double u = pos_rank_sum -
                   static_cast<double>(n_pos) * static_cast<double>(n_pos + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

SplitAurocs evaluate_split(const ModelParams& model, const Dataset& test) {
  ScoredSet known_set, unknown_set;
  for (const LabeledPoint& p : test.points) {
    const double s = anomaly_score(model, p.x);
    switch (p.role) {
      case Role::Normal:
        known_set.add(s, false);
        unknown_set.add(s, false);
        break;
      case Role::KnownAnomaly:
        known_set.add(s, true);
        break;
      case Role::UnknownAnomaly:
        unknown_set.add(s, true);
        break;
    }
  }
  const std::size_t normals = test.count_role(Role::Normal);
  SplitAurocs result;
  if (normals > 0 && test.count_role(Role::KnownAnomaly) > 0)
    result.known = auroc(known_set);
  if (normals > 0 && test.count_role(Role::UnknownAnomaly) > 0)
    result.unknown = auroc(unknown_set);
  return result;
}

double welch_t_test(const std::vector<double>& runs_a, const std::vector<double>& runs_b) {
  if (runs_a.size() < 2 || runs_b.size() < 2)
    throw InputError("welch_t_test: each sample needs at least 2 values");
  const double na = static_cast<double>(runs_a.size());
  const double nb = static_cast<double>(runs_b.size());
  const double ma = mean(runs_a);
  const double mb = mean(runs_b);
  const double va = sample_variance(runs_a);
  const double vb = sample_variance(runs_b);
  if (va == 0.0 && vb == 0.0) return ma == mb ? 1.0 : 0.0;

  const double se2 = va / na + vb / nb;
  const double t = (ma - mb) / std::sqrt(se2);
  const double nu = se2 * se2 / ((va / na) * (va / na) / (na - 1.0) +
                                 (vb / nb) * (vb / nb) / (nb - 1.0));
  return student_t_two_sided_p(t, nu);
}

BBox default_bbox(const Dataset& ds, double margin) {
  if (ds.points.empty()) throw InputError("default_bbox: empty dataset");
  if (ds.dim != 2) throw ConfigError("default_bbox: 2-d datasets only");
  BBox box{ds.points[0].x[0], ds.points[0].x[0], ds.points[0].x[1], ds.points[0].x[1]};
  for (const LabeledPoint& p : ds.points) {
    box.xmin = std::min(box.xmin, p.x[0]);
    box.xmax = std::max(box.xmax, p.x[0]);
    box.ymin = std::min(box.ymin, p.x[1]);
    box.ymax = std::max(box.ymax, p.x[1]);
  }
  const double dx = margin * (box.xmax - box.xmin);
  const double dy = margin * (box.ymax - box.ymin);
  box.xmin -= dx;
  box.xmax += dx;
  box.ymin -= dy;
  box.ymax += dy;
  return box;
}

HeatmapGrid heatmap(const ModelParams& model, const BBox& bbox, std::size_t nx,
                    std::size_t ny) {
  if (model.input_dim() != 2) throw ConfigError("heatmap: model input must be 2-d");
  if (nx == 0 || ny == 0) throw ConfigError("heatmap: resolution must be positive");
  if (bbox.xmax <= bbox.xmin || bbox.ymax <= bbox.ymin)
    throw ConfigError("heatmap: empty bounding box");

  HeatmapGrid grid;
  grid.bbox = bbox;
  grid.nx = nx;
  grid.ny = ny;
  grid.scores.resize(nx * ny);
  const double cell_w = (bbox.xmax - bbox.xmin) / static_cast<double>(nx);
  const double cell_h = (bbox.ymax - bbox.ymin) / static_cast<double>(ny);
  std::vector<double> point(2);
  for (std::size_t j = 0; j < ny; ++j) {
    point[1] = bbox.ymin + (static_cast<double>(j) + 0.5) * cell_h;
    for (std::size_t i = 0; i < nx; ++i) {
      point[0] = bbox.xmin + (static_cast<double>(i) + 0.5) * cell_w;
      const double s = anomaly_score(model, point);
      if (!std::isfinite(s))
        throw NumericError("heatmap: non-finite score at cell (" + std::to_string(i) +
                           ", " + std::to_string(j) + ")");
      grid.scores[j * nx + i] = s;
    }
  }
  return grid;
}

void write_heatmap_csv(const HeatmapGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << "x,y,score\n";
  char buf[140];
  const double cell_w = (grid.bbox.xmax - grid.bbox.xmin) / static_cast<double>(grid.nx);
  const double cell_h = (grid.bbox.ymax - grid.bbox.ymin) / static_cast<double>(grid.ny);
  for (std::size_t j = 0; j < grid.ny; ++j) {
    const double y = grid.bbox.ymin + (static_cast<double>(j) + 0.5) * cell_h;
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double x = grid.bbox.xmin + (static_cast<double>(i) + 0.5) * cell_w;
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, y,
                    grid.scores[j * grid.nx + i]);
      out << buf;
    }
  }
  if (!out) throw ParseError(path + ": write failed");
}

namespace {

struct RunOutcome {
  std::optional<SplitAurocs> aurocs;
  std::string error;
};

}  // namespace

ExperimentResult run_experiment(const Dataset& source, const ExperimentConfig& config) {
  if (config.runs < 1) throw ConfigError("run_experiment: runs must be >= 1");
  if (config.models.empty()) throw ConfigError("run_experiment: no models configured");

  const std::size_t n_models = config.models.size();
  std::vector<std::vector<RunOutcome>> outcomes(config.runs,
                                                std::vector<RunOutcome>(n_models));
  std::vector<std::optional<TrainedModel>> first_run(n_models);
  std::vector<std::exception_ptr> run_failures(config.runs);

  auto do_run = [&](std::size_t r) {
    const std::uint64_t seed = config.base_seed + r;
    ExperimentSplit split =
        assemble_setting(source, config.setting, config.setting_params, seed);
    if (config.apply_scaling) {
      const MinMaxScaler scaler = minmax_fit(split.train);
      split.train = minmax_apply(scaler, split.train);
      split.test = minmax_apply(scaler, split.test);
    }
    for (std::size_t m = 0; m < n_models; ++m) {
      TrainConfig tc = config.train;
      tc.kind = config.models[m];
      tc.seed = seed;
      try {
        TrainedModel trained = train(split.train, tc);
        outcomes[r][m].aurocs = evaluate_split(trained.params, split.test);
        if (r == 0) first_run[m] = std::move(trained);
      } catch (const std::exception& e) {
        outcomes[r][m].error = "run " + std::to_string(r) + ", " +
                               to_string(config.models[m]) + ": " + e.what();
      }
    }
  };

  std::size_t workers = config.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<std::size_t>(workers, config.runs);

  if (workers <= 1) {
    for (std::size_t r = 0; r < config.runs; ++r) do_run(r);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const std::size_t r = next.fetch_add(1);
        if (r >= config.runs) return;
        try {
          do_run(r);
        } catch (...) {
          run_failures[r] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    for (std::size_t r = 0; r < config.runs; ++r)
      if (run_failures[r]) std::rethrow_exception(run_failures[r]);
  }

  ExperimentResult result;
  result.report.runs = config.runs;
  result.report.setting = config.setting;
  result.report.rows.resize(n_models);
  for (std::size_t m = 0; m < n_models; ++m) {
    ModelEvalRow& row = result.report.rows[m];
    row.kind = config.models[m];
    for (std::size_t r = 0; r < config.runs; ++r) {
      const RunOutcome& o = outcomes[r][m];
      if (!o.error.empty()) {
        row.run_errors.push_back(o.error);
        continue;
      }
      if (o.aurocs->known) row.known_runs.push_back(*o.aurocs->known);
      if (o.aurocs->unknown) row.unknown_runs.push_back(*o.aurocs->unknown);
    }
    if (!row.known_runs.empty()) {
      row.known_mean = mean(row.known_runs);
      if (row.known_runs.size() >= 2)
        row.known_std = std::sqrt(sample_variance(row.known_runs));
    }
    if (!row.unknown_runs.empty()) {
      row.unknown_mean = mean(row.unknown_runs);
      if (row.unknown_runs.size() >= 2)
        row.unknown_std = std::sqrt(sample_variance(row.unknown_runs));
    }
    if (first_run[m]) result.first_run_models.emplace(config.models[m],
                                                      std::move(*first_run[m]));
  }

  // best or statistically indistinguishable from best (Welch p >= 0.05)
  auto mark_best = [&](auto mean_of, auto runs_of, auto flag_of) {
    std::size_t best = n_models;
    for (std::size_t m = 0; m < n_models; ++m) {
      if (!mean_of(m)) continue;
      if (best == n_models || *mean_of(m) > *mean_of(best)) best = m;
    }
    if (best == n_models) return;
    flag_of(best) = true;
    for (std::size_t m = 0; m < n_models; ++m) {
      if (m == best || !mean_of(m)) continue;
      if (runs_of(m).size() >= 2 && runs_of(best).size() >= 2 &&
          welch_t_test(runs_of(best), runs_of(m)) >= 0.05)
        flag_of(m) = true;
    }
  };
  auto& rows = result.report.rows;
  mark_best([&](std::size_t m) { return rows[m].known_mean; },
            [&](std::size_t m) -> const std::vector<double>& { return rows[m].known_runs; },
            [&](std::size_t m) -> bool& { return rows[m].known_best_group; });
  mark_best([&](std::size_t m) { return rows[m].unknown_mean; },
            [&](std::size_t m) -> const std::vector<double>& { return rows[m].unknown_runs; },
            [&](std::size_t m) -> bool& { return rows[m].unknown_best_group; });
  return result;
}

namespace {

nlohmann::json side_json(const std::vector<double>& runs, std::optional<double> mean_v,
                         std::optional<double> std_v, bool best) {
  nlohmann::json j;
  j["runs"] = runs;
  j["mean"] = mean_v ? nlohmann::json(*mean_v) : nlohmann::json(nullptr);
  j["std"] = std_v ? nlohmann::json(*std_v) : nlohmann::json(nullptr);
  j["best_group"] = best;
  return j;
}

std::string cell_text(std::optional<double> mean_v, std::optional<double> std_v,
                      bool best) {
  if (!mean_v) return "-";
  char buf[48];
  if (std_v) {
    const long thousandths = std::lround(*std_v * 1000.0);
    if (thousandths < 1000)
      std::snprintf(buf, sizeof buf, "%.3f(%03ld)", *mean_v, thousandths);
    else
      std::snprintf(buf, sizeof buf, "%.3f(%.3f)", *mean_v, *std_v);
  } else {
    std::snprintf(buf, sizeof buf, "%.3f", *mean_v);
  }
  std::string s = buf;
  if (best) s += '*';
  return s;
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["runs"] = report.runs;
  j["setting"] = static_cast<int>(report.setting);
  j["models"] = nlohmann::json::array();
  for (const ModelEvalRow& row : report.rows) {
    nlohmann::json m;
    m["kind"] = to_string(row.kind);
    m["display"] = display_name(row.kind);
    m["known"] = side_json(row.known_runs, row.known_mean, row.known_std,
                           row.known_best_group);
    m["unknown"] = side_json(row.unknown_runs, row.unknown_mean, row.unknown_std,
                             row.unknown_best_group);
    m["errors"] = row.run_errors;
    j["models"].push_back(std::move(m));
  }
  return j.dump(2) + "\n";
}

std::string report_to_table(const EvalReport& report) {
  std::size_t name_w = 5;
  for (const ModelEvalRow& row : report.rows)
    name_w = std::max(name_w, display_name(row.kind).size());
  name_w += 2;

  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };

  std::string out = pad("model", name_w) + pad("known", 14) + "unknown\n";
  for (const ModelEvalRow& row : report.rows) {
    out += pad(display_name(row.kind), name_w);
    out += pad(cell_text(row.known_mean, row.known_std, row.known_best_group), 14);
    out += cell_text(row.unknown_mean, row.unknown_std, row.unknown_best_group);
    out += '\n';
  }
  bool any_error = false;
  for (const ModelEvalRow& row : report.rows)
    for (const std::string& e : row.run_errors) {
      out += "! " + e + "\n";
      any_error = true;
    }
  if (any_error) out += "(failed runs excluded from aggregates)\n";
  return out;
}

}  // namespace abc
