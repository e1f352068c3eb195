#include <doctest.h>

#include <abc/data.hpp>
#include <abc/errors.hpp>
#include <abc/eval.hpp>
#include <abc/models.hpp>
#include <abc/rng.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

using namespace abc;

namespace {

double brute_force_auroc(const ScoredSet& s) {
  double hits = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s.is_anomaly[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s.is_anomaly[j]) continue;
      ++pairs;
      if (s.scores[i] > s.scores[j])
        hits += 1.0;
      else if (s.scores[i] == s.scores[j])
        hits += 0.5;
    }
  }
  return hits / static_cast<double>(pairs);
}

// encoder/decoder all zero: reconstruction is the origin, L = ||x||^2
ModelParams zero_model(ModelKind kind) {
  ModelParams m;
  m.kind = kind;
  Layer enc;
  enc.weights = Matrix(1, 2);
  enc.bias.assign(1, 0.0);
  enc.activation = Activation::Identity;
  Layer dec;
  dec.weights = Matrix(2, 1);
  dec.bias.assign(2, 0.0);
  dec.activation = Activation::Identity;
  m.ae.encoder.layers = {enc};
  m.ae.decoder.layers = {dec};
  return m;
}

LabeledPoint pt(double x0, double x1, Role role) {
  LabeledPoint p;
  p.x = {x0, x1};
  p.role = role;
  p.y = role == Role::Normal ? 1 : 0;
  return p;
}

}  // namespace

TEST_CASE("auroc separates and ties") {
  ScoredSet perfect;
  perfect.add(0.9, true);
  perfect.add(0.8, true);
  perfect.add(0.2, false);
  perfect.add(0.1, false);
  CHECK(auroc(perfect) == 1.0);

  ScoredSet inverted;
  inverted.add(0.1, true);
  inverted.add(0.9, false);
  CHECK(auroc(inverted) == 0.0);

  ScoredSet ties;
  for (int i = 0; i < 6; ++i) ties.add(0.5, i % 2 == 0);
  CHECK(auroc(ties) == 0.5);
}

TEST_CASE("auroc equals the pairwise oracle exactly, ties included") {
  Rng rng(2718);
  for (int inst = 0; inst < 300; ++inst) {
    const std::size_t n = 2 + rng.below(199);
    ScoredSet s;
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      const bool anomaly = rng.below(2) == 1;
      // coarse integer grid forces plenty of ties
      s.add(static_cast<double>(rng.below(8)), anomaly);
      (anomaly ? has_pos : has_neg) = true;
    }
    if (!has_pos) s.add(3.0, true);
    if (!has_neg) s.add(4.0, false);
    CHECK(auroc(s) == brute_force_auroc(s));
  }
}

TEST_CASE("auroc is invariant under strictly increasing transforms") {
  Rng rng(11);
  ScoredSet raw, warped;
  for (int i = 0; i < 80; ++i) {
    const double v = rng.normal();
    const bool anomaly = rng.below(2) == 1;
    raw.add(v, anomaly);
    warped.add(std::exp(v), anomaly);
  }
  raw.add(0.0, true);
  warped.add(1.0, true);
  raw.add(0.5, false);
  warped.add(std::exp(0.5), false);
  CHECK(auroc(raw) == auroc(warped));
}

TEST_CASE("flipping labels reflects the auroc when scores are distinct") {
  Rng rng(13);
  const std::vector<std::size_t> perm = rng.permutation(60);
  ScoredSet s, flipped;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const bool anomaly = rng.below(2) == 1;
    s.add(static_cast<double>(perm[i]), anomaly);
    flipped.add(static_cast<double>(perm[i]), !anomaly);
  }
  s.add(1000.0, true);
  flipped.add(1000.0, false);
  s.add(2000.0, false);
  flipped.add(2000.0, true);
  CHECK(auroc(flipped) == doctest::Approx(1.0 - auroc(s)).epsilon(1e-15));
}

TEST_CASE("auroc validates its input") {
  ScoredSet one_class;
  one_class.add(0.5, true);
  one_class.add(0.7, true);
  CHECK_THROWS_AS(auroc(one_class), InputError);
  CHECK_THROWS_AS(auroc(ScoredSet{}), InputError);
  ScoredSet bad;
  bad.add(std::nan(""), true);
  bad.add(0.5, false);
  CHECK_THROWS_AS(auroc(bad), InputError);
  ScoredSet skew;
  skew.scores = {0.1, 0.2};
  skew.is_anomaly = {1};
  CHECK_THROWS_AS(auroc(skew), InputError);
}

TEST_CASE("evaluate_split scores known and unknown anomalies against normals") {
  const ModelParams m = zero_model(ModelKind::AbcAe);
  Dataset test;
  test.dim = 2;
  // normals inside the unit disc, anomalies far out
  test.points.push_back(pt(0.1, 0.2, Role::Normal));
  test.points.push_back(pt(-0.3, 0.1, Role::Normal));
  test.points.push_back(pt(2.0, 1.0, Role::KnownAnomaly));
  test.points.push_back(pt(3.0, -1.0, Role::UnknownAnomaly));
  const SplitAurocs r = evaluate_split(m, test);
  REQUIRE(r.known.has_value());
  REQUIRE(r.unknown.has_value());
  CHECK(*r.known == 1.0);
  CHECK(*r.unknown == 1.0);
}

TEST_CASE("evaluate_split reports absent aurocs for missing roles") {
  const ModelParams m = zero_model(ModelKind::Ae);
  Dataset test;
  test.dim = 2;
  test.points.push_back(pt(0.1, 0.2, Role::Normal));
  test.points.push_back(pt(2.0, 1.0, Role::KnownAnomaly));
  const SplitAurocs r = evaluate_split(m, test);
  CHECK(r.known.has_value());
  CHECK_FALSE(r.unknown.has_value());
}

TEST_CASE("welch test on identical and separated samples") {
  const std::vector<double> a{0.6, 0.6, 0.6, 0.6, 0.6};
  CHECK(welch_t_test(a, a) == 1.0);

  const std::vector<double> zeros{0.0, 0.001, -0.001, 0.0005, -0.0005};
  const std::vector<double> ones{1.0, 1.001, 0.999, 1.0005, 0.9995};
  CHECK(welch_t_test(zeros, ones) < 0.001);

  // frozen reference for a hand-checked pair
  const std::vector<double> r1{1, 2, 3, 4, 5};
  const std::vector<double> r2{2, 3, 4, 5, 7};
  CHECK(welch_t_test(r1, r2) == doctest::Approx(0.31375160946247493).epsilon(1e-10));
  CHECK(welch_t_test(r1, r2) == welch_t_test(r2, r1));
}

TEST_CASE("welch test degenerate variance handling") {
  CHECK(welch_t_test({1.0, 1.0}, {1.0, 1.0, 1.0}) == 1.0);
  CHECK(welch_t_test({1.0, 1.0}, {2.0, 2.0}) == 0.0);
  CHECK_THROWS_AS(welch_t_test({1.0}, {1.0, 2.0}), InputError);
}

TEST_CASE("default bounding box pads the data range") {
  Dataset ds;
  ds.dim = 2;
  ds.points.push_back(pt(0.0, 0.0, Role::Normal));
  ds.points.push_back(pt(1.0, 2.0, Role::Normal));
  const BBox b = default_bbox(ds);
  CHECK(b.xmin == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(b.xmax == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(b.ymin == doctest::Approx(-0.4).epsilon(1e-14));
  CHECK(b.ymax == doctest::Approx(2.4).epsilon(1e-14));
  Dataset bad;
  bad.dim = 3;
  bad.points.push_back(LabeledPoint{{1, 2, 3}, 1, Role::Normal});
  CHECK_THROWS_AS(default_bbox(bad), ConfigError);
  CHECK_THROWS_AS(default_bbox(Dataset{}), InputError);
}

TEST_CASE("heatmap evaluates scores at cell centers in row-major order") {
  const ModelParams m = zero_model(ModelKind::AbcAe);
  BBox box;
  box.xmin = 0.0;
  box.xmax = 1.0;
  box.ymin = 0.0;
  box.ymax = 1.0;
  const HeatmapGrid g = heatmap(m, box, 2, 2);
  REQUIRE(g.scores.size() == 4);
  const auto expect = [](double x, double y) { return 1.0 - std::exp(-(x * x + y * y)); };
  CHECK(g.scores[0] == doctest::Approx(expect(0.25, 0.25)).epsilon(1e-14));
  CHECK(g.scores[1] == doctest::Approx(expect(0.75, 0.25)).epsilon(1e-14));
  CHECK(g.scores[2] == doctest::Approx(expect(0.25, 0.75)).epsilon(1e-14));
  CHECK(g.scores[3] == doctest::Approx(expect(0.75, 0.75)).epsilon(1e-14));
}

TEST_CASE("heatmap resolution and validation") {
  ModelParams m = zero_model(ModelKind::AbcAe);
  BBox box;
  box.xmin = -1.0;
  box.xmax = 1.0;
  box.ymin = -1.0;
  box.ymax = 1.0;
  const HeatmapGrid g = heatmap(m, box, 20, 10);
  CHECK(g.scores.size() == 200);
  CHECK(g.nx == 20);
  CHECK(g.ny == 10);
  CHECK_THROWS_AS(heatmap(m, box, 0, 10), ConfigError);
  BBox empty;
  CHECK_THROWS_AS(heatmap(m, empty, 4, 4), ConfigError);
  const ModelParams wide = init_model(ModelKind::Ae, 3, {4}, 1, 5);
  CHECK_THROWS_AS(heatmap(wide, box, 4, 4), ConfigError);
}

TEST_CASE("a perfect reconstructor scores zero everywhere") {
  ModelParams m;
  m.kind = ModelKind::AbcAe;
  Layer l;
  l.weights = Matrix(2, 2);
  l.weights(0, 0) = 1.0;
  l.weights(1, 1) = 1.0;
  l.bias.assign(2, 0.0);
  l.activation = Activation::Identity;
  m.ae.encoder.layers = {l};
  m.ae.decoder.layers = {l};
  BBox box;
  box.xmin = -2.0;
  box.xmax = 2.0;
  box.ymin = -2.0;
  box.ymax = 2.0;
  const HeatmapGrid g = heatmap(m, box, 8, 8);
  for (double s : g.scores) CHECK(s == 0.0);
}

TEST_CASE("experiments aggregate per-run aurocs") {
  const Dataset src = gen_toy(120, 120, 60, 0.1, 3);
  ExperimentConfig cfg;
  cfg.models = {ModelKind::Ae, ModelKind::Dnn};
  cfg.setting = Setting::S1;
  cfg.runs = 2;
  cfg.base_seed = 7;
  cfg.workers = 1;
  cfg.train.hidden = {4};
  cfg.train.latent = 1;
  cfg.train.batch_size = 32;
  cfg.train.max_epochs = 4;
  const ExperimentResult res = run_experiment(src, cfg);
  const EvalReport& rep = res.report;
  CHECK(rep.runs == 2);
  REQUIRE(rep.rows.size() == 2);
  for (const ModelEvalRow& row : rep.rows) {
    CHECK(row.run_errors.empty());
    REQUIRE(row.known_runs.size() == 2);
    REQUIRE(row.unknown_runs.size() == 2);
    REQUIRE(row.known_mean.has_value());
    REQUIRE(row.known_std.has_value());
    const double m2 = (row.known_runs[0] + row.known_runs[1]) / 2.0;
    CHECK(*row.known_mean == doctest::Approx(m2).epsilon(1e-12));
    for (double v : row.known_runs) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(res.first_run_models.count(ModelKind::Ae) == 1);
  CHECK(res.first_run_models.count(ModelKind::Dnn) == 1);

  // at least one row per column carries the best-group mark
  CHECK(std::any_of(rep.rows.begin(), rep.rows.end(),
                    [](const ModelEvalRow& r) { return r.known_best_group; }));
  CHECK(std::any_of(rep.rows.begin(), rep.rows.end(),
                    [](const ModelEvalRow& r) { return r.unknown_best_group; }));
}

TEST_CASE("experiments are reproducible and worker-count independent") {
  const Dataset src = gen_toy(100, 100, 40, 0.1, 5);
  ExperimentConfig cfg;
  cfg.models = {ModelKind::AbcAe};
  cfg.runs = 2;
  cfg.workers = 1;
  cfg.train.hidden = {4};
  cfg.train.latent = 1;
  cfg.train.batch_size = 25;
  cfg.train.max_epochs = 3;
  const std::string a = report_to_json(run_experiment(src, cfg).report);
  const std::string b = report_to_json(run_experiment(src, cfg).report);
  CHECK(a == b);
  cfg.workers = 2;
  const std::string c = report_to_json(run_experiment(src, cfg).report);
  CHECK(a == c);
}

TEST_CASE("single-run experiments report no spread") {
  const Dataset src = gen_toy(100, 100, 40, 0.1, 5);
  ExperimentConfig cfg;
  cfg.models = {ModelKind::Ae};
  cfg.runs = 1;
  cfg.workers = 1;
  cfg.train.hidden = {4};
  cfg.train.latent = 1;
  cfg.train.batch_size = 25;
  cfg.train.max_epochs = 2;
  const EvalReport rep = run_experiment(src, cfg).report;
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].known_mean.has_value());
  CHECK_FALSE(rep.rows[0].known_std.has_value());
  CHECK(rep.rows[0].known_best_group);
}

TEST_CASE("experiment config validation") {
  const Dataset src = gen_toy(50, 50, 20, 0.1, 5);
  ExperimentConfig cfg;
  cfg.runs = 0;
  CHECK_THROWS_AS(run_experiment(src, cfg), ConfigError);
  cfg = ExperimentConfig{};
  cfg.models.clear();
  CHECK_THROWS_AS(run_experiment(src, cfg), ConfigError);
}

TEST_CASE("report json carries the full structure") {
  const Dataset src = gen_toy(100, 100, 40, 0.1, 5);
  ExperimentConfig cfg;
  cfg.models = {ModelKind::Ae, ModelKind::AbcAe};
  cfg.runs = 2;
  cfg.workers = 1;
  cfg.train.hidden = {4};
  cfg.train.latent = 1;
  cfg.train.batch_size = 25;
  cfg.train.max_epochs = 2;
  const EvalReport rep = run_experiment(src, cfg).report;
  const nlohmann::json j = nlohmann::json::parse(report_to_json(rep));
  CHECK(j.at("runs").get<int>() == 2);
  CHECK(j.at("setting").get<int>() == 1);
  REQUIRE(j.at("models").size() == 2);
  const auto& first = j.at("models").at(0);
  CHECK(first.at("kind").get<std::string>() == "ae");
  CHECK(first.at("display").get<std::string>() == "AE");
  CHECK(first.at("known").at("runs").size() == 2);
  CHECK(first.at("known").contains("mean"));
  CHECK(first.at("known").contains("best_group"));
}

TEST_CASE("report table formats means with parenthesized spread") {
  EvalReport rep;
  rep.runs = 5;
  rep.setting = Setting::S1;
  ModelEvalRow row;
  row.kind = ModelKind::AbcAe;
  row.known_runs = {0.96, 0.97, 0.96, 0.97, 0.965};
  row.known_mean = 0.9646;
  row.known_std = 0.0042;
  row.known_best_group = true;
  row.unknown_mean = 0.99996;
  row.unknown_std = 0.00004;
  row.unknown_runs = {1.0, 1.0, 1.0, 1.0, 0.9998};
  rep.rows.push_back(row);
  const std::string table = report_to_table(rep);
  CHECK(table.find("ABC(AE)") != std::string::npos);
  CHECK(table.find("0.965(004)*") != std::string::npos);
  CHECK(table.find("1.000(000)") != std::string::npos);
}

TEST_CASE("report table shows failures and absences") {
  EvalReport rep;
  rep.runs = 2;
  ModelEvalRow row;
  row.kind = ModelKind::Lrc;
  row.run_errors.push_back("run 1, lrc: loss diverged");
  rep.rows.push_back(row);
  const std::string table = report_to_table(rep);
  CHECK(table.find("LRC") != std::string::npos);
  CHECK(table.find("-") != std::string::npos);
  CHECK(table.find("loss diverged") != std::string::npos);
}
