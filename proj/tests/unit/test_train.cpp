#include <doctest.h>

#include <abc/data.hpp>
#include <abc/errors.hpp>
#include <abc/models.hpp>
#include <abc/train.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

using namespace abc;

namespace {

Dataset line_dataset(std::size_t n, int y) {
  Dataset ds;
  ds.dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledPoint p;
    p.x = {static_cast<double>(i)};
    p.y = y;
    p.role = y == 1 ? Role::Normal : Role::KnownAnomaly;
    ds.points.push_back(p);
  }
  return ds;
}

Dataset mixed_dataset(std::size_t normals, std::size_t anomalies) {
  Dataset ds = line_dataset(normals, 1);
  const Dataset an = line_dataset(anomalies, 0);
  for (LabeledPoint p : an.points) {
    p.x[0] += 1000.0;  // values stay distinct across classes
    ds.points.push_back(p);
  }
  return ds;
}

std::multiset<double> values(const Dataset& ds) {
  std::multiset<double> s;
  for (const LabeledPoint& p : ds.points) s.insert(p.x[0]);
  return s;
}

AutoencoderParams identity_ae() {
  Layer l;
  l.weights = Matrix(1, 1);
  l.weights(0, 0) = 1.0;
  l.bias.assign(1, 0.0);
  l.activation = Activation::Identity;
  AutoencoderParams ae;
  ae.encoder.layers = {l};
  ae.decoder.layers = {l};
  return ae;
}

TrainConfig small_config(ModelKind kind) {
  TrainConfig c;
  c.kind = kind;
  c.hidden = {6};
  c.latent = 1;
  c.batch_size = 16;
  c.max_epochs = 8;
  c.patience = 10;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("validation split sizes, disjointness, and coverage") {
  const Dataset ds = line_dataset(100, 1);
  const auto [train, val] = split_validation(ds, 0.2, 3);
  CHECK(train.size() == 80);
  CHECK(val.size() == 20);
  std::multiset<double> merged = values(train);
  merged.merge(values(val));
  CHECK(merged == values(ds));
}

TEST_CASE("validation split stratifies by label") {
  const Dataset ds = mixed_dataset(50, 50);
  const auto [train, val] = split_validation(ds, 0.2, 3);
  std::size_t val_normals = 0, val_anomalies = 0;
  for (const LabeledPoint& p : val.points) (p.y == 1 ? val_normals : val_anomalies)++;
  CHECK(val_normals == 10);
  CHECK(val_anomalies == 10);
  CHECK(train.size() == 80);
}

TEST_CASE("validation split is deterministic and seed-sensitive") {
  const Dataset ds = mixed_dataset(60, 40);
  const auto [t1, v1] = split_validation(ds, 0.25, 5);
  const auto [t2, v2] = split_validation(ds, 0.25, 5);
  CHECK(values(t1) == values(t2));
  CHECK(values(v1) == values(v2));
  const auto [t3, v3] = split_validation(ds, 0.25, 6);
  CHECK(values(v1) != values(v3));
}

TEST_CASE("a one-point class falls back to an unstratified split") {
  const Dataset ds = mixed_dataset(99, 1);
  const auto [train, val] = split_validation(ds, 0.2, 3);
  CHECK(train.size() == 80);
  CHECK(val.size() == 20);
  std::multiset<double> merged = values(train);
  merged.merge(values(val));
  CHECK(merged == values(ds));
}

TEST_CASE("validation split rejects bad arguments") {
  const Dataset ds = line_dataset(10, 1);
  CHECK_THROWS_AS(split_validation(ds, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(split_validation(ds, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(split_validation(Dataset{}, 0.2, 1), InputError);
}

TEST_CASE("epoch metrics of the identity autoencoder are zero") {
  ModelParams m;
  m.kind = ModelKind::Ae;
  m.ae = identity_ae();
  const Dataset ds = mixed_dataset(5, 3);
  const auto [normal, anomaly] = evaluate_epoch_metrics(m, ds);
  REQUIRE(normal.has_value());
  REQUIRE(anomaly.has_value());
  CHECK(*normal == 0.0);
  CHECK(*anomaly == 0.0);
}

TEST_CASE("epoch metrics report absent anomaly means, not zero") {
  ModelParams m;
  m.kind = ModelKind::Ae;
  m.ae = identity_ae();
  const Dataset ds = line_dataset(5, 1);
  const auto [normal, anomaly] = evaluate_epoch_metrics(m, ds);
  CHECK(normal.has_value());
  CHECK_FALSE(anomaly.has_value());
}

TEST_CASE("epoch metrics equal the mean of per-point errors") {
  const ModelParams m = init_model(ModelKind::AbcAe, 1, {3}, 1, 17);
  const Dataset ds = mixed_dataset(4, 3);
  const auto [normal, anomaly] = evaluate_epoch_metrics(m, ds);
  double sn = 0.0, sa = 0.0;
  for (const LabeledPoint& p : ds.points) {
    const double e = reconstruction_error(m.ae, p.x, m.distance);
    (p.y == 1 ? sn : sa) += e;
  }
  CHECK(*normal == doctest::Approx(sn / 4).epsilon(1e-14));
  CHECK(*anomaly == doctest::Approx(sa / 3).epsilon(1e-14));
}

TEST_CASE("epoch metrics refuse the classifier kind") {
  const ModelParams m = init_model(ModelKind::Dnn, 1, {3}, 1, 17);
  CHECK_THROWS_AS(evaluate_epoch_metrics(m, line_dataset(5, 1)), ConfigError);
}

TEST_CASE("zero max epochs returns the initialization untouched") {
  const Dataset ds = gen_toy(60, 60, 0, 0.1, 2);
  TrainConfig c = small_config(ModelKind::AbcAe);
  c.max_epochs = 0;
  const TrainedModel tm = train(ds, c);
  CHECK(tm.log.epochs.empty());
  CHECK(tm.best_epoch == 0);
  const ModelParams fresh = init_model(c.kind, ds.dim, c.hidden, c.latent, c.seed,
                                       c.distance, c.noise, c.clamp);
  CHECK(bit_identical(tm.params, fresh));
}

TEST_CASE("training is deterministic") {
  const Dataset ds = gen_toy(120, 120, 0, 0.1, 2);
  const TrainConfig c = small_config(ModelKind::AbcAe);
  const TrainedModel a = train(ds, c);
  const TrainedModel b = train(ds, c);
  CHECK(bit_identical(a.params, b.params));
  CHECK(a.best_epoch == b.best_epoch);
  CHECK(trainlog_to_csv(a.log) == trainlog_to_csv(b.log));
}

TEST_CASE("the classifier-free pair trains identically on all-normal data") {
  const Dataset ds = gen_toy(200, 0, 0, 0.1, 8);
  TrainConfig c = small_config(ModelKind::AbcAe);
  c.max_epochs = 6;
  const TrainedModel abc_run = train(ds, c);
  c.kind = ModelKind::Ae;
  const TrainedModel ae_run = train(ds, c);
  REQUIRE(abc_run.log.epochs.size() == ae_run.log.epochs.size());
  for (std::size_t i = 0; i < abc_run.log.epochs.size(); ++i) {
    CHECK(abc_run.log.epochs[i].train_loss == ae_run.log.epochs[i].train_loss);
    CHECK(abc_run.log.epochs[i].val_loss == ae_run.log.epochs[i].val_loss);
  }
  // the kind tags differ; the learned weights must not
  CHECK(bit_identical(abc_run.params.ae.encoder, ae_run.params.ae.encoder));
  CHECK(bit_identical(abc_run.params.ae.decoder, ae_run.params.ae.decoder));
}

TEST_CASE("unsupervised kinds train on the normal points only") {
  // same normals, different anomaly sets: the autoencoder must not notice
  Dataset with_few = gen_toy(150, 8, 0, 0.1, 12);
  Dataset all_normals;
  all_normals.dim = with_few.dim;
  for (const LabeledPoint& p : with_few.points)
    if (p.y == 1) all_normals.points.push_back(p);
  const TrainConfig c = small_config(ModelKind::Ae);
  const TrainedModel a = train(with_few, c);
  const TrainedModel b = train(all_normals, c);
  CHECK(bit_identical(a.params, b.params));
}

TEST_CASE("best epoch tracks the minimum validation loss") {
  const Dataset ds = gen_toy(200, 200, 0, 0.1, 3);
  TrainConfig c = small_config(ModelKind::AbcAe);
  c.max_epochs = 30;
  c.patience = 5;
  const TrainedModel tm = train(ds, c);
  REQUIRE(!tm.log.epochs.empty());
  double best = tm.log.epochs[0].val_loss;
  std::size_t best_epoch = 1;
  for (const EpochRecord& r : tm.log.epochs)
    if (r.val_loss < best) {
      best = r.val_loss;
      best_epoch = r.epoch;
    }
  CHECK(tm.best_val_loss == best);
  CHECK(tm.best_epoch == best_epoch);
  // early stopping: no more than patience epochs after the best one
  CHECK(tm.log.epochs.size() <= best_epoch + c.patience);
  // epochs are numbered 1..n
  for (std::size_t i = 0; i < tm.log.epochs.size(); ++i)
    CHECK(tm.log.epochs[i].epoch == i + 1);
}

TEST_CASE("the autoencoder reconstructs toy normals tightly") {
  const Dataset ds = gen_toy(2000, 4, 4, 0.1, 2);
  TrainConfig c;
  c.kind = ModelKind::Ae;
  c.hidden = {10, 10};
  c.latent = 1;
  c.batch_size = 100;
  c.max_epochs = 300;
  c.patience = 10;
  c.seed = 7;
  const TrainedModel tm = train(ds, c);
  REQUIRE(!tm.log.epochs.empty());
  const EpochRecord& last = tm.log.epochs.back();
  REQUIRE(last.normal_recon.has_value());
  CHECK(*last.normal_recon < 0.05);
  // anomalies never entered the filtered training part
  CHECK_FALSE(last.anomaly_recon.has_value());
}

TEST_CASE("classifier training reduces the validation loss") {
  const Dataset ds = gen_toy(200, 200, 0, 0.1, 4);
  TrainConfig c = small_config(ModelKind::Dnn);
  c.max_epochs = 20;
  const TrainedModel tm = train(ds, c);
  REQUIRE(tm.log.epochs.size() >= 2);
  CHECK(tm.best_val_loss < tm.log.epochs.front().val_loss);
  for (const EpochRecord& r : tm.log.epochs) {
    CHECK_FALSE(r.normal_recon.has_value());
    CHECK_FALSE(r.anomaly_recon.has_value());
  }
}

TEST_CASE("reconstruction kinds log per-class reconstruction errors") {
  const Dataset ds = gen_toy(120, 120, 0, 0.1, 4);
  TrainConfig c = small_config(ModelKind::Lrc);
  c.max_epochs = 4;
  const TrainedModel tm = train(ds, c);
  REQUIRE(!tm.log.epochs.empty());
  for (const EpochRecord& r : tm.log.epochs) {
    CHECK(r.normal_recon.has_value());
    CHECK(r.anomaly_recon.has_value());
    CHECK(std::isfinite(r.train_loss));
    CHECK(std::isfinite(r.val_loss));
  }
}

TEST_CASE("training validates its inputs") {
  const Dataset ds = gen_toy(60, 60, 0, 0.1, 2);
  TrainConfig c = small_config(ModelKind::AbcAe);
  c.validation_fraction = 0.0;
  CHECK_THROWS_AS(train(ds, c), ConfigError);
  c = small_config(ModelKind::AbcAe);
  c.batch_size = 0;
  CHECK_THROWS_AS(train(ds, c), ConfigError);
  c = small_config(ModelKind::AbcAe);
  c.patience = 0;
  CHECK_THROWS_AS(train(ds, c), ConfigError);
  CHECK_THROWS_AS(train(Dataset{}, small_config(ModelKind::AbcAe)), ConfigError);
  // unsupervised kind with nothing but anomalies: empty effective training set
  const Dataset anomalies_only = gen_toy(0, 50, 0, 0.1, 2);
  CHECK_THROWS_AS(train(anomalies_only, small_config(ModelKind::Ae)), ConfigError);
}

TEST_CASE("train log serializes to the documented csv layout") {
  TrainLog log;
  EpochRecord r1;
  r1.epoch = 1;
  r1.train_loss = 0.5;
  r1.val_loss = 0.25;
  r1.normal_recon = 1.5;
  log.epochs.push_back(r1);
  EpochRecord r2;
  r2.epoch = 2;
  r2.train_loss = 0.125;
  r2.val_loss = 0.0625;
  log.epochs.push_back(r2);
  const std::string csv = trainlog_to_csv(log);
  CHECK(csv ==
        "epoch,train_loss,val_loss,normal_recon,anomaly_recon\n"
        "1,0.5,0.25,1.5,\n"
        "2,0.125,0.0625,,\n");
}
