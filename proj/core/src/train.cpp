#include "abc/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include "abc/errors.hpp"
#include "abc/rng.hpp"

namespace abc {

std::pair<Dataset, Dataset> split_validation(const Dataset& dataset, double fraction,
                                             std::uint64_t seed) {
  if (dataset.points.empty()) throw InputError("split_validation: empty dataset");
  if (fraction <= 0 || fraction >= 1)
    throw ConfigError("split_validation: fraction must be in (0, 1)");

  std::vector<std::size_t> class_normal, class_anomaly;
  for (std::size_t i = 0; i < dataset.points.size(); ++i)
    (dataset.points[i].y == 1 ? class_normal : class_anomaly).push_back(i);

  const bool stratifiable =
      (class_normal.empty() || class_normal.size() >= 2) &&
      (class_anomaly.empty() || class_anomaly.size() >= 2);

  std::vector<std::vector<std::size_t>> groups;
  if (stratifiable) {
    if (!class_normal.empty()) groups.push_back(std::move(class_normal));
    if (!class_anomaly.empty()) groups.push_back(std::move(class_anomaly));
  } else {
    std::cerr << "split_validation: a label class has fewer than 2 points; "
                 "falling back to an unstratified split\n";
    std::vector<std::size_t> all(dataset.points.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    groups.push_back(std::move(all));
  }

  Rng rng(seed);
  Dataset train_part, val_part;
  train_part.dim = val_part.dim = dataset.dim;
  train_part.provenance = dataset.provenance + " [train-part]";
  val_part.provenance = dataset.provenance + " [validation]";
  for (const std::vector<std::size_t>& group : groups) {
    const std::vector<std::size_t> perm = rng.permutation(group.size());
    std::size_t n_val = static_cast<std::size_t>(fraction * static_cast<double>(group.size()));
    if (group.size() >= 2) {
      if (n_val == 0) n_val = 1;
      if (n_val >= group.size()) n_val = group.size() - 1;
    }
    for (std::size_t i = 0; i < group.size(); ++i) {
      const LabeledPoint& p = dataset.points[group[perm[i]]];
      (i < n_val ? val_part : train_part).points.push_back(p);
    }
  }
  return {std::move(train_part), std::move(val_part)};
}

std::pair<std::optional<double>, std::optional<double>>
evaluate_epoch_metrics(const ModelParams& params, const Dataset& train_part) {
  if (params.kind == ModelKind::Dnn)
    throw ConfigError("evaluate_epoch_metrics: reconstruction kinds only");
  double normal_sum = 0, anomaly_sum = 0;
  std::size_t normal_n = 0, anomaly_n = 0;
  for (const LabeledPoint& p : train_part.points) {
    const double err = reconstruction_error(params.ae, p.x, params.distance);
    if (p.y == 1) {
      normal_sum += err;
      ++normal_n;
    } else {
      anomaly_sum += err;
      ++anomaly_n;
    }
  }
  std::pair<std::optional<double>, std::optional<double>> out;
  if (normal_n > 0) out.first = normal_sum / static_cast<double>(normal_n);
  if (anomaly_n > 0) out.second = anomaly_sum / static_cast<double>(anomaly_n);
  return out;
}

TrainedModel train(const Dataset& dataset, const TrainConfig& config) {
  if (config.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (config.patience < 1) throw ConfigError("train: patience must be >= 1");
  if (config.validation_fraction <= 0 || config.validation_fraction >= 1)
    throw ConfigError("train: validation_fraction must be in (0, 1)");
  if (dataset.points.empty()) throw ConfigError("train: empty dataset");

  Dataset effective;
  effective.dim = dataset.dim;
  effective.provenance = dataset.provenance;
  if (is_unsupervised_kind(config.kind)) {
    for (const LabeledPoint& p : dataset.points)
      if (p.y == 1) effective.points.push_back(p);
    if (effective.points.empty())
      throw ConfigError("train: no normal points to train an unsupervised kind on");
  } else {
    effective.points = dataset.points;
  }

  TrainedModel result;
  result.config = config;
  result.params = init_model(config.kind, dataset.dim, config.hidden, config.latent,
                             config.seed, config.distance, config.noise, config.clamp);
  if (config.max_epochs == 0) return result;

  auto [train_part, val_part] = split_validation(
      effective, config.validation_fraction, Rng::derive_seed(config.seed, 100));
  if (train_part.points.empty() || val_part.points.empty())
    throw ConfigError("train: validation split left an empty part");

  ModelParams& params = result.params;
  const std::vector<NetworkParams*> nets = params.networks();
  AdamState adam = init_adam(
      std::vector<const NetworkParams*>(nets.begin(), nets.end()), config.adam);
  Rng shuffle_rng(Rng::derive_seed(config.seed, 101));
  Rng noise_rng(Rng::derive_seed(config.seed, 102));

  const std::size_t n = train_part.points.size();
  std::vector<LabeledPoint> epoch_points(n);
  ModelParams best = params;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t since_improve = 0;

  const bool track_recon = is_reconstruction_kind(config.kind);

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const std::vector<std::size_t> perm = shuffle_rng.permutation(n);
    for (std::size_t i = 0; i < n; ++i) epoch_points[i] = train_part.points[perm[i]];

    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
      const std::size_t count = std::min(config.batch_size, n - start);
      const std::span<const LabeledPoint> batch(epoch_points.data() + start, count);
      auto [batch_loss, grads] = model_loss_and_grads(params, batch, noise_rng);
      if (!std::isfinite(batch_loss))
        throw NumericError("train: non-finite training loss at epoch " +
                           std::to_string(epoch) + ", batch " + std::to_string(batch_index));
      loss_sum += batch_loss * static_cast<double>(count);
      std::vector<const NetworkGrads*> grad_ptrs;
      grad_ptrs.reserve(grads.nets.size());
      for (const NetworkGrads& g : grads.nets) grad_ptrs.push_back(&g);
      try {
        adam_step(adam, nets, grad_ptrs);
      } catch (const NumericError& e) {
        throw NumericError("train: epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + ": " + e.what());
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(n);
    record.val_loss = model_mean_loss(params, val_part.points, noise_rng);
    if (!std::isfinite(record.val_loss))
      throw NumericError("train: non-finite validation loss at epoch " +
                         std::to_string(epoch));
    if (track_recon) {
      auto [normal_recon, anomaly_recon] = evaluate_epoch_metrics(params, train_part);
      record.normal_recon = normal_recon;
      record.anomaly_recon = anomaly_recon;
    }
    result.log.epochs.push_back(record);

    if (record.val_loss < best_val) {
      best_val = record.val_loss;
      best = params;
      best_epoch = epoch;
      since_improve = 0;
    } else {
      ++since_improve;
      if (since_improve >= config.patience) break;
    }
  }

  result.params = std::move(best);
  result.best_epoch = best_epoch;
  result.best_val_loss = best_val;
  return result;
}

std::string trainlog_to_csv(const TrainLog& log) {
  std::string out = "epoch,train_loss,val_loss,normal_recon,anomaly_recon\n";
  char buf[40];
  auto append = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  };
  for (const EpochRecord& r : log.epochs) {
    out += std::to_string(r.epoch);
    out += ',';
    append(r.train_loss);
    out += ',';
    append(r.val_loss);
    out += ',';
    if (r.normal_recon) append(*r.normal_recon);
    out += ',';
    if (r.anomaly_recon) append(*r.anomaly_recon);
    out += '\n';
  }
  return out;
}

void write_trainlog_csv(const TrainLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << trainlog_to_csv(log);
  if (!out) throw ParseError(path + ": write failed");
}

}  // namespace abc
