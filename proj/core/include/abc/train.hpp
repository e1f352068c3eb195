#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abc/adam.hpp"
#include "abc/data.hpp"
#include "abc/models.hpp"

namespace abc {

/// Everything one training run needs. Defaults follow the reference
/// protocol: batch 100, at most 300 epochs, 20% validation, patience 10.
struct TrainConfig {
  ModelKind kind = ModelKind::AbcAe;
  std::vector<std::size_t> hidden{10, 10};
  std::size_t latent = 1;

  std::size_t batch_size = 100;
  std::size_t max_epochs = 300;
  double validation_fraction = 0.2;
  std::size_t patience = 10;
  std::uint64_t seed = 7;

  AdamConfig adam;
  DistanceKind distance = DistanceKind::SquaredL2;
  DaeNoiseConfig noise;
  LossClampConfig clamp;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  // Clean reconstruction error averaged over the training points of each
  // label; absent for DNN, and the anomaly field is absent when the training
  // part has no anomalies.
  std::optional<double> normal_recon;
  std::optional<double> anomaly_recon;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
};

struct TrainedModel {
  ModelParams params;  // parameters of the epoch with minimum validation loss
  TrainConfig config;
  TrainLog log;
  std::size_t best_epoch = 0;  // 1-based; 0 when no epoch ran
  double best_val_loss = 0.0;
};

/// Stratified-by-label random split preserving the normal/anomaly ratio on
/// both sides. Falls back to an unstratified split (stderr warning) when a
/// present label class has fewer than 2 points.
std::pair<Dataset, Dataset> split_validation(const Dataset& dataset, double fraction,
                                             std::uint64_t seed);

/// Clean reconstruction-error means over the y=1 and y=0 points.
std::pair<std::optional<double>, std::optional<double>>
evaluate_epoch_metrics(const ModelParams& params, const Dataset& train_part);

/// Minibatch training with per-epoch shuffling, Adam updates, validation
/// early stopping (patience epochs without improvement) and best-parameter
/// restoration. Unsupervised kinds (AE, DAE) train on the y=1 points only;
/// labels otherwise pass through to the loss.
TrainedModel train(const Dataset& dataset, const TrainConfig& config);

/// TrainLog CSV: epoch,train_loss,val_loss,normal_recon,anomaly_recon with
/// empty cells for absent values.
void write_trainlog_csv(const TrainLog& log, const std::string& path);
std::string trainlog_to_csv(const TrainLog& log);

}  // namespace abc
