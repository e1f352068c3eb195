#pragma once

#include <span>
#include <string>
#include <vector>

#include "abc/autoencoder.hpp"
#include "abc/data.hpp"
#include "abc/rng.hpp"

namespace abc {

enum class ModelKind { Ae, Dae, Lrc, AbcAe, AbcDae, Dnn };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

/// Display name in result tables, e.g. "ABC(AE)".
std::string display_name(ModelKind k);

bool is_reconstruction_kind(ModelKind k);  // everything but DNN
bool is_unsupervised_kind(ModelKind k);    // AE, DAE: labels ignored, trains on normals
bool uses_noise(ModelKind k);              // DAE, ABC(DAE)

enum class DistanceKind { SquaredL2, L2 };

std::string to_string(DistanceKind d);
DistanceKind distance_from_string(const std::string& s);

struct DaeNoiseConfig {
  double noise_std = 0.2;  // isotropic Gaussian on the encoder input only
};

/// Floor on the reconstruction error inside the anomaly term of the ABC loss.
/// -log(1 - e^-L) diverges as L -> 0; the floor caps it near 23.03 and keeps
/// gradients finite.
struct LossClampConfig {
  double min_error = 1e-10;
};

/// One trained (or trainable) model: the parameter networks plus the scoring
/// semantics they were trained under.
struct ModelParams {
  ModelKind kind = ModelKind::Ae;
  AutoencoderParams ae;       // reconstruction kinds
  NetworkParams classifier;   // DNN
  DistanceKind distance = DistanceKind::SquaredL2;
  DaeNoiseConfig noise;
  LossClampConfig clamp;

  std::size_t input_dim() const;
  std::vector<NetworkParams*> networks();
  std::vector<const NetworkParams*> networks() const;
};

/// Gradients for every network of a model, ordered like networks().
struct ModelGrads {
  std::vector<NetworkGrads> nets;
};

/// Architecture + init. For reconstruction kinds `hidden`/`latent` describe
/// the encoder (decoder mirrored); for DNN the classifier is
/// [dim, hidden..., 1] with a linear output logit.
ModelParams init_model(ModelKind kind, std::size_t data_dim,
                       const std::vector<std::size_t>& hidden, std::size_t latent,
                       std::uint64_t seed, DistanceKind distance = DistanceKind::SquaredL2,
                       DaeNoiseConfig noise = {}, LossClampConfig clamp = {});

// --- scalar pieces, exposed for direct testing -----------------------------

double distance_value(DistanceKind d, std::span<const double> x,
                      std::span<const double> xhat);

/// Loss as a function of the reconstruction error L:
///   y=1 -> L, exactly;  y=0 -> -log(1 - e^-max(L, clamp)).
/// The anomaly branch uses the two-branch log1mexp rule (-log(-expm1(-L))
/// below ln 2, -log1p(-exp(-L)) above), so it stays accurate for small L and
/// keeps tracking e^-L instead of flushing to zero for large L.
double abc_loss_from_error(double recon_error, int y, const LossClampConfig& clamp);

/// Exact derivative of abc_loss_from_error with respect to L (zero on the
/// clamped plateau, so finite differences of the implemented loss agree).
double abc_loss_error_derivative(double recon_error, int y, const LossClampConfig& clamp);

double lrc_loss_from_error(double recon_error, int y);
double eta_from_error(double recon_error);        // e^-L
double abc_score_from_error(double recon_error);  // 1 - e^-L

double sigmoid(double z);
double sigmoid_cross_entropy(double logit, int y);       // y=1 target normal
double sigmoid_cross_entropy_grad(double logit, int y);  // d/dlogit

// --- per-point operations ---------------------------------------------------

/// || x - D(E(x)) || under the chosen distance.
double reconstruction_error(const AutoencoderParams& ae, std::span<const double> x,
                            DistanceKind distance);

/// Perturbs the encoder input with fresh N(0, std^2 I) noise; the target
/// stays the clean x.
double dae_reconstruction_error(const AutoencoderParams& ae, std::span<const double> x,
                                const DaeNoiseConfig& noise, DistanceKind distance,
                                Rng& rng);

/// The regression function eta(x) = e^-L(x) = p(y=1|x), in [0, 1].
double eta(const AutoencoderParams& ae, std::span<const double> x, DistanceKind distance);

/// p(y=0|x) = 1 - eta(x). Anomaly when the score exceeds 0.5.
double abc_anomaly_score(const AutoencoderParams& ae, std::span<const double> x,
                         DistanceKind distance);

double abc_loss(const AutoencoderParams& ae, std::span<const double> x, int y,
                DistanceKind distance, const LossClampConfig& clamp);

double lrc_loss(const AutoencoderParams& ae, std::span<const double> x, int y,
                DistanceKind distance);

double dnn_loss(const NetworkParams& classifier, std::span<const double> x, int y);
double dnn_score(const NetworkParams& classifier, std::span<const double> x);

// --- batch dispatch ----------------------------------------------------------

/// Mean loss and mean gradients over a batch; the one dispatch point the
/// training loop uses for every kind. Only DAE kinds consume the rng.
std::pair<double, ModelGrads> model_loss_and_grads(const ModelParams& model,
                                                   std::span<const LabeledPoint> batch,
                                                   Rng& noise_rng);

/// Mean loss only (validation passes).
double model_mean_loss(const ModelParams& model, std::span<const LabeledPoint> batch,
                       Rng& noise_rng);

/// Model-appropriate anomaly score, always oriented higher = more anomalous:
/// ABC kinds 1 - e^-L, AE/DAE/LRC the raw reconstruction error, DNN
/// 1 - sigmoid(logit). Scoring always uses the clean input.
double anomaly_score(const ModelParams& model, std::span<const double> x);

/// ABC and DNN scores are probabilities with a calibrated 0.5 threshold;
/// raw reconstruction errors are not.
bool has_calibrated_threshold(ModelKind k);

ModelGrads zero_grads(const ModelParams& model);
void add_scaled(ModelGrads& acc, const ModelGrads& g, double scale);
void scale_grads(ModelGrads& g, double scale);

bool bit_identical(const ModelParams& a, const ModelParams& b);

}  // namespace abc
