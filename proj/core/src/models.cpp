#include "abc/models.hpp"

#include <cmath>
#include <utility>

#include "abc/errors.hpp"

namespace abc {

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Ae: return "ae";
    case ModelKind::Dae: return "dae";
    case ModelKind::Lrc: return "lrc";
    case ModelKind::AbcAe: return "abc-ae";
    case ModelKind::AbcDae: return "abc-dae";
    case ModelKind::Dnn: return "dnn";
  }
  throw ConfigError("unknown model kind enum value");
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "ae") return ModelKind::Ae;
  if (s == "dae") return ModelKind::Dae;
  if (s == "lrc") return ModelKind::Lrc;
  if (s == "abc-ae") return ModelKind::AbcAe;
  if (s == "abc-dae") return ModelKind::AbcDae;
  if (s == "dnn") return ModelKind::Dnn;
  throw ConfigError("unknown model kind: '" + s + "'");
}

std::string display_name(ModelKind k) {
  switch (k) {
    case ModelKind::Ae: return "AE";
    case ModelKind::Dae: return "DAE";
    case ModelKind::Lrc: return "LRC";
    case ModelKind::AbcAe: return "ABC(AE)";
    case ModelKind::AbcDae: return "ABC(DAE)";
    case ModelKind::Dnn: return "DNN";
  }
  throw ConfigError("unknown model kind enum value");
}

bool is_reconstruction_kind(ModelKind k) { return k != ModelKind::Dnn; }

bool is_unsupervised_kind(ModelKind k) {
  return k == ModelKind::Ae || k == ModelKind::Dae;
}

bool uses_noise(ModelKind k) {
  return k == ModelKind::Dae || k == ModelKind::AbcDae;
}

std::string to_string(DistanceKind d) {
  switch (d) {
    case DistanceKind::SquaredL2: return "squared-l2";
    case DistanceKind::L2: return "l2";
  }
  throw ConfigError("unknown distance enum value");
}

DistanceKind distance_from_string(const std::string& s) {
  if (s == "squared-l2") return DistanceKind::SquaredL2;
  if (s == "l2") return DistanceKind::L2;
  throw ConfigError("unknown distance: '" + s + "'");
}

std::size_t ModelParams::input_dim() const {
  return kind == ModelKind::Dnn ? classifier.input_dim() : ae.data_dim();
}

std::vector<NetworkParams*> ModelParams::networks() {
  if (kind == ModelKind::Dnn) return {&classifier};
  return {&ae.encoder, &ae.decoder};
}

std::vector<const NetworkParams*> ModelParams::networks() const {
  if (kind == ModelKind::Dnn) return {&classifier};
  return {&ae.encoder, &ae.decoder};
}

ModelParams init_model(ModelKind kind, std::size_t data_dim,
                       const std::vector<std::size_t>& hidden, std::size_t latent,
                       std::uint64_t seed, DistanceKind distance,
                       DaeNoiseConfig noise, LossClampConfig clamp) {
  if (noise.noise_std < 0) throw ConfigError("init_model: noise_std must be >= 0");
  if (clamp.min_error <= 0) throw ConfigError("init_model: clamp min_error must be > 0");

  ModelParams model;
  model.kind = kind;
  model.distance = distance;
  model.noise = noise;
  model.clamp = clamp;
  if (kind == ModelKind::Dnn) {
    std::vector<std::size_t> sizes;
    sizes.push_back(data_dim);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    std::vector<Activation> acts(hidden.size(), Activation::Tanh);
    acts.push_back(Activation::Identity);  // logit; sigmoid lives in the loss
    model.classifier = init_network(sizes, acts, Rng::derive_seed(seed, 0));
  } else {
    model.ae = make_autoencoder(data_dim, hidden, latent, seed);
  }
  return model;
}

// --- scalar pieces -----------------------------------------------------------

double distance_value(DistanceKind d, std::span<const double> x,
                      std::span<const double> xhat) {
  if (x.size() != xhat.size())
    throw ShapeError("distance_value: size mismatch " + std::to_string(x.size()) +
                     " vs " + std::to_string(xhat.size()));
  const double sq = squared_l2(x, xhat);
  return d == DistanceKind::SquaredL2 ? sq : std::sqrt(sq);
}

double abc_loss_from_error(double recon_error, int y, const LossClampConfig& clamp) {
  if (y == 1) return recon_error;
  if (y != 0) throw InputError("abc_loss_from_error: label must be 0 or 1");
  const double L = std::max(recon_error, clamp.min_error);
  // -log(1 - e^-L) via the two-branch log1mexp rule: below ln 2 expm1 keeps
  // 1 - e^-L accurate; above it log1p keeps the e^-L tail from rounding to 0
  constexpr double kSwitch = 0.6931471805599453;
  if (L <= kSwitch) return -std::log(-std::expm1(-L));
  return -std::log1p(-std::exp(-L));
}

double abc_loss_error_derivative(double recon_error, int y, const LossClampConfig& clamp) {
  if (y == 1) return 1.0;
  if (y != 0) throw InputError("abc_loss_error_derivative: label must be 0 or 1");
  if (recon_error < clamp.min_error) return 0.0;  // clamped plateau
  // d/dL of -log(1 - e^-L) is -e^-L / (1 - e^-L) = -1 / (e^L - 1)
  return -1.0 / std::expm1(recon_error);
}

double lrc_loss_from_error(double recon_error, int y) {
  if (y == 1) return recon_error;
  if (y != 0) throw InputError("lrc_loss_from_error: label must be 0 or 1");
  return -recon_error;
}

double eta_from_error(double recon_error) { return std::exp(-recon_error); }

double abc_score_from_error(double recon_error) {
  return 1.0 - std::exp(-recon_error);
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + e^z) without overflow
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

double sigmoid_cross_entropy(double logit, int y) {
  if (y != 0 && y != 1) throw InputError("sigmoid_cross_entropy: label must be 0 or 1");
  return softplus(logit) - static_cast<double>(y) * logit;
}

double sigmoid_cross_entropy_grad(double logit, int y) {
  if (y != 0 && y != 1) throw InputError("sigmoid_cross_entropy_grad: label must be 0 or 1");
  return sigmoid(logit) - static_cast<double>(y);
}

// --- per-point operations ----------------------------------------------------

double reconstruction_error(const AutoencoderParams& ae, std::span<const double> x,
                            DistanceKind distance) {
  const ReconTrace trace = reconstruct(ae, x);
  return distance_value(distance, x, trace.reconstruction());
}

double dae_reconstruction_error(const AutoencoderParams& ae, std::span<const double> x,
                                const DaeNoiseConfig& noise, DistanceKind distance,
                                Rng& rng) {
  std::vector<double> noisy(x.begin(), x.end());
  for (double& v : noisy) v += noise.noise_std * rng.normal();
  const ReconTrace trace = reconstruct(ae, noisy);
  return distance_value(distance, x, trace.reconstruction());
}

double eta(const AutoencoderParams& ae, std::span<const double> x, DistanceKind distance) {
  return eta_from_error(reconstruction_error(ae, x, distance));
}

double abc_anomaly_score(const AutoencoderParams& ae, std::span<const double> x,
                         DistanceKind distance) {
  return abc_score_from_error(reconstruction_error(ae, x, distance));
}

double abc_loss(const AutoencoderParams& ae, std::span<const double> x, int y,
                DistanceKind distance, const LossClampConfig& clamp) {
  return abc_loss_from_error(reconstruction_error(ae, x, distance), y, clamp);
}

double lrc_loss(const AutoencoderParams& ae, std::span<const double> x, int y,
                DistanceKind distance) {
  return lrc_loss_from_error(reconstruction_error(ae, x, distance), y);
}

double dnn_loss(const NetworkParams& classifier, std::span<const double> x, int y) {
  if (classifier.output_dim() != 1) throw ShapeError("dnn_loss: classifier output must be 1-d");
  return sigmoid_cross_entropy(forward(classifier, x).output()[0], y);
}

double dnn_score(const NetworkParams& classifier, std::span<const double> x) {
  if (classifier.output_dim() != 1) throw ShapeError("dnn_score: classifier output must be 1-d");
  return 1.0 - sigmoid(forward(classifier, x).output()[0]);
}

// --- batch dispatch ------------------------------------------------------------

namespace {

// d(err)/d(reconstruction), written into grad
void distance_gradient(DistanceKind d, std::span<const double> x,
                       std::span<const double> xhat, double err,
                       std::vector<double>& grad) {
  grad.resize(x.size());
  if (d == DistanceKind::SquaredL2) {
    for (std::size_t i = 0; i < x.size(); ++i) grad[i] = 2.0 * (xhat[i] - x[i]);
  } else {
    if (err == 0.0) {
      // sqrt kink at zero; subgradient 0 keeps the step finite
      std::fill(grad.begin(), grad.end(), 0.0);
      return;
    }
    for (std::size_t i = 0; i < x.size(); ++i) grad[i] = (xhat[i] - x[i]) / err;
  }
}

// d(per-point loss)/d(err) for a reconstruction kind
double loss_error_derivative(ModelKind kind, double err, int y,
                             const LossClampConfig& clamp) {
  switch (kind) {
    case ModelKind::Ae:
    case ModelKind::Dae:
      return 1.0;
    case ModelKind::Lrc:
      return y == 1 ? 1.0 : -1.0;
    case ModelKind::AbcAe:
    case ModelKind::AbcDae:
      return abc_loss_error_derivative(err, y, clamp);
    case ModelKind::Dnn:
      break;
  }
  throw ConfigError("loss_error_derivative: not a reconstruction kind");
}

double loss_from_error(ModelKind kind, double err, int y, const LossClampConfig& clamp) {
  switch (kind) {
    case ModelKind::Ae:
    case ModelKind::Dae:
      return err;
    case ModelKind::Lrc:
      return lrc_loss_from_error(err, y);
    case ModelKind::AbcAe:
    case ModelKind::AbcDae:
      return abc_loss_from_error(err, y, clamp);
    case ModelKind::Dnn:
      break;
  }
  throw ConfigError("loss_from_error: not a reconstruction kind");
}

void check_point(const ModelParams& model, const LabeledPoint& p) {
  if (p.y != 0 && p.y != 1)
    throw InputError("model batch: label must be 0 or 1, got " + std::to_string(p.y));
  if (p.x.size() != model.input_dim())
    throw ShapeError("model batch: point has " + std::to_string(p.x.size()) +
                     " dims, model expects " + std::to_string(model.input_dim()));
}

}  // namespace

std::pair<double, ModelGrads> model_loss_and_grads(const ModelParams& model,
                                                   std::span<const LabeledPoint> batch,
                                                   Rng& noise_rng) {
  if (batch.empty()) throw InputError("model_loss_and_grads: empty batch");
  const double w = 1.0 / static_cast<double>(batch.size());
  ModelGrads acc = zero_grads(model);
  double loss_sum = 0.0;

  if (model.kind == ModelKind::Dnn) {
    for (const LabeledPoint& p : batch) {
      check_point(model, p);
      const ForwardTrace trace = forward(model.classifier, p.x);
      const double logit = trace.output()[0];
      loss_sum += sigmoid_cross_entropy(logit, p.y);
      const double g = sigmoid_cross_entropy_grad(logit, p.y);
      auto [grads, input_grad] = backward(model.classifier, trace,
                                          std::span<const double>(&g, 1));
      (void)input_grad;
      add_scaled(acc.nets[0], grads, w);
    }
    return {loss_sum * w, std::move(acc)};
  }

  const bool noisy = uses_noise(model.kind);
  std::vector<double> input;
  std::vector<double> recon_grad;
  std::vector<double> out_grad;
  for (const LabeledPoint& p : batch) {
    check_point(model, p);
    input.assign(p.x.begin(), p.x.end());
    if (noisy)
      for (double& v : input) v += model.noise.noise_std * noise_rng.normal();

    const ReconTrace trace = reconstruct(model.ae, input);
    const double err = distance_value(model.distance, p.x, trace.reconstruction());
    loss_sum += loss_from_error(model.kind, err, p.y, model.clamp);

    const double dloss_derr = loss_error_derivative(model.kind, err, p.y, model.clamp);
    distance_gradient(model.distance, p.x, trace.reconstruction(), err, recon_grad);
    out_grad.resize(recon_grad.size());
    for (std::size_t i = 0; i < recon_grad.size(); ++i)
      out_grad[i] = dloss_derr * recon_grad[i];

    const AutoencoderGrads grads = recon_backward(model.ae, trace, out_grad);
    add_scaled(acc.nets[0], grads.encoder, w);
    add_scaled(acc.nets[1], grads.decoder, w);
  }
  return {loss_sum * w, std::move(acc)};
}

double model_mean_loss(const ModelParams& model, std::span<const LabeledPoint> batch,
                       Rng& noise_rng) {
  if (batch.empty()) throw InputError("model_mean_loss: empty batch");
  double loss_sum = 0.0;
  if (model.kind == ModelKind::Dnn) {
    for (const LabeledPoint& p : batch) {
      check_point(model, p);
      loss_sum += dnn_loss(model.classifier, p.x, p.y);
    }
    return loss_sum / static_cast<double>(batch.size());
  }

  const bool noisy = uses_noise(model.kind);
  std::vector<double> input;
  for (const LabeledPoint& p : batch) {
    check_point(model, p);
    input.assign(p.x.begin(), p.x.end());
    if (noisy)
      for (double& v : input) v += model.noise.noise_std * noise_rng.normal();
    const ReconTrace trace = reconstruct(model.ae, input);
    const double err = distance_value(model.distance, p.x, trace.reconstruction());
    loss_sum += loss_from_error(model.kind, err, p.y, model.clamp);
  }
  return loss_sum / static_cast<double>(batch.size());
}

double anomaly_score(const ModelParams& model, std::span<const double> x) {
  switch (model.kind) {
    case ModelKind::AbcAe:
    case ModelKind::AbcDae:
      return abc_anomaly_score(model.ae, x, model.distance);
    case ModelKind::Ae:
    case ModelKind::Dae:
    case ModelKind::Lrc:
      return reconstruction_error(model.ae, x, model.distance);
    case ModelKind::Dnn:
      return dnn_score(model.classifier, x);
  }
  throw ConfigError("unknown model kind enum value");
}

bool has_calibrated_threshold(ModelKind k) {
  return k == ModelKind::AbcAe || k == ModelKind::AbcDae || k == ModelKind::Dnn;
}

ModelGrads zero_grads(const ModelParams& model) {
  ModelGrads g;
  for (const NetworkParams* net : model.networks()) g.nets.push_back(zero_grads(*net));
  return g;
}

void add_scaled(ModelGrads& acc, const ModelGrads& g, double scale) {
  if (acc.nets.size() != g.nets.size())
    throw ShapeError("add_scaled: model gradient net count mismatch");
  for (std::size_t n = 0; n < acc.nets.size(); ++n)
    add_scaled(acc.nets[n], g.nets[n], scale);
}

void scale_grads(ModelGrads& g, double scale) {
  for (NetworkGrads& net : g.nets) scale_grads(net, scale);
}

bool bit_identical(const ModelParams& a, const ModelParams& b) {
  if (a.kind != b.kind || a.distance != b.distance) return false;
  const auto na = a.networks();
  const auto nb = b.networks();
  if (na.size() != nb.size()) return false;
  for (std::size_t i = 0; i < na.size(); ++i)
    if (!bit_identical(*na[i], *nb[i])) return false;
  return true;
}

}  // namespace abc
