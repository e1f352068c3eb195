#include "abc/network.hpp"

#include <cmath>
#include <cstring>
#include <utility>

#include "abc/errors.hpp"
#include "abc/rng.hpp"

namespace abc {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
    case Activation::Sigmoid: return "sigmoid";
  }
  throw ConfigError("unknown activation enum value");
}

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "identity") return Activation::Identity;
  if (s == "sigmoid") return Activation::Sigmoid;
  throw ConfigError("unknown activation: '" + s + "'");
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

NetworkParams init_network(const std::vector<std::size_t>& layer_sizes,
                           const std::vector<Activation>& activations,
                           std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw ConfigError("init_network: need at least input and output sizes, got " +
                      std::to_string(layer_sizes.size()));
  if (activations.size() != layer_sizes.size() - 1)
    throw ConfigError("init_network: " + std::to_string(layer_sizes.size() - 1) +
                      " layers but " + std::to_string(activations.size()) + " activations");
  for (std::size_t s : layer_sizes)
    if (s == 0) throw ConfigError("init_network: zero layer size");

  Rng rng(seed);
  NetworkParams net;
  net.layers.reserve(activations.size());
  for (std::size_t l = 0; l < activations.size(); ++l) {
    const std::size_t fan_in = layer_sizes[l];
    const std::size_t fan_out = layer_sizes[l + 1];
    Layer layer;
    layer.weights = Matrix(fan_out, fan_in);
    layer.bias.assign(fan_out, 0.0);
    layer.activation = activations[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& w : layer.weights.data) w = rng.uniform(-bound, bound);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

namespace {

double apply_activation(Activation a, double z) {
  switch (a) {
    case Activation::Tanh: return std::tanh(z);
    case Activation::Identity: return z;
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
  }
  throw ConfigError("unknown activation enum value");
}

// Derivative in terms of the activation output (cheaper and more accurate
// than re-evaluating at z).
double activation_derivative(Activation a, double act_value) {
  switch (a) {
    case Activation::Tanh: return 1.0 - act_value * act_value;
    case Activation::Identity: return 1.0;
    case Activation::Sigmoid: return act_value * (1.0 - act_value);
  }
  throw ConfigError("unknown activation enum value");
}

}  // namespace

ForwardTrace forward(const NetworkParams& params, std::span<const double> input) {
  if (params.layers.empty()) throw ShapeError("forward: network has no layers");
  if (input.size() != params.input_dim())
    throw ShapeError("forward: input has " + std::to_string(input.size()) +
                     " dims, network expects " + std::to_string(params.input_dim()));

  ForwardTrace trace;
  trace.input.assign(input.begin(), input.end());
  trace.preacts.reserve(params.layers.size());
  trace.acts.reserve(params.layers.size());

  const std::vector<double>* prev = &trace.input;
  for (const Layer& layer : params.layers) {
    if (prev->size() != layer.in_dim())
      throw ShapeError("forward: layer expects " + std::to_string(layer.in_dim()) +
                       " inputs, got " + std::to_string(prev->size()));
    std::vector<double> z(layer.out_dim());
    for (std::size_t i = 0; i < layer.out_dim(); ++i) {
      double s = layer.bias[i];
      const double* w = &layer.weights.data[i * layer.in_dim()];
      for (std::size_t j = 0; j < layer.in_dim(); ++j) s += w[j] * (*prev)[j];
      z[i] = s;
    }
    std::vector<double> a(layer.out_dim());
    for (std::size_t i = 0; i < layer.out_dim(); ++i)
      a[i] = apply_activation(layer.activation, z[i]);
    trace.preacts.push_back(std::move(z));
    trace.acts.push_back(std::move(a));
    prev = &trace.acts.back();
  }
  return trace;
}

std::pair<NetworkGrads, std::vector<double>> backward(const NetworkParams& params,
                                                      const ForwardTrace& trace,
                                                      std::span<const double> output_grad) {
  const std::size_t n_layers = params.layers.size();
  if (trace.acts.size() != n_layers || trace.preacts.size() != n_layers)
    throw ShapeError("backward: trace does not match network depth");
  if (output_grad.size() != params.output_dim())
    throw ShapeError("backward: output_grad has " + std::to_string(output_grad.size()) +
                     " dims, network output is " + std::to_string(params.output_dim()));

  NetworkGrads grads = zero_grads(params);
  std::vector<double> delta(output_grad.begin(), output_grad.end());

  for (std::size_t l = n_layers; l-- > 0;) {
    const Layer& layer = params.layers[l];
    const std::vector<double>& act = trace.acts[l];
    const std::vector<double>& below = l == 0 ? trace.input : trace.acts[l - 1];

    // d(loss)/dz = d(loss)/da * act'(z)
    for (std::size_t i = 0; i < delta.size(); ++i)
      delta[i] *= activation_derivative(layer.activation, act[i]);

    LayerGrads& lg = grads.layers[l];
    for (std::size_t i = 0; i < layer.out_dim(); ++i) {
      lg.bias[i] = delta[i];
      double* gw = &lg.weights.data[i * layer.in_dim()];
      for (std::size_t j = 0; j < layer.in_dim(); ++j) gw[j] = delta[i] * below[j];
    }

    std::vector<double> prev_delta(layer.in_dim(), 0.0);
    for (std::size_t i = 0; i < layer.out_dim(); ++i) {
      const double* w = &layer.weights.data[i * layer.in_dim()];
      for (std::size_t j = 0; j < layer.in_dim(); ++j) prev_delta[j] += w[j] * delta[i];
    }
    delta = std::move(prev_delta);
  }
  return {std::move(grads), std::move(delta)};
}

NetworkGrads zero_grads(const NetworkParams& params) {
  NetworkGrads g;
  g.layers.reserve(params.layers.size());
  for (const Layer& l : params.layers) {
    LayerGrads lg;
    lg.weights = Matrix(l.out_dim(), l.in_dim());
    lg.bias.assign(l.out_dim(), 0.0);
    g.layers.push_back(std::move(lg));
  }
  return g;
}

void add_scaled(NetworkGrads& acc, const NetworkGrads& g, double scale) {
  if (acc.layers.size() != g.layers.size())
    throw ShapeError("add_scaled: layer count mismatch");
  for (std::size_t l = 0; l < acc.layers.size(); ++l) {
    LayerGrads& a = acc.layers[l];
    const LayerGrads& b = g.layers[l];
    if (a.weights.size() != b.weights.size() || a.bias.size() != b.bias.size())
      throw ShapeError("add_scaled: layer shape mismatch");
    for (std::size_t i = 0; i < a.weights.data.size(); ++i)
      a.weights.data[i] += scale * b.weights.data[i];
    for (std::size_t i = 0; i < a.bias.size(); ++i) a.bias[i] += scale * b.bias[i];
  }
}

void scale_grads(NetworkGrads& g, double scale) {
  for (LayerGrads& l : g.layers) {
    for (double& w : l.weights.data) w *= scale;
    for (double& b : l.bias) b *= scale;
  }
}

namespace {

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  return a.empty() ||
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

bool bit_identical(const NetworkParams& a, const NetworkParams& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    const Layer& la = a.layers[l];
    const Layer& lb = b.layers[l];
    if (la.weights.rows != lb.weights.rows || la.weights.cols != lb.weights.cols)
      return false;
    if (la.activation != lb.activation) return false;
    if (!bits_equal(la.weights.data, lb.weights.data)) return false;
    if (!bits_equal(la.bias, lb.bias)) return false;
  }
  return true;
}

}  // namespace abc
