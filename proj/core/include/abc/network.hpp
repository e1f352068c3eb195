#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abc/linalg.hpp"

namespace abc {

enum class Activation { Tanh, Identity, Sigmoid };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// One dense layer: out = act(weights * in + bias).
struct Layer {
  Matrix weights;            // [out x in]
  std::vector<double> bias;  // [out]
  Activation activation = Activation::Tanh;

  std::size_t in_dim() const { return weights.cols; }
  std::size_t out_dim() const { return weights.rows; }
};

/// A dense feed-forward network: an ordered chain of layers whose adjacent
/// dimensions agree.
struct NetworkParams {
  std::vector<Layer> layers;

  std::size_t input_dim() const { return layers.front().in_dim(); }
  std::size_t output_dim() const { return layers.back().out_dim(); }
  std::size_t parameter_count() const;
};

/// Gradient (or moment) buffer shaped like one layer's parameters.
struct LayerGrads {
  Matrix weights;
  std::vector<double> bias;
};

/// Gradient buffer shaped like a whole network.
struct NetworkGrads {
  std::vector<LayerGrads> layers;
};

/// Everything forward() computed, retained for backward(): the input, each
/// layer's pre-activation z_l = W_l a_{l-1} + b_l, and each activation a_l.
struct ForwardTrace {
  std::vector<double> input;
  std::vector<std::vector<double>> preacts;
  std::vector<std::vector<double>> acts;

  const std::vector<double>& output() const { return acts.back(); }
};

/// Glorot-uniform weights (scale sqrt(6/(fan_in+fan_out))), zero biases.
/// Identical seed gives bit-identical parameters; draw order is layer by
/// layer, row-major within a weight matrix.
NetworkParams init_network(const std::vector<std::size_t>& layer_sizes,
                           const std::vector<Activation>& activations,
                           std::uint64_t seed);

ForwardTrace forward(const NetworkParams& params, std::span<const double> input);

/// Reverse-mode gradients of a scalar loss given d(loss)/d(output). Returns
/// the parameter gradients and d(loss)/d(input), which lets callers chain
/// networks (decoder backward into encoder backward).
std::pair<NetworkGrads, std::vector<double>> backward(const NetworkParams& params,
                                                      const ForwardTrace& trace,
                                                      std::span<const double> output_grad);

NetworkGrads zero_grads(const NetworkParams& params);

/// acc += scale * g, layer by layer. Fixed-order summation.
void add_scaled(NetworkGrads& acc, const NetworkGrads& g, double scale);
void scale_grads(NetworkGrads& g, double scale);

bool bit_identical(const NetworkParams& a, const NetworkParams& b);

}  // namespace abc
