#include "abc/adam.hpp"

#include <cmath>

#include "abc/errors.hpp"

namespace abc {

AdamState init_adam(const std::vector<const NetworkParams*>& nets, AdamConfig config) {
  if (config.learning_rate <= 0) throw ConfigError("adam: learning_rate must be > 0");
  if (config.beta1 < 0 || config.beta1 >= 1) throw ConfigError("adam: beta1 must be in [0, 1)");
  if (config.beta2 < 0 || config.beta2 >= 1) throw ConfigError("adam: beta2 must be in [0, 1)");
  if (config.epsilon <= 0) throw ConfigError("adam: epsilon must be > 0");

  AdamState state;
  state.config = config;
  state.m.reserve(nets.size());
  state.v.reserve(nets.size());
  for (const NetworkParams* net : nets) {
    state.m.push_back(zero_grads(*net));
    state.v.push_back(zero_grads(*net));
  }
  return state;
}

AdamState init_adam(const NetworkParams& net, AdamConfig config) {
  return init_adam(std::vector<const NetworkParams*>{&net}, config);
}

namespace {

void check_finite(const NetworkGrads& grads, std::size_t net_index) {
  for (std::size_t l = 0; l < grads.layers.size(); ++l) {
    const LayerGrads& lg = grads.layers[l];
    for (double g : lg.weights.data)
      if (!std::isfinite(g))
        throw NumericError("adam_step: non-finite weight gradient in network " +
                           std::to_string(net_index) + ", layer " + std::to_string(l));
    for (double g : lg.bias)
      if (!std::isfinite(g))
        throw NumericError("adam_step: non-finite bias gradient in network " +
                           std::to_string(net_index) + ", layer " + std::to_string(l));
  }
}

void update_buffer(double* param, const double* grad, double* m, double* v,
                   std::size_t n, const AdamConfig& c, double bc1, double bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * grad[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    param[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
  }
}

}  // namespace

void adam_step(AdamState& state, const std::vector<NetworkParams*>& nets,
               const std::vector<const NetworkGrads*>& grads) {
  if (nets.size() != state.m.size() || grads.size() != state.m.size())
    throw ShapeError("adam_step: network count does not match state");

  for (std::size_t n = 0; n < nets.size(); ++n) {
    if (grads[n]->layers.size() != nets[n]->layers.size())
      throw ShapeError("adam_step: gradient layer count mismatch in network " +
                       std::to_string(n));
    check_finite(*grads[n], n);
  }

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.config.beta2, static_cast<double>(state.step));

  for (std::size_t n = 0; n < nets.size(); ++n) {
    NetworkParams& net = *nets[n];
    const NetworkGrads& g = *grads[n];
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      Layer& layer = net.layers[l];
      const LayerGrads& lg = g.layers[l];
      LayerGrads& m = state.m[n].layers[l];
      LayerGrads& v = state.v[n].layers[l];
      if (lg.weights.size() != layer.weights.size() || lg.bias.size() != layer.bias.size())
        throw ShapeError("adam_step: gradient shape mismatch in network " +
                         std::to_string(n) + ", layer " + std::to_string(l));
      update_buffer(layer.weights.data.data(), lg.weights.data.data(),
                    m.weights.data.data(), v.weights.data.data(),
                    layer.weights.data.size(), state.config, bc1, bc2);
      update_buffer(layer.bias.data(), lg.bias.data(), m.bias.data(), v.bias.data(),
                    layer.bias.size(), state.config, bc1, bc2);
    }
  }
}

void adam_step(AdamState& state, NetworkParams& net, const NetworkGrads& grads) {
  adam_step(state, std::vector<NetworkParams*>{&net},
            std::vector<const NetworkGrads*>{&grads});
}

}  // namespace abc
