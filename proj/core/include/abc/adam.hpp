#pragma once

#include <cstdint>
#include <vector>

#include "abc/network.hpp"

namespace abc {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam accumulators for a list of networks updated in lockstep. Moments are
/// zero and the step counter is 0 until the first update.
struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  std::vector<NetworkGrads> m;  // first moments, one entry per network
  std::vector<NetworkGrads> v;  // second moments
};

AdamState init_adam(const std::vector<const NetworkParams*>& nets, AdamConfig config);
AdamState init_adam(const NetworkParams& net, AdamConfig config);

/// One bias-corrected Adam update across all networks. Throws NumericError
/// naming the offending network/layer if a gradient entry is not finite.
void adam_step(AdamState& state, const std::vector<NetworkParams*>& nets,
               const std::vector<const NetworkGrads*>& grads);
void adam_step(AdamState& state, NetworkParams& net, const NetworkGrads& grads);

}  // namespace abc
