#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "abc/models.hpp"
#include "abc/rng.hpp"

namespace abc {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
  bool pass = false;
  // location of the worst coordinate
  std::size_t worst_net = 0;
  std::size_t worst_layer = 0;
  bool worst_is_bias = false;
  std::size_t worst_index = 0;
};

/// Central-difference check of analytic gradients. Perturbs parameter
/// coordinates one at a time (all of them, or a seeded sample of max_coords
/// when that is smaller) and compares (f(p+h)-f(p-h))/2h against the analytic
/// component at relative error |a-fd| / max(|a|, |fd|, 1e-5).
///
/// `loss` must be evaluable at perturbed parameters and deterministic: fix
/// any noise draw inside the callback.
GradCheckReport gradient_check(const std::function<double(const ModelParams&)>& loss,
                               const std::function<ModelGrads(const ModelParams&)>& analytic_grads,
                               const ModelParams& params, double tolerance,
                               std::uint64_t sample_seed = 0, std::size_t max_coords = 0,
                               double h = 1e-5);

}  // namespace abc
