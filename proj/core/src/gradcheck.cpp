#include "abc/gradcheck.hpp"

#include <cmath>
#include <tuple>
#include <vector>

#include "abc/errors.hpp"

namespace abc {

namespace {

struct Coord {
  std::size_t net, layer, index;
  bool is_bias;
};

std::vector<Coord> all_coords(const ModelParams& params) {
  std::vector<Coord> coords;
  const auto nets = params.networks();
  for (std::size_t n = 0; n < nets.size(); ++n) {
    for (std::size_t l = 0; l < nets[n]->layers.size(); ++l) {
      const Layer& layer = nets[n]->layers[l];
      for (std::size_t i = 0; i < layer.weights.data.size(); ++i)
        coords.push_back({n, l, i, false});
      for (std::size_t i = 0; i < layer.bias.size(); ++i)
        coords.push_back({n, l, i, true});
    }
  }
  return coords;
}

double& coord_ref(ModelParams& params, const Coord& c) {
  Layer& layer = params.networks()[c.net]->layers[c.layer];
  return c.is_bias ? layer.bias[c.index] : layer.weights.data[c.index];
}

double analytic_at(const ModelGrads& grads, const Coord& c) {
  const LayerGrads& lg = grads.nets[c.net].layers[c.layer];
  return c.is_bias ? lg.bias[c.index] : lg.weights.data[c.index];
}

}  // namespace

GradCheckReport gradient_check(const std::function<double(const ModelParams&)>& loss,
                               const std::function<ModelGrads(const ModelParams&)>& analytic_grads,
                               const ModelParams& params, double tolerance,
                               std::uint64_t sample_seed, std::size_t max_coords,
                               double h) {
  if (h <= 0) throw ConfigError("gradient_check: h must be > 0");
  if (tolerance <= 0) throw ConfigError("gradient_check: tolerance must be > 0");

  std::vector<Coord> coords = all_coords(params);
  if (max_coords > 0 && max_coords < coords.size()) {
    Rng rng(sample_seed);
    const std::vector<std::size_t> perm = rng.permutation(coords.size());
    std::vector<Coord> sampled;
    sampled.reserve(max_coords);
    for (std::size_t i = 0; i < max_coords; ++i) sampled.push_back(coords[perm[i]]);
    coords = std::move(sampled);
  }

  const ModelGrads analytic = analytic_grads(params);

  GradCheckReport report;
  report.coords_checked = coords.size();
  ModelParams work = params;
  for (const Coord& c : coords) {
    double& slot = coord_ref(work, c);
    const double original = slot;
    slot = original + h;
    const double f_plus = loss(work);
    slot = original - h;
    const double f_minus = loss(work);
    slot = original;

    const double fd = (f_plus - f_minus) / (2.0 * h);
    const double a = analytic_at(analytic, c);
    const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-5});
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_net = c.net;
      report.worst_layer = c.layer;
      report.worst_is_bias = c.is_bias;
      report.worst_index = c.index;
    }
  }
  report.pass = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace abc
