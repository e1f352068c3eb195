#pragma once

#include <string>

#include "abc/models.hpp"
#include "abc/network.hpp"

namespace abc {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON snapshot of a trained model: kind, distance, noise and
/// clamp settings, and every network's layer sizes, activations, and
/// row-major weights. Round trip is bit exact (doubles serialized with 17
/// significant digits).
std::string model_to_json(const ModelParams& model);
ModelParams model_from_json(const std::string& text);

void save_model(const ModelParams& model, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace abc
