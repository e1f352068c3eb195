#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace abc {

/// Where a point comes from. Known anomalies are labeled anomalies available
/// for training; unknown anomalies never appear labeled in training data.
enum class Role { Normal, KnownAnomaly, UnknownAnomaly };

std::string to_string(Role r);
Role role_from_string(const std::string& s);

/// y == 1 is normal, y == 0 is anomaly. Role and label agree except for
/// Setting-2 contaminants, which keep role UnknownAnomaly with y forced to 1.
struct LabeledPoint {
  std::vector<double> x;
  int y = 1;
  Role role = Role::Normal;
};

struct Dataset {
  std::vector<LabeledPoint> points;
  std::size_t dim = 0;
  std::string provenance;

  std::size_t size() const { return points.size(); }
  std::size_t count_role(Role r) const;
};

/// Two interleaving half-circles near the origin plus a far-away Gaussian
/// cluster. Normals sit on the upper unit half-circle, known anomalies on the
/// lower half-circle shifted by (+1, -0.5), both with isotropic Gaussian
/// jitter of std noise_std. Unknown anomalies are N((-3, 3), 0.3^2 I).
Dataset gen_toy(std::size_t n_normal, std::size_t n_known, std::size_t n_unknown,
                double noise_std, std::uint64_t seed);

/// Mean of the unknown-anomaly cluster and its per-dimension std.
inline constexpr double kToyUnknownMeanX = -3.0;
inline constexpr double kToyUnknownMeanY = 3.0;
inline constexpr double kToyUnknownStd = 0.3;

/// CSV schema: header f0,...,f{D-1},role with role in
/// {normal, known_anomaly, unknown_anomaly}; y is derived from role.
Dataset load_csv(const std::string& path);

/// Lenient variant for scoring: the role column may be absent, in which case
/// every point is loaded as normal.
Dataset load_csv_features(const std::string& path);

/// Full-precision export; a load_csv round trip reproduces the dataset
/// bit-exactly.
void save_csv(const Dataset& ds, const std::string& path);

/// Per-dimension linear map of the fit set's range onto [0, 1]. Fit on
/// training data only; transformed test values may fall outside [0, 1].
struct MinMaxScaler {
  std::vector<double> min;
  std::vector<double> max;
};

MinMaxScaler minmax_fit(const Dataset& train);
Dataset minmax_apply(const MinMaxScaler& scaler, const Dataset& ds);

enum class Setting { S1 = 1, S2 = 2, S3 = 3 };

struct SettingParams {
  std::size_t contaminants = 100;           // Setting 2: unknowns moved into train as y=1
  std::optional<std::size_t> known_cap;     // Setting 3: train known-anomaly count
};

/// Train/test partition for one experimental setting, with the index
/// manifests into the source dataset kept for audit.
struct ExperimentSplit {
  Dataset train;
  Dataset test;
  Setting setting = Setting::S1;
  SettingParams params;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Splits normals and known anomalies 50/50 between train and test (seeded),
/// then applies the setting: S1 keeps all unknowns in test; S2 moves
/// `contaminants` unknowns into train with y forced to 1; S3 subsamples the
/// train-side known anomalies down to `known_cap`.
ExperimentSplit assemble_setting(const Dataset& source, Setting setting,
                                 const SettingParams& params, std::uint64_t seed);

/// JSON manifest of the partition (indices per side) for audit.
std::string split_manifest_json(const ExperimentSplit& split);

}  // namespace abc
