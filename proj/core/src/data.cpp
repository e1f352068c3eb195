#include "abc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "abc/errors.hpp"
#include "abc/rng.hpp"

#include <nlohmann/json.hpp>

namespace abc {

std::string to_string(Role r) {
  switch (r) {
    case Role::Normal: return "normal";
    case Role::KnownAnomaly: return "known_anomaly";
    case Role::UnknownAnomaly: return "unknown_anomaly";
  }
  throw ConfigError("unknown role enum value");
}

Role role_from_string(const std::string& s) {
  if (s == "normal") return Role::Normal;
  if (s == "known_anomaly") return Role::KnownAnomaly;
  if (s == "unknown_anomaly") return Role::UnknownAnomaly;
  throw ConfigError("unknown role: '" + s + "'");
}

namespace {

int label_for_role(Role r) { return r == Role::Normal ? 1 : 0; }

}  // namespace

std::size_t Dataset::count_role(Role r) const {
  std::size_t n = 0;
  for (const LabeledPoint& p : points)
    if (p.role == r) ++n;
  return n;
}

Dataset gen_toy(std::size_t n_normal, std::size_t n_known, std::size_t n_unknown,
                double noise_std, std::uint64_t seed) {
  if (noise_std < 0) throw ConfigError("gen_toy: noise_std must be >= 0");
  constexpr double kPi = 3.141592653589793238462643383279502884;

  Dataset ds;
  ds.dim = 2;
  ds.points.reserve(n_normal + n_known + n_unknown);

  Rng rng_normal(Rng::derive_seed(seed, 0));
  for (std::size_t i = 0; i < n_normal; ++i) {
    const double t = rng_normal.uniform(0.0, kPi);
    LabeledPoint p;
    p.x = {std::cos(t) + noise_std * rng_normal.normal(),
           std::sin(t) + noise_std * rng_normal.normal()};
    p.y = 1;
    p.role = Role::Normal;
    ds.points.push_back(std::move(p));
  }

  Rng rng_known(Rng::derive_seed(seed, 1));
  for (std::size_t i = 0; i < n_known; ++i) {
    const double t = rng_known.uniform(0.0, kPi);
    LabeledPoint p;
    p.x = {1.0 - std::cos(t) + noise_std * rng_known.normal(),
           0.5 - std::sin(t) + noise_std * rng_known.normal()};
    p.y = 0;
    p.role = Role::KnownAnomaly;
    ds.points.push_back(std::move(p));
  }

  Rng rng_unknown(Rng::derive_seed(seed, 2));
  for (std::size_t i = 0; i < n_unknown; ++i) {
    LabeledPoint p;
    p.x = {kToyUnknownMeanX + kToyUnknownStd * rng_unknown.normal(),
           kToyUnknownMeanY + kToyUnknownStd * rng_unknown.normal()};
    p.y = 0;
    p.role = Role::UnknownAnomaly;
    ds.points.push_back(std::move(p));
  }

  char buf[160];
  std::snprintf(buf, sizeof buf, "toy(n_normal=%zu,n_known=%zu,n_unknown=%zu,noise_std=%g,seed=%llu)",
                n_normal, n_known, n_unknown, noise_std,
                static_cast<unsigned long long>(seed));
  ds.provenance = buf;
  return ds;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& field, const std::string& path, std::size_t lineno) {
  double value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(path + ":" + std::to_string(lineno) + ": not a number: '" + field + "'");
  // from_chars accepts "nan"/"inf"; neither is a usable feature value
  if (!std::isfinite(value))
    throw ParseError(path + ":" + std::to_string(lineno) + ": non-finite feature: '" +
                     field + "'");
  return value;
}

Role parse_role(const std::string& field, const std::string& path, std::size_t lineno) {
  if (field == "normal") return Role::Normal;
  if (field == "known_anomaly") return Role::KnownAnomaly;
  if (field == "unknown_anomaly") return Role::UnknownAnomaly;
  throw ParseError(path + ":" + std::to_string(lineno) + ": unknown role: '" + field + "'");
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

Dataset load_csv_impl(const std::string& path, bool require_role) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty file, header required");

  const std::vector<std::string> header = split_fields(lines[0]);
  const bool has_role = header.back() == "role";
  if (require_role && !has_role)
    throw ParseError(path + ":1: last header column must be 'role'");
  const std::size_t dim = has_role ? header.size() - 1 : header.size();
  if (dim == 0) throw ParseError(path + ":1: no feature columns");
  for (std::size_t d = 0; d < dim; ++d) {
    const std::string expected = "f" + std::to_string(d);
    if (header[d] != expected)
      throw ParseError(path + ":1: header column " + std::to_string(d + 1) +
                       " is '" + header[d] + "', expected '" + expected + "'");
  }

  Dataset ds;
  ds.dim = dim;
  ds.provenance = path;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() && i + 1 == lines.size()) break;  // trailing newline
    const std::vector<std::string> fields = split_fields(lines[i]);
    if (fields.size() != header.size())
      throw ParseError(path + ":" + std::to_string(i + 1) + ": expected " +
                       std::to_string(header.size()) + " columns, got " +
                       std::to_string(fields.size()));
    LabeledPoint p;
    p.x.reserve(dim);
    for (std::size_t d = 0; d < dim; ++d)
      p.x.push_back(parse_double(fields[d], path, i + 1));
    p.role = has_role ? parse_role(fields[dim], path, i + 1) : Role::Normal;
    p.y = label_for_role(p.role);
    ds.points.push_back(std::move(p));
  }
  return ds;
}

}  // namespace

Dataset load_csv(const std::string& path) { return load_csv_impl(path, true); }

Dataset load_csv_features(const std::string& path) { return load_csv_impl(path, false); }

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  for (std::size_t d = 0; d < ds.dim; ++d) out << "f" << d << ",";
  out << "role\n";
  char buf[40];
  for (const LabeledPoint& p : ds.points) {
    if (p.x.size() != ds.dim)
      throw ShapeError("save_csv: point has " + std::to_string(p.x.size()) +
                       " dims, dataset dim is " + std::to_string(ds.dim));
    for (double v : p.x) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ",";
    }
    out << to_string(p.role) << "\n";
  }
  if (!out) throw ParseError(path + ": write failed");
}

MinMaxScaler minmax_fit(const Dataset& train) {
  if (train.points.empty()) throw InputError("minmax_fit: empty dataset");
  MinMaxScaler s;
  s.min.assign(train.dim, std::numeric_limits<double>::infinity());
  s.max.assign(train.dim, -std::numeric_limits<double>::infinity());
  for (const LabeledPoint& p : train.points) {
    for (std::size_t d = 0; d < train.dim; ++d) {
      s.min[d] = std::min(s.min[d], p.x[d]);
      s.max[d] = std::max(s.max[d], p.x[d]);
    }
  }
  return s;
}

Dataset minmax_apply(const MinMaxScaler& scaler, const Dataset& ds) {
  if (scaler.min.size() != ds.dim)
    throw ShapeError("minmax_apply: scaler has " + std::to_string(scaler.min.size()) +
                     " dims, dataset has " + std::to_string(ds.dim));
  Dataset out = ds;
  for (LabeledPoint& p : out.points) {
    for (std::size_t d = 0; d < out.dim; ++d) {
      const double range = scaler.max[d] - scaler.min[d];
      p.x[d] = range > 0 ? (p.x[d] - scaler.min[d]) / range : 0.0;
    }
  }
  return out;
}

ExperimentSplit assemble_setting(const Dataset& source, Setting setting,
                                 const SettingParams& params, std::uint64_t seed) {
  std::vector<std::size_t> normals, knowns, unknowns;
  for (std::size_t i = 0; i < source.points.size(); ++i) {
    switch (source.points[i].role) {
      case Role::Normal: normals.push_back(i); break;
      case Role::KnownAnomaly: knowns.push_back(i); break;
      case Role::UnknownAnomaly: unknowns.push_back(i); break;
    }
  }
  if (normals.size() < 2)
    throw ConfigError("assemble_setting: need at least 2 normal points, got " +
                      std::to_string(normals.size()));
  if (knowns.size() < 2)
    throw ConfigError("assemble_setting: need at least 2 known anomalies, got " +
                      std::to_string(knowns.size()));

  auto shuffled = [&](std::vector<std::size_t> v, std::uint64_t stream) {
    Rng rng(Rng::derive_seed(seed, stream));
    const std::vector<std::size_t> perm = rng.permutation(v.size());
    std::vector<std::size_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[perm[i]];
    return out;
  };
  normals = shuffled(std::move(normals), 10);
  knowns = shuffled(std::move(knowns), 11);
  unknowns = shuffled(std::move(unknowns), 12);

  ExperimentSplit split;
  split.setting = setting;
  split.params = params;

  const std::size_t n_train_normal = normals.size() / 2;
  const std::size_t n_train_known = knowns.size() / 2;
  std::vector<std::size_t> train_knowns(knowns.begin(),
                                        knowns.begin() + static_cast<std::ptrdiff_t>(n_train_known));

  if (setting == Setting::S3) {
    if (!params.known_cap)
      throw ConfigError("assemble_setting: Setting 3 requires known_cap");
    if (*params.known_cap > train_knowns.size())
      throw ConfigError("assemble_setting: known_cap " + std::to_string(*params.known_cap) +
                        " exceeds available train-side known anomalies (" +
                        std::to_string(train_knowns.size()) + ")");
    Rng rng(Rng::derive_seed(seed, 13));
    const std::vector<std::size_t> perm = rng.permutation(train_knowns.size());
    std::vector<std::size_t> capped;
    capped.reserve(*params.known_cap);
    for (std::size_t i = 0; i < *params.known_cap; ++i)
      capped.push_back(train_knowns[perm[i]]);
    train_knowns = std::move(capped);
  }

  std::size_t n_contaminants = 0;
  if (setting == Setting::S2) {
    n_contaminants = params.contaminants;
    if (n_contaminants > unknowns.size())
      throw ConfigError("assemble_setting: " + std::to_string(n_contaminants) +
                        " contaminants requested but only " +
                        std::to_string(unknowns.size()) + " unknown anomalies available");
  }

  split.train.dim = source.dim;
  split.test.dim = source.dim;
  split.train.provenance = source.provenance + " [train]";
  split.test.provenance = source.provenance + " [test]";

  auto push = [&](Dataset& side, std::vector<std::size_t>& manifest, std::size_t idx) {
    side.points.push_back(source.points[idx]);
    manifest.push_back(idx);
  };

  for (std::size_t i = 0; i < n_train_normal; ++i)
    push(split.train, split.train_indices, normals[i]);
  for (std::size_t idx : train_knowns) push(split.train, split.train_indices, idx);
  for (std::size_t i = 0; i < n_contaminants; ++i) {
    push(split.train, split.train_indices, unknowns[i]);
    split.train.points.back().y = 1;  // unlabeled contamination enters as normal
  }

  for (std::size_t i = n_train_normal; i < normals.size(); ++i)
    push(split.test, split.test_indices, normals[i]);
  for (std::size_t i = n_train_known; i < knowns.size(); ++i)
    push(split.test, split.test_indices, knowns[i]);
  for (std::size_t i = n_contaminants; i < unknowns.size(); ++i)
    push(split.test, split.test_indices, unknowns[i]);

  return split;
}

std::string split_manifest_json(const ExperimentSplit& split) {
  nlohmann::json j;
  j["setting"] = static_cast<int>(split.setting);
  j["contaminants"] = split.params.contaminants;
  if (split.params.known_cap)
    j["known_cap"] = *split.params.known_cap;
  else
    j["known_cap"] = nullptr;
  j["train_indices"] = split.train_indices;
  j["test_indices"] = split.test_indices;
  return j.dump(2) + "\n";
}

}  // namespace abc
