#include "abc/serialize.hpp"

#include <fstream>
#include <sstream>

#include "abc/errors.hpp"

#include <nlohmann/json.hpp>

namespace abc {

namespace {

nlohmann::json network_to_json(const NetworkParams& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : net.layers) {
    nlohmann::json j;
    j["in"] = l.in_dim();
    j["out"] = l.out_dim();
    j["activation"] = to_string(l.activation);
    j["weights"] = l.weights.data;  // row-major
    j["bias"] = l.bias;
    layers.push_back(std::move(j));
  }
  return nlohmann::json{{"layers", std::move(layers)}};
}

NetworkParams network_from_json(const nlohmann::json& j) {
  NetworkParams net;
  for (const nlohmann::json& lj : j.at("layers")) {
    Layer l;
    const std::size_t in = lj.at("in").get<std::size_t>();
    const std::size_t out = lj.at("out").get<std::size_t>();
    l.activation = activation_from_string(lj.at("activation").get<std::string>());
    l.weights = Matrix(out, in);
    const auto& w = lj.at("weights");
    if (w.size() != out * in)
      throw ParseError("model JSON: layer weights length " + std::to_string(w.size()) +
                       " != " + std::to_string(out) + "x" + std::to_string(in));
    l.weights.data = w.get<std::vector<double>>();
    l.bias = lj.at("bias").get<std::vector<double>>();
    if (l.bias.size() != out)
      throw ParseError("model JSON: layer bias length " + std::to_string(l.bias.size()) +
                       " != " + std::to_string(out));
    net.layers.push_back(std::move(l));
  }
  if (net.layers.empty()) throw ParseError("model JSON: network has no layers");
  for (std::size_t i = 1; i < net.layers.size(); ++i)
    if (net.layers[i].in_dim() != net.layers[i - 1].out_dim())
      throw ParseError("model JSON: layer dimensions do not chain");
  return net;
}

}  // namespace

std::string model_to_json(const ModelParams& model) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = to_string(model.kind);
  j["distance"] = to_string(model.distance);
  j["noise_std"] = model.noise.noise_std;
  j["clamp_min_error"] = model.clamp.min_error;
  if (model.kind == ModelKind::Dnn) {
    j["classifier"] = network_to_json(model.classifier);
  } else {
    j["encoder"] = network_to_json(model.ae.encoder);
    j["decoder"] = network_to_json(model.ae.decoder);
  }
  return j.dump(2) + "\n";
}

ModelParams model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      throw ParseError("model JSON: unsupported format_version " + std::to_string(version));
    ModelParams model;
    model.kind = model_kind_from_string(j.at("kind").get<std::string>());
    model.distance = distance_from_string(j.at("distance").get<std::string>());
    model.noise.noise_std = j.at("noise_std").get<double>();
    model.clamp.min_error = j.at("clamp_min_error").get<double>();
    if (model.kind == ModelKind::Dnn) {
      model.classifier = network_from_json(j.at("classifier"));
      if (model.classifier.output_dim() != 1)
        throw ParseError("model JSON: classifier output dim must be 1");
    } else {
      model.ae.encoder = network_from_json(j.at("encoder"));
      model.ae.decoder = network_from_json(j.at("decoder"));
      validate(model.ae);
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  } catch (const ShapeError& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
}

void save_model(const ModelParams& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << model_to_json(model);
  if (!out) throw ParseError(path + ": write failed");
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace abc
