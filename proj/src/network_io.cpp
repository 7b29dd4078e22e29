#include "vgs/network_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vgs {

using nlohmann::json;

static json layer_to_json(const Layer& layer) {
  json jw = json::array();
  for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < layer.weights.cols(); ++j)
      row.push_back(layer.weights(i, j));
    jw.push_back(std::move(row));
  }
  json jb = json::array();
  for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
    jb.push_back(layer.bias[i]);
  return json{{"weights", std::move(jw)},
              {"bias", std::move(jb)},
              {"activation",
               layer.activation == Activation::relu ? "relu" : "identity"}};
}

std::string network_to_json(const Network& net) {
  json j;
  j["input_dim"] = net.input_dim();
  j["layers"] = json::array();
  for (const auto& layer : net.layers) j["layers"].push_back(layer_to_json(layer));
  return j.dump(2) + "\n";
}

static Layer layer_from_json(const json& j) {
  if (!j.contains("weights") || !j.contains("bias"))
    throw std::runtime_error("weight file: layer missing weights or bias");
  const auto& jw = j.at("weights");
  if (!jw.is_array() || jw.empty())
    throw std::runtime_error("weight file: weights must be a non-empty matrix");
  const Eigen::Index rows = static_cast<Eigen::Index>(jw.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(jw.at(0).size());
  Layer layer;
  layer.weights.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = jw.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw std::runtime_error("weight file: ragged weight matrix");
    for (Eigen::Index j2 = 0; j2 < cols; ++j2)
      layer.weights(i, j2) = row.at(static_cast<std::size_t>(j2)).get<double>();
  }
  const auto& jb = j.at("bias");
  layer.bias.resize(static_cast<Eigen::Index>(jb.size()));
  for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
    layer.bias[i] = jb.at(static_cast<std::size_t>(i)).get<double>();
  const std::string act = j.value("activation", "relu");
  if (act == "relu")
    layer.activation = Activation::relu;
  else if (act == "identity")
    layer.activation = Activation::identity;
  else
    throw std::runtime_error("weight file: unknown activation '" + act + "'");
  return layer;
}

Network network_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("weight file: ") + e.what());
  }
  if (!j.contains("layers") || !j.at("layers").is_array() ||
      j.at("layers").empty())
    throw std::runtime_error("weight file: empty layer list");
  Network net;
  for (const auto& jl : j.at("layers")) net.layers.push_back(layer_from_json(jl));
  if (j.contains("input_dim") &&
      j.at("input_dim").get<Eigen::Index>() != net.input_dim())
    throw std::invalid_argument(
        "weight file: input_dim does not match first layer");
  validate(net);
  return net;
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return network_from_json(ss.str());
}

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write weight file: " + path);
  out << network_to_json(net);
}

}  // namespace vgs
