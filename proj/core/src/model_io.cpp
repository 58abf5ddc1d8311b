#include "convser/model_io.hpp"

#include <fstream>

#include "convser/errors.hpp"

namespace convser {

namespace {

std::array<std::pair<Eigen::Index, Eigen::Index>, ModelParams::kTensorCount> shapes(
    const ModelConfig& c) {
  const Eigen::Index u = c.lstm_units;
  return {{{c.kernel_size, c.filters},
           {c.filters, 1},
           {4 * u, c.lstm_input_width()},
           {4 * u, u},
           {4 * u, 1},
           {u, 1},
           {1, 1}}};
}

}  // namespace

nlohmann::json model_to_json(const SavedModel& model) {
  nlohmann::json tensors = nlohmann::json::object();
  const auto dims = shapes(model.config);
  const auto data = model.params.tensors();
  for (std::size_t i = 0; i < ModelParams::kTensorCount; ++i) {
    // Values are stored column-major, matching the in-memory layout.
    tensors[ModelParams::tensor_names()[i]] = {
        {"shape", {dims[i].first, dims[i].second}},
        {"layout", "column_major"},
        {"data", std::vector<double>(data[i].begin(), data[i].end())}};
  }
  return {{"format", "convser-model"},
          {"version", kModelFormatVersion},
          {"config", model.config},
          {"gate_order", kGateOrder},
          {"parameter_count", parameter_count(model.config)},
          {"tensors", std::move(tensors)},
          {"metadata", model.metadata}};
}

SavedModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "convser-model") throw FormatError("not a convser model file");
  if (j.value("version", 0) != kModelFormatVersion)
    throw FormatError("unsupported model version " + j.value("version", nlohmann::json()).dump());
  const auto order = j.at("gate_order").get<std::vector<std::string>>();
  if (order != std::vector<std::string>(kGateOrder.begin(), kGateOrder.end()))
    throw FormatError("unsupported LSTM gate order");

  SavedModel model;
  model.config = j.at("config").get<ModelConfig>();
  model.params = ModelParams::zeros(model.config);
  model.metadata = j.value("metadata", nlohmann::json::object());
  const auto dims = shapes(model.config);
  auto targets = model.params.tensors();
  const auto& tensors = j.at("tensors");
  for (std::size_t i = 0; i < ModelParams::kTensorCount; ++i) {
    const char* name = ModelParams::tensor_names()[i];
    if (!tensors.contains(name)) throw FormatError(std::string("model file lacks tensor ") + name);
    const auto& t = tensors.at(name);
    const auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
    if (shape.size() != 2 || shape[0] != dims[i].first || shape[1] != dims[i].second)
      throw FormatError(std::string("tensor ") + name + " has the wrong shape");
    const auto values = t.at("data").get<std::vector<double>>();
    if (values.size() != targets[i].size())
      throw FormatError(std::string("tensor ") + name + " has the wrong element count");
    std::copy(values.begin(), values.end(), targets[i].begin());
  }
  return model;
}

void save_model(const SavedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write model " + path.string());
  out << model_to_json(model).dump() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace convser
