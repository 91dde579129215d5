#pragma once

#include "../error.hpp"
#include "../types.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace chaoskit::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline Json matrix_to_json(const Matrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.data(), m.data() + m.size());
  return j;
}

inline Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw data_error("json: matrix size mismatch");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

inline Json vector_to_json(const Eigen::Ref<const RowVector>& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline RowVector row_from_json(const Json& j) {
  const auto data = j.get<std::vector<double>>();
  RowVector v(static_cast<Eigen::Index>(data.size()));
  std::copy(data.begin(), data.end(), v.data());
  return v;
}

/// Header fields shared by every persisted model.
inline Json model_header(const std::string& model_type) {
  return Json{{"schema_version", kSchemaVersion}, {"model_type", model_type}};
}

inline void check_header(const Json& j, const std::string& model_type) {
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kSchemaVersion)
    throw data_error("json: unsupported schema_version for " + model_type);
  if (j.value("model_type", std::string{}) != model_type)
    throw data_error("json: expected model_type '" + model_type + "', got '" +
                     j.value("model_type", std::string{}) + "'");
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw io_error(path.string() + ": write failed");
}

inline Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path.string() + ": cannot open for reading");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw data_error(path.string() + ": invalid JSON: " + e.what());
  }
}

}  // namespace chaoskit::io
