#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace tempo::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(TEMPO_FIXTURE_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json load_json(const std::string& name) {
  return nlohmann::json::parse(read_file(fixture(name)));
}

inline double relative_error(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

}  // namespace tempo::testing
