#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

inline nlohmann::json load_golden(const std::string& name) {
  std::ifstream in(std::string(QDOPT_GOLDEN_DIR) + "/" + name);
  return nlohmann::json::parse(in);
}
