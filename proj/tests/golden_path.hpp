#pragma once

#include <string>

#include "perronlab/io.hpp"

inline std::string golden_path(const std::string& name) { return std::string(PERRONLAB_GOLDEN_DIR) + "/" + name; }

inline const perronlab::json& oracle() {
  static const perronlab::json j = perronlab::json::parse(perronlab::read_file(golden_path("oracle_values.json")));
  return j;
}
