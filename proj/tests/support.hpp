#pragma once

#include <filesystem>
#include <string>

#include "optmut/json_io.hpp"
#include "optmut/model_text.hpp"

namespace testing_support {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(OPTMUT_FIXTURES) / rel; }

inline optmut::LpModel load_model(const std::string& rel) {
  return optmut::parse_model_or_throw(optmut::read_text_file(fixture(rel)));
}

template <class F>
auto load_json(const std::string& rel, F reader) {
  return reader(optmut::parse_json(optmut::read_text_file(fixture(rel))));
}

inline const char* kFactory = R"(model factory
params
  assembly_cap = 8
  machine_cap = 10
  profit_housing = 120
  profit_bracket = 90
vars
  x, y
maximize profit_housing x + profit_bracket y
subject_to
  assembly: x + y <= assembly_cap
  machining: 2 x + y <= machine_cap
)";

// Fresh empty directory below the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("optmut_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
