#pragma once

#include <filesystem>
#include <string>

namespace invivo::test {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(INVIVO_FIXTURE_DIR) / name;
}

inline std::filesystem::path golden(const std::string& name) {
  return std::filesystem::path(INVIVO_GOLDEN_DIR) / name;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("invivo_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace invivo::test
