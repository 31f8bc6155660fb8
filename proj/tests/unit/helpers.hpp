#pragma once
#include <filesystem>
#include <fstream>
#include <string>

#include "sams/error.hpp"

namespace testing {

inline std::filesystem::path scratchDir() {
  auto dir = std::filesystem::temp_directory_path() / "sams-unit";
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string writeFile(const std::string& name, const std::string& content) {
  const auto path = scratchDir() / name;
  std::ofstream(path, std::ios::binary) << content;
  return path.string();
}

template <class F>
std::string errorKind(F&& f) {
  try {
    f();
  } catch (const sams::Error& e) {
    return e.kind();
  }
  return "";
}

}  // namespace testing
