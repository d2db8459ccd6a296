#pragma once

// Shared helpers for the test binaries.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace test_support {

// Fresh, empty directory under the build tree's scratch area.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(LANESCAN_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace test_support
