#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include <unistd.h>

// Per-process unique scratch directories, so concurrently running test
// binaries never share files.
inline std::filesystem::path fresh_temp_dir(const std::string& tag) {
  static const long long stamp =
      std::chrono::steady_clock::now().time_since_epoch().count();
  static int counter = 0;
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() /
      ("nirmal-" + tag + "-" + std::to_string(getpid()) + "-" + std::to_string(stamp) + "-" +
       std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}
