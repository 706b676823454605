#pragma once

#include <filesystem>
#include <string>
#include <unistd.h>

#include "emtrack/random.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("emtrack_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

// True when both directory trees hold the same relative paths with
// byte-identical contents.
bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b);

// Writes `n` small labelled PPM images (img100.ppm, ...) into `dir`, plus a
// stray notes.md and an unlabelled orphan.ppm that scans must skip.
void make_pool(const std::filesystem::path& dir, int n);

}  // namespace testing
