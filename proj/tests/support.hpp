#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "selffield/error.hpp"

namespace selffield::test {

inline double rel(double got, double want) { return std::abs(got / want - 1.0); }

inline double log_point(double lo, double hi, int i, int count) {
  return lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("selffield-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  throw std::runtime_error("expected a selffield::Error");
}

}  // namespace selffield::test
