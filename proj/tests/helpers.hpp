#pragma once

// Shared test scaffolding: temp directories and small field builders.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "texfuse/field.hpp"
#include "texfuse/rng.hpp"

namespace testutil {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    const auto base = std::filesystem::temp_directory_path();
    path_ = base / ("texfuse-" + tag + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline texfuse::GrayField gaussian_field(int w, int h, std::uint64_t seed,
                                         double mean = 0.0, double sigma = 1.0) {
  texfuse::GrayField f(w, h);
  texfuse::Rng rng(seed);
  for (double& v : f.data) v = mean + sigma * rng.gaussian();
  return f;
}

inline texfuse::GrayField uniform_field(int w, int h, std::uint64_t seed) {
  texfuse::GrayField f(w, h);
  texfuse::Rng rng(seed);
  for (double& v : f.data) v = rng.uniform();
  return f;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

inline double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

inline double var_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size());
}

}  // namespace testutil
