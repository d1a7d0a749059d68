#pragma once

// Random inputs shared by the unit, property and acceptance tests.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ctgaze/core.hpp"

namespace ctgaze::testing {

/// Uniform random scanpath with integer millisecond durations in [50, 800].
inline Scanpath random_scanpath(std::mt19937_64& rng, std::size_t n, const std::string& id = "sp") {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> dur(50, 800);
  std::vector<Fixation> fx(n);
  for (auto& f : fx) f = {u(rng), u(rng), u(rng), static_cast<double>(dur(rng))};
  return Scanpath(id, std::move(fx));
}

/// Dense random walk with small steps, the regime simplification targets.
inline Scanpath random_walk(std::mt19937_64& rng, std::size_t n, double step,
                            const std::string& id = "walk") {
  std::normal_distribution<double> nrm(0.0, step);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  std::uniform_int_distribution<int> dur(20, 400);
  std::vector<Fixation> fx(n);
  Fixation cur{u(rng), u(rng), u(rng), 0.0};
  for (auto& f : fx) {
    cur.x = std::clamp(cur.x + nrm(rng), 0.0, 1.0);
    cur.y = std::clamp(cur.y + nrm(rng), 0.0, 1.0);
    cur.z = std::clamp(cur.z + nrm(rng), 0.0, 1.0);
    cur.t = static_cast<double>(dur(rng));
    f = cur;
  }
  return Scanpath(id, std::move(fx));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "ctgaze") {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace ctgaze::testing
