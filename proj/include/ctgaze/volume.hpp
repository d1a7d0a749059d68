#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctgaze/core.hpp"

namespace ctgaze {

struct Dims {
  int width = 1;
  int height = 1;
  int depth = 1;

  std::size_t count() const noexcept {
    return static_cast<std::size_t>(width) * height * depth;
  }
  bool operator==(const Dims&) const = default;
};

Dims dims_of(const VolumeGeometry& g);

/// Dense x-fastest grid: element (i, j, k) lives at i + W*(j + H*k).
template <typename T>
class Grid3 {
 public:
  using value_type = T;

  explicit Grid3(Dims dims, T fill = T{});
  Grid3(Dims dims, std::vector<T> data);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::size_t index(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims_.width) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_.height) * k);
  }
  T& at(int i, int j, int k) { return data_[index(i, j, k)]; }
  const T& at(int i, int j, int k) const { return data_[index(i, j, k)]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool operator==(const Grid3&) const = default;

 private:
  Dims dims_;
  std::vector<T> data_;
};

/// Real-valued saliency volume (32-bit storage, double accumulation).
using ScalarVolume = Grid3<float>;
/// Binary ground-truth fixation map; entries are 0 or 1.
using FixationVolume = Grid3<std::uint8_t>;

extern template class Grid3<float>;
extern template class Grid3<std::uint8_t>;

}  // namespace ctgaze
