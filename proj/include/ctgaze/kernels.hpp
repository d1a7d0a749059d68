#pragma once

// Voxel-loop kernels behind the saliency metrics and heatmap rendering.
//
// Each kernel exists twice: a plain sequential reference (`serial::`) and an
// OpenMP version (`parallel::`). Parallel reductions sum fixed-size blocks
// and then fold the block partials in order, so their results do not depend
// on the thread count. Rendering is bit-identical between the two.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctgaze/core.hpp"
#include "ctgaze/volume.hpp"

namespace ctgaze::kernels {

enum class Exec { serial, parallel };

inline constexpr std::size_t kReductionBlock = std::size_t{1} << 16;

struct Summary {
  std::size_t count = 0;
  double sum = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct MaskedSum {
  double sum = 0.0;        // sum of values where mask != 0
  std::size_t count = 0;   // number of mask != 0 entries
};

/// One anisotropic Gaussian blob, already expanded to 1D weight tables.
struct Blob {
  int x0 = 0, y0 = 0, z0 = 0;
  std::vector<float> wx, wy, wz;
};

/// Truncates at 4 sigma; sigma_z == 0 puts all depth mass on the nearest slice.
Blob make_blob(const VoxelPoint& center, const Dims& dims, double sigma_x, double sigma_y,
               double sigma_z);

namespace serial {

template <typename T>
Summary summarize(std::span<const T> v);
template <typename T>
double centered_sq(std::span<const T> v, double mean);
template <typename A, typename B>
double centered_cross(std::span<const A> a, double mean_a, std::span<const B> b,
                      double mean_b);
template <typename M>
MaskedSum masked_sum(std::span<const float> v, std::span<const M> mask);
/// sum over g > 0 of (g/g_total) * log(eps + (g/g_total) / (s/s_total + eps)).
template <typename G>
double kl_terms(std::span<const float> s, double s_total, std::span<const G> g,
                double g_total, double eps);
void divide(std::span<float> v, float divisor);
void splat(std::span<const Blob> blobs, ScalarVolume& out);

}  // namespace serial

namespace parallel {

template <typename T>
Summary summarize(std::span<const T> v);
template <typename T>
double centered_sq(std::span<const T> v, double mean);
template <typename A, typename B>
double centered_cross(std::span<const A> a, double mean_a, std::span<const B> b,
                      double mean_b);
template <typename M>
MaskedSum masked_sum(std::span<const float> v, std::span<const M> mask);
template <typename G>
double kl_terms(std::span<const float> s, double s_total, std::span<const G> g,
                double g_total, double eps);
void divide(std::span<float> v, float divisor);
void splat(std::span<const Blob> blobs, ScalarVolume& out);

}  // namespace parallel

// Dispatchers used by the metric layer.
template <typename T>
Summary summarize(std::span<const T> v, Exec e) {
  return e == Exec::serial ? serial::summarize(v) : parallel::summarize(v);
}
template <typename T>
double centered_sq(std::span<const T> v, double mean, Exec e) {
  return e == Exec::serial ? serial::centered_sq(v, mean) : parallel::centered_sq(v, mean);
}
template <typename A, typename B>
double centered_cross(std::span<const A> a, double ma, std::span<const B> b, double mb,
                      Exec e) {
  return e == Exec::serial ? serial::centered_cross(a, ma, b, mb)
                           : parallel::centered_cross(a, ma, b, mb);
}
template <typename M>
MaskedSum masked_sum(std::span<const float> v, std::span<const M> mask, Exec e) {
  return e == Exec::serial ? serial::masked_sum(v, mask) : parallel::masked_sum(v, mask);
}
template <typename G>
double kl_terms(std::span<const float> s, double st, std::span<const G> g, double gt,
                double eps, Exec e) {
  return e == Exec::serial ? serial::kl_terms(s, st, g, gt, eps)
                           : parallel::kl_terms(s, st, g, gt, eps);
}
inline void divide(std::span<float> v, float divisor, Exec e) {
  e == Exec::serial ? serial::divide(v, divisor) : parallel::divide(v, divisor);
}
inline void splat(std::span<const Blob> blobs, ScalarVolume& out, Exec e) {
  e == Exec::serial ? serial::splat(blobs, out) : parallel::splat(blobs, out);
}

}  // namespace ctgaze::kernels
