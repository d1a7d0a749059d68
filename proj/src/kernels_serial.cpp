#include <algorithm>
#include <cmath>

#include "ctgaze/kernels.hpp"

namespace ctgaze::kernels {

Blob make_blob(const VoxelPoint& c, const Dims& dims, double sigma_x, double sigma_y,
               double sigma_z) {
  auto axis = [](double center, int extent, double sigma, int& start, std::vector<float>& w) {
    const int nearest = std::clamp(static_cast<int>(std::lround(center)), 0, extent - 1);
    if (sigma <= 0.0) {
      start = nearest;
      w.assign(1, 1.0f);
      return;
    }
    const double reach = 4.0 * sigma;
    int lo = static_cast<int>(std::ceil(center - reach));
    int hi = static_cast<int>(std::floor(center + reach));
    lo = std::max(std::min(lo, nearest), 0);
    hi = std::min(std::max(hi, nearest), extent - 1);
    start = lo;
    w.resize(static_cast<std::size_t>(hi - lo + 1));
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int i = lo; i <= hi; ++i) {
      const double d = i - center;
      w[static_cast<std::size_t>(i - lo)] = static_cast<float>(std::exp(-d * d * inv));
    }
  };
  Blob b;
  axis(c.x, dims.width, sigma_x, b.x0, b.wx);
  axis(c.y, dims.height, sigma_y, b.y0, b.wy);
  axis(c.z, dims.depth, sigma_z, b.z0, b.wz);
  return b;
}

namespace serial {

template <typename T>
Summary summarize(std::span<const T> v) {
  Summary s;
  s.count = v.size();
  if (v.empty()) return s;
  s.min = s.max = static_cast<double>(v[0]);
  for (const T x : v) {
    const double d = static_cast<double>(x);
    s.sum += d;
    s.min = std::min(s.min, d);
    s.max = std::max(s.max, d);
  }
  return s;
}

template <typename T>
double centered_sq(std::span<const T> v, double mean) {
  double acc = 0.0;
  for (const T x : v) {
    const double d = static_cast<double>(x) - mean;
    acc += d * d;
  }
  return acc;
}

template <typename A, typename B>
double centered_cross(std::span<const A> a, double mean_a, std::span<const B> b,
                      double mean_b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += (static_cast<double>(a[i]) - mean_a) * (static_cast<double>(b[i]) - mean_b);
  }
  return acc;
}

template <typename M>
MaskedSum masked_sum(std::span<const float> v, std::span<const M> mask) {
  MaskedSum r;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask[i] != M{}) {
      r.sum += v[i];
      ++r.count;
    }
  }
  return r;
}

template <typename G>
double kl_terms(std::span<const float> s, double s_total, std::span<const G> g,
                double g_total, double eps) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (g[i] == G{}) continue;
    const double gn = static_cast<double>(g[i]) / g_total;
    const double sn = static_cast<double>(s[i]) / s_total;
    acc += gn * std::log(eps + gn / (sn + eps));
  }
  return acc;
}

void divide(std::span<float> v, float divisor) {
  for (float& x : v) x /= divisor;
}

void splat(std::span<const Blob> blobs, ScalarVolume& out) {
  for (const Blob& b : blobs) {
    for (std::size_t kk = 0; kk < b.wz.size(); ++kk) {
      const int k = b.z0 + static_cast<int>(kk);
      for (std::size_t jj = 0; jj < b.wy.size(); ++jj) {
        const int j = b.y0 + static_cast<int>(jj);
        const float wzy = b.wz[kk] * b.wy[jj];
        float* row = &out.at(b.x0, j, k);
        for (std::size_t ii = 0; ii < b.wx.size(); ++ii) row[ii] += wzy * b.wx[ii];
      }
    }
  }
}

template Summary summarize<float>(std::span<const float>);
template Summary summarize<std::uint8_t>(std::span<const std::uint8_t>);
template double centered_sq<float>(std::span<const float>, double);
template double centered_sq<std::uint8_t>(std::span<const std::uint8_t>, double);
template double centered_cross<float, float>(std::span<const float>, double,
                                             std::span<const float>, double);
template double centered_cross<float, std::uint8_t>(std::span<const float>, double,
                                                    std::span<const std::uint8_t>, double);
template MaskedSum masked_sum<float>(std::span<const float>, std::span<const float>);
template MaskedSum masked_sum<std::uint8_t>(std::span<const float>,
                                            std::span<const std::uint8_t>);
template double kl_terms<float>(std::span<const float>, double, std::span<const float>,
                                double, double);
template double kl_terms<std::uint8_t>(std::span<const float>, double,
                                       std::span<const std::uint8_t>, double, double);

}  // namespace serial
}  // namespace ctgaze::kernels
