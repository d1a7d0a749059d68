#include <algorithm>
#include <cmath>

#include "ctgaze/kernels.hpp"

namespace ctgaze::kernels::parallel {

namespace {

std::size_t block_count(std::size_t n) { return (n + kReductionBlock - 1) / kReductionBlock; }

// Computes one partial per fixed-size block in parallel, then folds the
// partials left to right on the calling thread.
template <typename R, typename BlockFn, typename Fold>
R block_reduce(std::size_t n, R init, BlockFn block_fn, Fold fold) {
  const std::size_t nb = block_count(n);
  std::vector<R> partial(nb, init);
  const auto nb_signed = static_cast<long long>(nb);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nb_signed; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    partial[static_cast<std::size_t>(b)] = block_fn(lo, hi);
  }
  R acc = init;
  for (std::size_t b = 0; b < nb; ++b) acc = fold(acc, partial[b]);
  return acc;
}

double plus(double a, double b) { return a + b; }

}  // namespace

template <typename T>
Summary summarize(std::span<const T> v) {
  if (v.empty()) return {};
  const double first = static_cast<double>(v[0]);
  Summary init{0, 0.0, first, first};
  Summary s = block_reduce(
      v.size(), init,
      [&](std::size_t lo, std::size_t hi) {
        Summary p{hi - lo, 0.0, first, first};
        for (std::size_t i = lo; i < hi; ++i) {
          const double d = static_cast<double>(v[i]);
          p.sum += d;
          p.min = std::min(p.min, d);
          p.max = std::max(p.max, d);
        }
        return p;
      },
      [](Summary a, const Summary& b) {
        a.count += b.count;
        a.sum += b.sum;
        a.min = std::min(a.min, b.min);
        a.max = std::max(a.max, b.max);
        return a;
      });
  return s;
}

template <typename T>
double centered_sq(std::span<const T> v, double mean) {
  return block_reduce(
      v.size(), 0.0,
      [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
          const double d = static_cast<double>(v[i]) - mean;
          acc += d * d;
        }
        return acc;
      },
      plus);
}

template <typename A, typename B>
double centered_cross(std::span<const A> a, double mean_a, std::span<const B> b,
                      double mean_b) {
  return block_reduce(
      a.size(), 0.0,
      [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
          acc += (static_cast<double>(a[i]) - mean_a) * (static_cast<double>(b[i]) - mean_b);
        }
        return acc;
      },
      plus);
}

template <typename M>
MaskedSum masked_sum(std::span<const float> v, std::span<const M> mask) {
  return block_reduce(
      v.size(), MaskedSum{},
      [&](std::size_t lo, std::size_t hi) {
        MaskedSum r;
        for (std::size_t i = lo; i < hi; ++i) {
          if (mask[i] != M{}) {
            r.sum += v[i];
            ++r.count;
          }
        }
        return r;
      },
      [](MaskedSum a, const MaskedSum& b) {
        a.sum += b.sum;
        a.count += b.count;
        return a;
      });
}

template <typename G>
double kl_terms(std::span<const float> s, double s_total, std::span<const G> g,
                double g_total, double eps) {
  return block_reduce(
      s.size(), 0.0,
      [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
          if (g[i] == G{}) continue;
          const double gn = static_cast<double>(g[i]) / g_total;
          const double sn = static_cast<double>(s[i]) / s_total;
          acc += gn * std::log(eps + gn / (sn + eps));
        }
        return acc;
      },
      plus);
}

void divide(std::span<float> v, float divisor) {
  const auto n = static_cast<long long>(v.size());
  float* p = v.data();
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) p[i] /= divisor;
}

// Slices are owned by one thread each; within a voxel, blobs are added in
// input order, which reproduces the serial rounding exactly.
void splat(std::span<const Blob> blobs, ScalarVolume& out) {
  const int depth = out.dims().depth;
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < depth; ++k) {
    for (const Blob& b : blobs) {
      const int kk = k - b.z0;
      if (kk < 0 || kk >= static_cast<int>(b.wz.size())) continue;
      for (std::size_t jj = 0; jj < b.wy.size(); ++jj) {
        const int j = b.y0 + static_cast<int>(jj);
        const float wzy = b.wz[static_cast<std::size_t>(kk)] * b.wy[jj];
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

}  // namespace ctgaze::kernels::parallel
