#include <omp.h>

#include <cmath>
#include <random>

#include "ctgaze/kernels.hpp"
#include "ctgaze/saliency.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ctgaze;
namespace k = ctgaze::kernels;

namespace {

std::vector<float> random_values(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("parallel reductions agree with the serial reference") {
  std::mt19937_64 rng(11);
  // spans several reduction blocks plus a ragged tail
  const std::size_t n = 3 * k::kReductionBlock + 1234;
  const auto a = random_values(rng, n);
  const auto b = random_values(rng, n);
  std::vector<std::uint8_t> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = (i % 97 == 0) ? 1 : 0;
  const std::span<const float> as(a), bs(b);
  const std::span<const std::uint8_t> ms(m);

  const auto ss = k::serial::summarize(as), ps = k::parallel::summarize(as);
  CHECK(ss.count == ps.count);
  CHECK(close(ss.sum, ps.sum));
  CHECK(ss.min == ps.min);
  CHECK(ss.max == ps.max);
  const double mean = ss.sum / n;
  CHECK(close(k::serial::centered_sq(as, mean), k::parallel::centered_sq(as, mean)));
  CHECK(close(k::serial::centered_cross(as, 0.5, bs, 0.4), k::parallel::centered_cross(as, 0.5, bs, 0.4)));
  CHECK(close(k::serial::centered_cross(as, 0.5, ms, 0.1), k::parallel::centered_cross(as, 0.5, ms, 0.1)));
  const auto sm = k::serial::masked_sum(as, ms), pm = k::parallel::masked_sum(as, ms);
  CHECK(sm.count == pm.count);
  CHECK(close(sm.sum, pm.sum));
  CHECK(close(k::serial::kl_terms(as, ss.sum, ms, double(sm.count), 2.2204e-16),
              k::parallel::kl_terms(as, ss.sum, ms, double(sm.count), 2.2204e-16)));
}

TEST_CASE("parallel results do not depend on the thread count") {
  std::mt19937_64 rng(12);
  const auto a = random_values(rng, 5 * k::kReductionBlock + 7);
  const std::span<const float> as(a);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = k::parallel::centered_sq(as, 0.5);
  omp_set_num_threads(4);
  const double four = k::parallel::centered_sq(as, 0.5);
  omp_set_num_threads(saved);
  CHECK(one == four);
}

TEST_CASE("parallel rendering is bit-identical to the serial reference") {
  std::mt19937_64 rng(13);
  const VolumeGeometry g(64, 48, 20, 3.0);
  const auto sp = testing::random_scanpath(rng, 40);
  for (double sz : {0.0, 1.0, 2.5}) {
    const auto s = render_saliency(sp, g, 1.0, sz, Exec::serial);
    const auto p = render_saliency(sp, g, 1.0, sz, Exec::parallel);
    CHECK(s == p);
  }
}

TEST_CASE("metrics agree across execution policies") {
  std::mt19937_64 rng(14);
  const VolumeGeometry g(48, 40, 16, 2.0);
  const auto gt = testing::random_scanpath(rng, 30);
  const auto pred = testing::random_scanpath(rng, 30);
  const auto s = render_saliency(pred, g);
  const auto f = fixation_volume(gt, g);
  CHECK(close(cc(s, f, Exec::serial), cc(s, f, Exec::parallel)));
  CHECK(close(nss(s, f, gt.size(), Exec::serial), nss(s, f, gt.size(), Exec::parallel)));
  CHECK(close(kldiv(s, f, Exec::serial), kldiv(s, f, Exec::parallel)));
}

TEST_CASE("make_blob clips to the volume and keeps the nearest voxel") {
  const Dims d{10, 10, 10};
  const auto b = k::make_blob({0.2, 9.0, 4.6}, d, 0.01, 2.0, 0.0);
  CHECK(b.x0 == 0);
  CHECK(b.wx.size() == 1);
  CHECK(b.wz.size() == 1);
  CHECK(b.z0 == 5);
  CHECK(b.y0 + static_cast<int>(b.wy.size()) - 1 == 9);
}
