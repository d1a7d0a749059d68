#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ctgaze/error.hpp"
#include "ctgaze/saliency.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

using namespace ctgaze;

namespace {

ScalarVolume line(std::vector<float> v) {
  const int n = static_cast<int>(v.size());
  return ScalarVolume(Dims{n, 1, 1}, std::move(v));
}

FixationVolume mask(std::vector<std::uint8_t> v) {
  const int n = static_cast<int>(v.size());
  return FixationVolume(Dims{n, 1, 1}, std::move(v));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

std::size_t argmax(const ScalarVolume& v) {
  const auto vals = v.values();
  return static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
}

ScalarVolume random_volume(std::mt19937_64& rng, Dims d) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(d.count());
  for (auto& x : v) x = u(rng);
  return ScalarVolume(d, std::move(v));
}

}  // namespace

TEST_CASE("fixation_volume") {
  const VolumeGeometry g(2, 2, 2, 1);
  SUBCASE("single fixation at the origin") {
    const auto f = fixation_volume(Scanpath("a", {{0, 0, 0, 1}}), g);
    CHECK(f.at(0, 0, 0) == 1);
    CHECK(std::count(f.values().begin(), f.values().end(), 1) == 1);
  }
  SUBCASE("duplicates collapse") {
    const auto f = fixation_volume(Scanpath("a", {{0.1, 0.1, 0.1, 1}, {0, 0, 0, 5}}), g);
    CHECK(std::count(f.values().begin(), f.values().end(), 1) == 1);
  }
  SUBCASE("opposite corners") {
    const auto f = fixation_volume(Scanpath("a", {{0, 0, 0, 1}, {1, 1, 1, 1}}), g);
    CHECK(f.at(0, 0, 0) == 1);
    CHECK(f.at(1, 1, 1) == 1);
    CHECK(std::count(f.values().begin(), f.values().end(), 1) == 2);
  }
}

TEST_CASE("render_saliency") {
  const VolumeGeometry g(40, 30, 12, 2.0);
  const Scanpath one("a", {{0.3, 0.6, 0.4, 100}});

  SUBCASE("single fixation peaks at its voxel") {
    const auto v = render_saliency(one, g, 1.0, 1.0);
    const auto p = to_voxel(one[0], g);
    const auto expected = v.index(static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y)),
                                  static_cast<int>(std::lround(p.z)));
    CHECK(argmax(v) == expected);
    CHECK(render_saliency(one, g, 2.0, 2.0).values()[expected] == 1.0f);
    CHECK(argmax(render_saliency(one, g, 2.0, 1.0)) == expected);
  }
  SUBCASE("a repeated fixation renders like a single one") {
    const Scanpath twice("b", {one[0], one[0]});
    const auto a = render_saliency(one, g);
    const auto b = render_saliency(twice, g);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.values()[i] - b.values()[i]) <= 1e-9);
  }
  SUBCASE("matches an untruncated direct evaluation") {
    std::mt19937_64 rng(3);
    const auto sp = testing::random_scanpath(rng, 6);
    const double sxy = 1.5 * g.pixels_per_degree(), sz = 0.8;
    const auto v = render_saliency(sp, g, 1.5, sz);
    std::vector<double> direct(v.size(), 0.0);
    double peak = 0.0;
    for (int k = 0; k < 12; ++k)
      for (int j = 0; j < 30; ++j)
        for (int i = 0; i < 40; ++i) {
          double acc = 0.0;
          for (const auto& f : sp.fixations()) {
            const auto p = to_voxel(f, g);
            acc += std::exp(-((i - p.x) * (i - p.x) + (j - p.y) * (j - p.y)) / (2 * sxy * sxy) -
                            (k - p.z) * (k - p.z) / (2 * sz * sz));
          }
          direct[v.index(i, j, k)] = acc;
          peak = std::max(peak, acc);
        }
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      worst = std::max(worst, std::abs(v.values()[i] - direct[i] / peak));
    }
    CHECK(worst < 3.4e-4);
  }
  SUBCASE("values stay in [0, 1] and ignore durations") {
    std::mt19937_64 rng(4);
    const auto sp = testing::random_scanpath(rng, 25);
    std::vector<Fixation> scaled = sp.fixations();
    for (auto& f : scaled) f.t *= 7.0;
    const auto a = render_saliency(sp, g);
    const auto b = render_saliency(Scanpath("s", scaled), g);
    CHECK(a == b);
    for (float x : a.values()) {
      CHECK(x >= 0.0f);
      CHECK(x <= 1.0f);
    }
  }
  SUBCASE("zero depth sigma keeps mass in the fixation slice") {
    const auto v = render_saliency(one, g, 1.0, 0.0);
    const int slice = static_cast<int>(std::lround(to_voxel(one[0], g).z));
    for (int k = 0; k < 12; ++k) {
      double sum = 0;
      for (int j = 0; j < 30; ++j)
        for (int i = 0; i < 40; ++i) sum += v.at(i, j, k);
      if (k == slice) {
        CHECK(sum > 0);
      } else {
        CHECK(sum == 0);
      }
    }
  }
  SUBCASE("nonpositive sigma is rejected") {
    CHECK(code_of([&] { render_saliency(one, g, 0.0, 1.0); }) == ErrorCode::InvalidSigma);
    CHECK(code_of([&] { render_saliency(one, g, 1.0, -1.0); }) == ErrorCode::InvalidSigma);
  }
}

TEST_CASE("cc") {
  SUBCASE("hand-evaluated two-voxel case") {
    CHECK(cc(line({1, 3}), mask({0, 1})) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("self and negated correlation") {
    std::mt19937_64 rng(1);
    const auto s = random_volume(rng, {9, 7, 5});
    CHECK(std::abs(cc(s, s) - 1.0) <= 1e-9);
    std::vector<float> neg(s.values().begin(), s.values().end());
    const float mx = *std::max_element(neg.begin(), neg.end());
    for (auto& x : neg) x = mx - x;
    CHECK(std::abs(cc(s, ScalarVolume(s.dims(), neg)) + 1.0) <= 1e-6);
  }
  SUBCASE("symmetric, affine invariant, agrees with the literal formula") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 10; ++rep) {
      const auto a = random_volume(rng, {8, 6, 4});
      const auto b = random_volume(rng, {8, 6, 4});
      const double ab = cc(a, b);
      CHECK(ab == doctest::Approx(cc(b, a)).epsilon(1e-12));
      std::vector<float> scaled(a.values().begin(), a.values().end());
      for (auto& x : scaled) x = 3.0f * x + 2.0f;
      CHECK(cc(ScalarVolume(a.dims(), scaled), b) == doctest::Approx(ab).epsilon(1e-5));
      const std::vector<float> av(a.values().begin(), a.values().end());
      const std::vector<float> bv(b.values().begin(), b.values().end());
      CHECK(std::abs(ab - static_cast<double>(oracle::cc(av, bv))) < 1e-12);
    }
  }
  SUBCASE("errors") {
    CHECK(code_of([] { cc(line({2, 2}), line({0, 1})); }) == ErrorCode::ZeroVariance);
    CHECK(code_of([] { cc(line({0, 1}), mask({1, 1})); }) == ErrorCode::ZeroVariance);
    CHECK(code_of([] { cc(line({0, 1}), line({0, 1, 2})); }) == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("nss") {
  CHECK(nss(line({0.4f, 0.4f, 0.4f}), mask({0, 1, 0}), 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(nss(line({0, 1}), mask({0, 1}), 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(nss(line({0, 1}), mask({1, 0}), 1) == doctest::Approx(-1.0).epsilon(1e-15));
  // all-zero saliency takes both identity branches
  CHECK(nss(line({0, 0, 0}), mask({0, 1, 0}), 1) == 0.0);

  SUBCASE("duplicate fixations count in the divisor only") {
    CHECK(nss(line({0, 1}), mask({0, 1}), 2) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("agrees with the literal formula") {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution hit(0.1);
    for (int rep = 0; rep < 10; ++rep) {
      const auto s = random_volume(rng, {10, 8, 3});
      std::vector<std::uint8_t> g(s.size());
      for (auto& x : g) x = hit(rng) ? 1 : 0;
      g[rep] = 1;
      const std::vector<float> sv(s.values().begin(), s.values().end());
      const double expected = static_cast<double>(oracle::nss(sv, g, 17));
      CHECK(std::abs(nss(s, FixationVolume(s.dims(), g), 17) - expected) < 1e-10);
    }
  }
  CHECK(code_of([] { nss(line({0, 1}), mask({0, 0}), 1); }) == ErrorCode::NoFixations);
}

TEST_CASE("kldiv") {
  SUBCASE("uniform saliency against one fixation is ln 2") {
    CHECK(std::abs(kldiv(line({1, 1}), mask({0, 1})) - std::numbers::ln2) <= 1e-9);
  }
  SUBCASE("fixation map against its own normalized copy") {
    std::mt19937_64 rng(6);
    std::bernoulli_distribution hit(0.05);
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<std::uint8_t> g(500);
      for (auto& x : g) x = hit(rng) ? 1 : 0;
      g[rep] = 1;
      const double ones = static_cast<double>(std::count(g.begin(), g.end(), 1));
      std::vector<float> s(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) s[i] = static_cast<float>(g[i] / ones);
      CHECK(kldiv(ScalarVolume({500, 1, 1}, s), FixationVolume({500, 1, 1}, g)) <= 1e-6);
    }
  }
  SUBCASE("saliency entirely off the fixation stays finite") {
    const double v = kldiv(line({1, 0}), mask({0, 1}));
    CHECK(std::isfinite(v));
    CHECK(v == doctest::Approx(std::log(kKlEpsilon + 1.0 / kKlEpsilon)).epsilon(1e-12));
  }
  SUBCASE("epsilon is the stated constant") { CHECK(kKlEpsilon == 2.2204e-16); }
  SUBCASE("real-valued reference agrees with the literal sum") {
    std::mt19937_64 rng(8);
    const auto s = random_volume(rng, {6, 5, 4});
    const auto r = random_volume(rng, {6, 5, 4});
    const std::vector<float> sv(s.values().begin(), s.values().end());
    const std::vector<float> rv(r.values().begin(), r.values().end());
    CHECK(std::abs(kldiv(s, r) - static_cast<double>(oracle::kldiv(sv, rv, kKlEpsilon))) < 1e-12);
  }
  CHECK(code_of([] { kldiv(line({0, 0}), mask({0, 1})); }) == ErrorCode::EmptyDistribution);
  CHECK(code_of([] { kldiv(line({1, 0}), mask({0, 0})); }) == ErrorCode::EmptyDistribution);
}
