// Serial reference kernels versus their OpenMP versions on a CT-sized
// volume (512 x 512 x 89). Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "ctgaze/kernels.hpp"
#include "ctgaze/saliency.hpp"

using namespace ctgaze;

namespace {

const VolumeGeometry kGeometry(512, 512, 89, 12.0);

const Scanpath& scanpath() {
  static const Scanpath sp = [] {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Fixation> fx(222);
    for (auto& f : fx) f = {u(rng), u(rng), u(rng), 200.0};
    return Scanpath("bench", fx);
  }();
  return sp;
}

const ScalarVolume& saliency() {
  static const ScalarVolume s = render_saliency(scanpath(), kGeometry);
  return s;
}

const FixationVolume& fixations() {
  static const FixationVolume f = fixation_volume(scanpath(), kGeometry);
  return f;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(kGeometry.voxel_count() * sizeof(float)));
}

void BM_Summarize(benchmark::State& state) {
  const auto v = std::span<const float>(saliency().values());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::summarize(v, exec_of(state)));
  label(state);
}

void BM_CentredCross(benchmark::State& state) {
  const auto s = std::span<const float>(saliency().values());
  const auto g = std::span<const std::uint8_t>(fixations().values());
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::centered_cross(s, 0.1, g, 0.001, exec_of(state)));
  }
  label(state);
}

void BM_Cc(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cc(saliency(), fixations(), exec_of(state)));
  label(state);
}

void BM_Nss(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(nss(saliency(), fixations(), scanpath().size(), exec_of(state)));
  }
  label(state);
}

void BM_Kldiv(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kldiv(saliency(), fixations(), exec_of(state)));
  label(state);
}

void BM_Render(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_saliency(scanpath(), kGeometry, kDefaultSigmaXyDeg,
                                             kDefaultSigmaZSlices, exec_of(state)));
  }
  label(state);
}

}  // namespace

BENCHMARK(BM_Summarize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CentredCross)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Cc)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Nss)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Kldiv)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Render)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
