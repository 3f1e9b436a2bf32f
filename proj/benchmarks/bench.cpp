#include <benchmark/benchmark.h>

#include "texfuse/fbm.hpp"
#include "texfuse/features.hpp"
#include "texfuse/pc.hpp"
#include "texfuse/rng.hpp"
#include "texfuse/rtv.hpp"
#include "texfuse/wavelet.hpp"

namespace {

using namespace texfuse;

GrayField noise_field(int n, std::uint64_t seed) {
  GrayField f(n, n);
  Rng rng(seed);
  for (double& v : f.data) v = 0.5 + 0.1 * rng.gaussian();
  return f;
}

void BM_FbmExactFactor64(benchmark::State& state) {
  const FbmParams params = make_fbm_params(0.5, 1.0);
  for (auto _ : state) {
    FbmExactSampler2D sampler(params, 64);
    benchmark::DoNotOptimize(sampler);
  }
}
BENCHMARK(BM_FbmExactFactor64)->Unit(benchmark::kMillisecond);

void BM_FbmExactSample64(benchmark::State& state) {
  const FbmExactSampler2D sampler(make_fbm_params(0.5, 1.0), 64);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.sample(seed++));
  }
}
BENCHMARK(BM_FbmExactSample64)->Unit(benchmark::kMillisecond);

void BM_FbmSpectral(benchmark::State& state) {
  const FbmParams params = make_fbm_params(0.5, 1.0);
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synth_fbm_spectral(params, n, seed++));
  }
}
BENCHMARK(BM_FbmSpectral)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_EstimateHurst64(benchmark::State& state) {
  const GrayField f = synth_fbm_spectral(make_fbm_params(0.7, 1.0), 64, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_hurst(f, 8));
  }
}
BENCHMARK(BM_EstimateHurst64);

void BM_RtvDecompose(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GrayField f = noise_field(n, 11);
  const RtvConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rtv_decompose(f, config));
  }
}
BENCHMARK(BM_RtvDecompose)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_PhaseCongruency(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GrayField f = noise_field(n, 13);
  const PcConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(phase_congruency(f, config));
  }
}
BENCHMARK(BM_PhaseCongruency)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_HaarPyramid256(benchmark::State& state) {
  const GrayField f = noise_field(256, 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(haar_pyramid(f, 4, HaarNorm::analysis2j));
  }
}
BENCHMARK(BM_HaarPyramid256);

void BM_TexturalFeatures(benchmark::State& state) {
  const GrayField f = synth_fbm_spectral(make_fbm_params(0.4, 1.0), 128, 19);
  for (auto _ : state) {
    benchmark::DoNotOptimize(textural_features(f, 32, 8));
  }
}
BENCHMARK(BM_TexturalFeatures)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
