#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "genresrc/audio_io.hpp"
#include "genresrc/dsp_core.hpp"
#include "genresrc/feature_pipeline.hpp"
#include "genresrc/sparse_solver.hpp"

using namespace genresrc;

static void BM_ComplexFft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<std::complex<double>> input(n);
  for (auto& v : input) v = {g(rng), g(rng)};
  std::vector<std::complex<double>> data(n);
  for (auto _ : state) {
    data = input;
    fft_inplace(data);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ComplexFft)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oNLogN);

static void BM_DftMagnitude(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<double> frame(n);
  for (auto& v : frame) v = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(dft_magnitude(frame, n));
}
BENCHMARK(BM_DftMagnitude)->Arg(1024)->Arg(4096);

static void BM_Omp(benchmark::State& state) {
  const auto n = state.range(0);
  const auto k = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(64, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < 64; ++i) a(i, j) = g(rng);
    a.col(j).normalize();
  }
  Eigen::VectorXd y(64);
  for (Eigen::Index i = 0; i < 64; ++i) y(i) = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(omp(a, y, k, 0.0));
}
BENCHMARK(BM_Omp)->Args({256, 5})->Args({256, 10})->Args({1000, 10})->Unit(benchmark::kMicrosecond);

static void BM_ExtractFeatures(benchmark::State& state) {
  const auto clip = synth_clip(AmTone{440.0, 4.0, 0.8}, static_cast<double>(state.range(0)), 22050, 1);
  const FeatureConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(clip, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(clip.samples.size()));
}
BENCHMARK(BM_ExtractFeatures)->Arg(5)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
