#include <cmath>

#include <benchmark/benchmark.h>

#include "isb/autograd.hpp"
#include "isb/data_pipeline.hpp"
#include "isb/frame.hpp"
#include "isb/generator.hpp"
#include "isb/metrics.hpp"
#include "isb/optical_flow.hpp"
#include "isb/random.hpp"

namespace {

using namespace isb;
using nn::Shape;
using nn::Tensor;

Frame smooth_frame(int h, int w, double dx = 0.0) {
  Frame f(h, w);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double px = x + dx;
        f.at(y, x, c) = 0.5 + 0.2 * std::sin(0.31 * px + 0.7 * c) * std::cos(0.23 * y) + 0.1 * std::sin(0.9 * px + 0.4 * y);
      }
  return f;
}

Tensor random_tensor(Shape shape, std::uint64_t seed) {
  Tensor t(shape);
  Rng rng(seed);
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-1.0, 1.0);
  return t;
}

void BM_Conv2dForward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const int s = static_cast<int>(state.range(1));
  nn::NoGradGuard no_grad;
  const auto x = nn::constant(random_tensor({static_cast<std::size_t>(c), static_cast<std::size_t>(s), static_cast<std::size_t>(s)}, 1));
  const auto w = nn::constant(random_tensor({static_cast<std::size_t>(c), static_cast<std::size_t>(c), 3, 3}, 2));
  const auto b = nn::constant(random_tensor({static_cast<std::size_t>(c)}, 3));
  for (auto _ : state) benchmark::DoNotOptimize(nn::ops::conv2d(x, w, b, 1, 1));
  state.SetItemsProcessed(state.iterations() * c * c * 9 * s * s);
}
BENCHMARK(BM_Conv2dForward)->Args({4, 32})->Args({16, 32})->Args({64, 16});

void BM_Conv2dBackward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const int s = static_cast<int>(state.range(1));
  const auto x = nn::parameter(random_tensor({static_cast<std::size_t>(c), static_cast<std::size_t>(s), static_cast<std::size_t>(s)}, 1));
  const auto w = nn::parameter(random_tensor({static_cast<std::size_t>(c), static_cast<std::size_t>(c), 3, 3}, 2));
  const auto b = nn::parameter(random_tensor({static_cast<std::size_t>(c)}, 3));
  const Tensor ones(x.value().shape(), 1.0);
  for (auto _ : state) {
    const auto y = nn::ops::dot(nn::ops::conv2d(x, w, b, 1, 1), ones);
    nn::backward(y);
  }
}
BENCHMARK(BM_Conv2dBackward)->Args({4, 32})->Args({16, 32});

void BM_EstimateFlow(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const Frame a = smooth_frame(s, s);
  const Frame b = smooth_frame(s, s, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_flow(a, b));
}
BENCHMARK(BM_EstimateFlow)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const Frame a = smooth_frame(s, s);
  const Frame b = smooth_frame(s, s, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(128);

void BM_TinyGeneratorInfer(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GeneratorConfig config = GeneratorConfig::tiny();
  config.n_neighbors = n;
  const Generator g(config, 7);
  ClipWindow w;
  w.target_lr = smooth_frame(8, 8);
  for (int k = 0; k < n; ++k) {
    w.neighbors_lr.push_back(smooth_frame(8, 8, k + 1.0));
    w.flows.emplace_back(8, 8);
  }
  for (auto _ : state) benchmark::DoNotOptimize(g.infer(w));
}
BENCHMARK(BM_TinyGeneratorInfer)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
