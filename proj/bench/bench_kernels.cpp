// Copyright 2026 The ugcrank Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference kernels against their OpenMP counterparts on a 224x224
// image. Run with UGCRANK_THREADS (or --threads via the CLI) unset to use
// every core.

#include <benchmark/benchmark.h>

#include "ugcrank/kernels.hpp"
#include "ugcrank/parallel.hpp"
#include "ugcrank/rng.hpp"

namespace {

using ugcrank::RgbImage;
namespace ser = ugcrank::kernels::serial;
namespace par = ugcrank::kernels::parallel;

const RgbImage& input() {
  static const RgbImage img = [] {
    RgbImage im(224, 224);
    ugcrank::CounterRng rng(1);
    for (float& v : im.data()) v = static_cast<float>(rng.uniform01());
    return im;
  }();
  return img;
}

void set_threads_from(const benchmark::State& state) {
  ugcrank::set_threads(static_cast<int>(state.range(0)));
}

using Kernel = RgbImage (*)(const RgbImage&, double);

void unary(benchmark::State& state, Kernel fn, double arg) {
  set_threads_from(state);
  for (auto _ : state) benchmark::DoNotOptimize(fn(input(), arg));
  state.SetItemsProcessed(state.iterations() * input().pixel_count());
}

void noise(benchmark::State& state, bool parallel) {
  set_threads_from(state);
  std::uint64_t key = 0;
  for (auto _ : state) {
    auto out = parallel ? par::add_gaussian_noise(input(), 0.5, ++key) : ser::add_gaussian_noise(input(), 0.5, ++key);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * input().pixel_count());
}

void resize(benchmark::State& state, bool parallel) {
  set_threads_from(state);
  for (auto _ : state) {
    auto out = parallel ? par::resize_bilinear(input(), 448, 336) : ser::resize_bilinear(input(), 448, 336);
    benchmark::DoNotOptimize(out);
  }
}

void threads(benchmark::internal::Benchmark* b) {
  b->Arg(1);
  const int n = ugcrank::resolve_threads(std::nullopt);
  if (n > 1) b->Arg(n);
  b->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK_CAPTURE(unary, blur_serial, ser::gaussian_blur, 1.2)->Apply(threads);
BENCHMARK_CAPTURE(unary, blur_parallel, par::gaussian_blur, 1.2)->Apply(threads);
BENCHMARK_CAPTURE(unary, rotate_serial, ser::rotate_bilinear, 15.0)->Apply(threads);
BENCHMARK_CAPTURE(unary, rotate_parallel, par::rotate_bilinear, 15.0)->Apply(threads);
BENCHMARK_CAPTURE(unary, hue_serial, ser::hue_shift, 0.2)->Apply(threads);
BENCHMARK_CAPTURE(unary, hue_parallel, par::hue_shift, 0.2)->Apply(threads);
BENCHMARK_CAPTURE(noise, noise_serial, false)->Apply(threads);
BENCHMARK_CAPTURE(noise, noise_parallel, true)->Apply(threads);
BENCHMARK_CAPTURE(resize, resize_serial, false)->Apply(threads);
BENCHMARK_CAPTURE(resize, resize_parallel, true)->Apply(threads);

BENCHMARK_MAIN();
