/**
 * Copyright 2026 The radkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// Serial reference kernels vs their OpenMP versions. The Arg is the worker
// count for the parallel variants.
#include <benchmark/benchmark.h>

#include "radkit/encoder.hpp"
#include "radkit/parallel.hpp"
#include "radkit/simulator.hpp"

namespace {

using namespace radkit;

Scene busy_scene() {
  RngStream r(5, 5);
  return generate_scene(0, default_grid(), {}, r);
}

void BM_SynthesizeSerial(benchmark::State& state) {
  const Scene s = busy_scene();
  SimConfig c;
  c.noise_floor = 0.1;
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::synthesize_tensor(s, default_geometry(), default_grid(), c, RngStream(1, 1)));
}

void BM_SynthesizeParallel(benchmark::State& state) {
  set_worker_count(static_cast<int>(state.range(0)));
  const Scene s = busy_scene();
  SimConfig c;
  c.noise_floor = 0.1;
  for (auto _ : state)
    benchmark::DoNotOptimize(synthesize_tensor(s, default_geometry(), default_grid(), c, RngStream(1, 1)));
  set_worker_count(0);
}

VirtualArrayTensor bench_tensor() {
  SimConfig c;
  c.noise_floor = 0.1;
  return synthesize_tensor(busy_scene(), default_geometry(), default_grid(), c, RngStream(2, 2));
}

void BM_IntegrateSerial(benchmark::State& state) {
  const VirtualArrayTensor t = bench_tensor();
  for (auto _ : state) benchmark::DoNotOptimize(serial::integrate_heatmap(t));
}

void BM_IntegrateParallel(benchmark::State& state) {
  set_worker_count(static_cast<int>(state.range(0)));
  const VirtualArrayTensor t = bench_tensor();
  for (auto _ : state) benchmark::DoNotOptimize(integrate_heatmap(t));
  set_worker_count(0);
}

struct BackwardFixture {
  EncoderParams params;
  ForwardCache<double> cache;
  std::vector<double> upstream;

  BackwardFixture() {
    const size_t batch = 64, input = 32 * 32;
    params = init_params<double>(EncoderShape::defaults(input), RngStream(3, 3));
    RngStream r(4, 4);
    std::vector<double> x(batch * input);
    for (auto& v : x) v = r.uniform();
    cache = forward_batch<double>(params, x, batch);
    upstream.resize(batch * params.embed_dim());
    for (auto& v : upstream) v = r.normal();
  }
};

void BM_BackwardSerial(benchmark::State& state) {
  const BackwardFixture f;
  for (auto _ : state) benchmark::DoNotOptimize(serial::backward<double>(f.params, f.cache, f.upstream));
}

void BM_BackwardParallel(benchmark::State& state) {
  set_worker_count(static_cast<int>(state.range(0)));
  const BackwardFixture f;
  for (auto _ : state) benchmark::DoNotOptimize(backward<double>(f.params, f.cache, f.upstream));
  set_worker_count(0);
}

BENCHMARK(BM_SynthesizeSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SynthesizeParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_IntegrateSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_IntegrateParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BackwardSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BackwardParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
