/*
 * Copyright 2026 The rbpdip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <memory>

#include "rbpdip/mbir.hpp"
#include "rbpdip/projection.hpp"
#include "rbpdip/simulate.hpp"

using namespace rbpdip;

namespace {

void BM_ForwardProject(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto g = uniform_geometry(n, n, 180);
    const Image img = shepp_logan(n, n);
    std::vector<double> sino(g.sinogram_size());
    for (auto _ : state) {
        forward_project(img.values, g, sino);
        benchmark::DoNotOptimize(sino.data());
    }
}
BENCHMARK(BM_ForwardProject)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BackProject(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto g = uniform_geometry(n, n, 180);
    const Sinogram sino = forward_project(shepp_logan(n, n), g);
    std::vector<double> img(static_cast<std::size_t>(n) * n);
    for (auto _ : state) {
        back_project(sino.values, g, img);
        benchmark::DoNotOptimize(img.data());
    }
}
BENCHMARK(BM_BackProject)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

// Cached sparse operator against the matrix-free pair.
void BM_NormalOpCached(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto g = uniform_geometry(n, n, 180);
    const auto op = make_normal_operator(std::make_shared<const Projector>(g));
    const Image img = shepp_logan(n, n);
    std::vector<double> out(img.size());
    for (auto _ : state) {
        op(img.values, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_NormalOpCached)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_MbirIterations(benchmark::State& state)
{
    const auto g = uniform_geometry(64, 64, 30);
    const Sinogram sino = forward_project(shepp_logan(64, 64), g);
    for (auto _ : state)
        benchmark::DoNotOptimize(mbir_reconstruct(sino, g, {100, 0.0}).image.values.data());
}
BENCHMARK(BM_MbirIterations)->Unit(benchmark::kMillisecond);

} // namespace
