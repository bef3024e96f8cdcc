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

#include <random>

#include "rbpdip/ops.hpp"
#include "rbpdip/projection.hpp"
#include "rbpdip/rbp_dip.hpp"
#include "rbpdip/simulate.hpp"
#include "rbpdip/unet.hpp"

using namespace rbpdip;
using namespace rbpdip::ad;

namespace {

std::vector<double> noise(std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v)
        x = u(rng);
    return v;
}

void BM_Conv2dForwardBackward(benchmark::State& state)
{
    const int c = static_cast<int>(state.range(0));
    const int n = static_cast<int>(state.range(1));
    const Tensor x = Tensor::from({c, n, n}, noise(static_cast<std::size_t>(c) * n * n, 1), true);
    Tensor k = Tensor::from({c, c, 3, 3}, noise(static_cast<std::size_t>(c) * c * 9, 2), true);
    const Tensor b = Tensor::zeros({c}, true);
    for (auto _ : state) {
        Tape tape;
        const Tensor y = conv2d(tape, x, k, b, 1, 1);
        Tensor loss = sum(tape, y);
        tape.backward(loss);
        benchmark::DoNotOptimize(k.grad().data());
    }
}
BENCHMARK(BM_Conv2dForwardBackward)->Args({16, 64})->Args({64, 16})->Unit(benchmark::kMillisecond);

void BM_UNetForward(benchmark::State& state)
{
    const UNet net = unet_init(UNetConfig{});
    const Tensor z = Tensor::from({1, 64, 64}, noise(64 * 64, 3));
    for (auto _ : state) {
        Tape tape;
        benchmark::DoNotOptimize(net.forward(tape, z).values().data());
    }
}
BENCHMARK(BM_UNetForward)->Unit(benchmark::kMillisecond);

// One full loop iteration at the default network size.
void BM_RbpDipStep(benchmark::State& state)
{
    const auto g = uniform_geometry(64, 64, 30);
    const Sinogram sino = forward_project(shepp_logan(64, 64), g);
    RbpConfig cfg;
    cfg.max_iters = 1 << 30;
    RbpDipSolver solver(sino, g, cfg);
    for (auto _ : state)
        solver.step();
}
BENCHMARK(BM_RbpDipStep)->Unit(benchmark::kMillisecond);

} // namespace
