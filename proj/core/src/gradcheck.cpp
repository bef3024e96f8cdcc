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

#include "rbpdip/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rbpdip/error.hpp"
#include "rbpdip/ops.hpp"
#include "rbpdip/unet.hpp"

namespace rbpdip::ad {

GradCheckResult gradient_check(std::string name, const LossFn& loss, const std::vector<Tensor>& params, int samples,
                               std::uint64_t seed, double h, double floor)
{
    if (params.empty() || samples < 1)
        throw InvalidInput("gradient_check: need parameters and a positive sample count");
    GradCheckResult res;
    res.name = std::move(name);

    Tape tape;
    Tensor out = loss(tape);
    tape.backward(out);
    std::vector<std::vector<double>> analytic;
    std::size_t total = 0;
    for (const auto& p : params) {
        auto g = Tensor(p).grad();
        analytic.emplace_back(g.begin(), g.end());
        total += p.numel();
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, total - 1);
    for (int s = 0; s < samples; ++s) {
        std::size_t flat = pick(rng);
        std::size_t k = 0;
        while (flat >= params[k].numel())
            flat -= params[k++].numel();
        Tensor p = params[k];
        double& v = p.values()[flat];
        const double saved = v;
        v = saved + h;
        Tape tp;
        const double up = loss(tp).item();
        v = saved - h;
        Tape tm;
        const double down = loss(tm).item();
        v = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic[k][flat];
        const double abs_err = std::abs(a - numeric);
        res.max_abs_error = std::max(res.max_abs_error, abs_err);
        res.max_rel_error = std::max(res.max_rel_error, abs_err / std::max({std::abs(a), std::abs(numeric), floor}));
        ++res.samples;
    }
    return res;
}

namespace {

Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo, double hi, bool requires_grad = true)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(shape.numel());
    for (double& x : v)
        x = dist(rng);
    return Tensor::from(std::move(shape), std::move(v), requires_grad);
}

// Values with |x| in [0.1, 1] and random sign, clear of the kinks at 0.
Tensor off_kink_tensor(Shape shape, std::mt19937_64& rng)
{
    Tensor t = random_tensor(std::move(shape), rng, 0.1, 1.0);
    std::bernoulli_distribution sign(0.5);
    for (double& x : t.values())
        if (sign(rng))
            x = -x;
    return t;
}

std::vector<double> weights_for(const Shape& shape, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> w(shape.numel());
    for (double& x : w)
        x = dist(rng);
    return w;
}

} // namespace

std::vector<GradCheckResult> standard_gradient_suite(int samples, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<GradCheckResult> out;
    std::uint64_t sub = seed;
    auto check = [&](std::string name, const LossFn& fn, const std::vector<Tensor>& params) {
        out.push_back(gradient_check(std::move(name), fn, params, samples, ++sub));
    };

    {
        Tensor x = random_tensor({2, 5, 5}, rng, -1, 1);
        Tensor k = random_tensor({3, 2, 3, 3}, rng, -1, 1);
        Tensor b = random_tensor({3}, rng, -1, 1);
        for (int stride : {1, 2}) {
            const auto w = weights_for(Shape{3, stride == 1 ? 5 : 3, stride == 1 ? 5 : 3}, rng);
            check("conv2d stride " + std::to_string(stride),
                  [=](Tape& t) { return weighted_sum(t, conv2d(t, x, k, b, stride, 1), w); }, {x, k, b});
        }
    }
    {
        Tensor x = off_kink_tensor({2, 4, 4}, rng);
        const auto w = weights_for(x.shape(), rng);
        check("leaky_relu", [=](Tape& t) { return weighted_sum(t, leaky_relu(t, x, 0.1), w); }, {x});
    }
    {
        Tensor x = random_tensor({2, 3, 3}, rng, -1, 1);
        const auto w = weights_for(Shape{2, 6, 6}, rng);
        check("upsample2x", [=](Tape& t) { return weighted_sum(t, upsample2x(t, x), w); }, {x});
    }
    {
        Tensor x = random_tensor({2, 4, 4}, rng, -1, 1);
        const auto w = weights_for(Shape{2, 2, 2}, rng);
        check("avg_pool2x", [=](Tape& t) { return weighted_sum(t, avg_pool2x(t, x), w); }, {x});
    }
    {
        Tensor a = random_tensor({1, 3, 3}, rng, -1, 1);
        Tensor b = random_tensor({2, 3, 3}, rng, -1, 1);
        const auto w = weights_for(Shape{3, 3, 3}, rng);
        check("concat_channels", [=](Tape& t) { return weighted_sum(t, concat_channels(t, a, b), w); }, {a, b});
    }
    {
        Tensor a = random_tensor({2, 3, 3}, rng, -1, 1);
        Tensor b = random_tensor({2, 3, 3}, rng, -1, 1);
        const auto w = weights_for(a.shape(), rng);
        check("add", [=](Tape& t) { return weighted_sum(t, add(t, a, b), w); }, {a, b});
    }
    {
        Tensor x = random_tensor({2, 3, 3}, rng, -1, 1);
        check("sum", [=](Tape& t) { return sum(t, leaky_relu(t, x, 0.5)); }, {x});
    }
    {
        Tensor x = off_kink_tensor({3, 4, 4}, rng);
        for (double& v : x.values())
            v *= 2.0; // straddle delta = 1 on both sides
        for (double& v : x.values())
            if (std::abs(std::abs(v) - 1.0) < 0.05)
                v *= 1.2;
        check("huber_loss", [=](Tape& t) { return huber_loss(t, x, 1.0); }, {x});
    }
    {
        // Symmetric linear map with a hand-written adjoint.
        Tensor x = random_tensor({1, 4, 4}, rng, -1, 1);
        Tensor m = random_tensor({16, 16}, rng, -1, 1, false);
        const std::vector<double> mat(m.values().begin(), m.values().end());
        const auto w = weights_for(x.shape(), rng);
        check("custom_map",
              [=](Tape& t) {
                  Tensor y = custom_map(
                      t, "matvec", x, x.shape(),
                      [&mat](std::span<const double> in, std::span<double> o) {
                          for (std::size_t i = 0; i < 16; ++i) {
                              double acc = 0.0;
                              for (std::size_t j = 0; j < 16; ++j)
                                  acc += mat[i * 16 + j] * in[j];
                              o[i] = acc;
                          }
                      },
                      [mat](std::span<const double> g, std::span<double> gi) {
                          for (std::size_t j = 0; j < 16; ++j)
                              for (std::size_t i = 0; i < 16; ++i)
                                  gi[j] += mat[i * 16 + j] * g[i];
                      });
                  return weighted_sum(t, y, w);
              },
              {x});
    }
    {
        UNetConfig cfg;
        cfg.depth = 2;
        cfg.base_channels = 4;
        cfg.max_channels = 8;
        cfg.seed = seed;
        // A zero head would leave every other layer with a zero gradient.
        cfg.head_init_scale = 1.0;
        UNet net = unet_init(cfg);
        Tensor z = random_tensor({1, 16, 16}, rng, 0, 1, false);
        check("unet", [net, z](Tape& t) { return huber_loss(t, net.forward(t, z), 1.0); }, net.parameters());
    }
    return out;
}

} // namespace rbpdip::ad
