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

#include "rbpdip/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rbpdip/error.hpp"

namespace rbpdip::ad {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

void require_chw(const Tensor& t, const char* op)
{
    if (!t.defined() || t.shape().rank() != 3)
        throw InvalidInput(std::string(op) + ": expected a (C, H, W) tensor");
}

bool any_requires_grad(std::initializer_list<const Tensor*> ts)
{
    for (const Tensor* t : ts)
        if (t->requires_grad())
            return true;
    return false;
}

struct ConvDims {
    int cin, h, w, cout, k, stride, pad, ho, wo;
    int patch() const { return cin * k * k; }
    int pixels() const { return ho * wo; }
};

// col[(ci, ky, kx), (oy, ox)] = x[ci, oy*s + ky - p, ox*s + kx - p] (0 outside).
void im2col(const ConvDims& d, std::span<const double> x, std::span<double> col)
{
    const int p = d.pixels();
    for (int ci = 0; ci < d.cin; ++ci)
        for (int ky = 0; ky < d.k; ++ky)
            for (int kx = 0; kx < d.k; ++kx) {
                double* dst = col.data() + static_cast<std::size_t>((ci * d.k + ky) * d.k + kx) * p;
                for (int oy = 0; oy < d.ho; ++oy) {
                    const int iy = oy * d.stride + ky - d.pad;
                    double* row = dst + static_cast<std::size_t>(oy) * d.wo;
                    if (iy < 0 || iy >= d.h) {
                        std::fill(row, row + d.wo, 0.0);
                        continue;
                    }
                    const double* src = x.data() + (static_cast<std::size_t>(ci) * d.h + iy) * d.w;
                    for (int ox = 0; ox < d.wo; ++ox) {
                        const int ix = ox * d.stride + kx - d.pad;
                        row[ox] = (ix >= 0 && ix < d.w) ? src[ix] : 0.0;
                    }
                }
            }
}

// Adjoint of im2col: scatter-add columns back onto the input grid.
void col2im_add(const ConvDims& d, std::span<const double> col, std::span<double> gx)
{
    const int p = d.pixels();
    for (int ci = 0; ci < d.cin; ++ci)
        for (int ky = 0; ky < d.k; ++ky)
            for (int kx = 0; kx < d.k; ++kx) {
                const double* src = col.data() + static_cast<std::size_t>((ci * d.k + ky) * d.k + kx) * p;
                for (int oy = 0; oy < d.ho; ++oy) {
                    const int iy = oy * d.stride + ky - d.pad;
                    if (iy < 0 || iy >= d.h)
                        continue;
                    double* dst = gx.data() + (static_cast<std::size_t>(ci) * d.h + iy) * d.w;
                    const double* row = src + static_cast<std::size_t>(oy) * d.wo;
                    for (int ox = 0; ox < d.wo; ++ox) {
                        const int ix = ox * d.stride + kx - d.pad;
                        if (ix >= 0 && ix < d.w)
                            dst[ix] += row[ox];
                    }
                }
            }
}

} // namespace

Tensor conv2d(Tape& tape, const Tensor& x, const Tensor& kernel, const Tensor& bias, int stride, int padding)
{
    require_chw(x, "conv2d");
    if (!kernel.defined() || kernel.shape().rank() != 4)
        throw InvalidInput("conv2d: kernel must be (C_out, C_in, K, K)");
    const auto& ks = kernel.shape();
    if (ks[2] != ks[3] || ks[2] % 2 == 0)
        throw InvalidInput("conv2d: kernel must be square with odd size, got " + ks.str());
    if (ks[1] != x.shape()[0])
        throw InvalidInput("conv2d: kernel expects " + std::to_string(ks[1]) + " input channels, input has "
                           + std::to_string(x.shape()[0]));
    if (!bias.defined() || bias.shape().rank() != 1 || bias.shape()[0] != ks[0])
        throw InvalidInput("conv2d: bias must have C_out entries");
    if (stride < 1 || padding < 0)
        throw InvalidInput("conv2d: stride must be >= 1 and padding >= 0");

    ConvDims d{x.shape()[0], x.shape()[1], x.shape()[2], ks[0], ks[2], stride, padding, 0, 0};
    d.ho = (d.h + 2 * d.pad - d.k) / d.stride + 1;
    d.wo = (d.w + 2 * d.pad - d.k) / d.stride + 1;
    if (d.ho <= 0 || d.wo <= 0)
        throw InvalidInput("conv2d: kernel larger than padded input");

    auto col = std::make_shared<std::vector<double>>(static_cast<std::size_t>(d.patch()) * d.pixels());
    im2col(d, x.values(), *col);

    const bool rg = any_requires_grad({&x, &kernel, &bias});
    Tensor out = Tensor::zeros(Shape{d.cout, d.ho, d.wo}, rg);
    {
        ConstMapMat wm(kernel.values().data(), d.cout, d.patch());
        ConstMapMat cm(col->data(), d.patch(), d.pixels());
        MapMat om(out.values().data(), d.cout, d.pixels());
        om.noalias() = wm * cm;
        const auto b = bias.values();
        for (int co = 0; co < d.cout; ++co)
            om.row(co).array() += b[co];
    }

    tape.record("conv2d", {x, kernel, bias}, out, [x = Tensor(x), kernel = Tensor(kernel), bias = Tensor(bias), out, col, d]() mutable {
        ConstMapMat gout(std::as_const(out).grad().data(), d.cout, d.pixels());
        if (kernel.requires_grad()) {
            MapMat gw(kernel.grad().data(), d.cout, d.patch());
            ConstMapMat cm(col->data(), d.patch(), d.pixels());
            gw.noalias() += gout * cm.transpose();
        }
        if (bias.requires_grad()) {
            // Plain loop: Eigen's vectorized sum starts at the first aligned
            // element, so its order would depend on the buffer address.
            auto gb = bias.grad();
            const double* g = std::as_const(out).grad().data();
            for (int co = 0; co < d.cout; ++co) {
                double acc = 0.0;
                for (int p = 0; p < d.pixels(); ++p)
                    acc += g[static_cast<std::size_t>(co) * d.pixels() + p];
                gb[co] += acc;
            }
        }
        if (x.requires_grad()) {
            std::vector<double> gcol(col->size());
            ConstMapMat wm(std::as_const(kernel).values().data(), d.cout, d.patch());
            MapMat gc(gcol.data(), d.patch(), d.pixels());
            gc.noalias() = wm.transpose() * gout;
            col2im_add(d, gcol, x.grad());
        }
    });
    return out;
}

Tensor leaky_relu(Tape& tape, const Tensor& x, double slope)
{
    if (!(slope >= 0.0 && slope < 1.0))
        throw InvalidInput("leaky_relu: slope must lie in [0, 1)");
    Tensor out = Tensor::zeros(x.shape(), x.requires_grad());
    auto xv = x.values();
    auto ov = out.values();
    for (std::size_t i = 0; i < xv.size(); ++i)
        ov[i] = xv[i] > 0.0 ? xv[i] : slope * xv[i];
    tape.record("leaky_relu", {x}, out, [x = Tensor(x), out, slope]() mutable {
        if (!x.requires_grad())
            return;
        auto xv = std::as_const(x).values();
        auto go = std::as_const(out).grad();
        auto gx = x.grad();
        for (std::size_t i = 0; i < xv.size(); ++i)
            gx[i] += xv[i] > 0.0 ? go[i] : slope * go[i];
    });
    return out;
}

Tensor upsample2x(Tape& tape, const Tensor& x)
{
    require_chw(x, "upsample2x");
    const int c = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
    Tensor out = Tensor::zeros(Shape{c, 2 * h, 2 * w}, x.requires_grad());
    auto xv = x.values();
    auto ov = out.values();
    for (int ch = 0; ch < c; ++ch)
        for (int y = 0; y < 2 * h; ++y)
            for (int xx = 0; xx < 2 * w; ++xx)
                ov[(static_cast<std::size_t>(ch) * 2 * h + y) * 2 * w + xx]
                    = xv[(static_cast<std::size_t>(ch) * h + y / 2) * w + xx / 2];
    tape.record("upsample2x", {x}, out, [x = Tensor(x), out, c, h, w]() mutable {
        if (!x.requires_grad())
            return;
        auto go = std::as_const(out).grad();
        auto gx = x.grad();
        for (int ch = 0; ch < c; ++ch)
            for (int y = 0; y < 2 * h; ++y)
                for (int xx = 0; xx < 2 * w; ++xx)
                    gx[(static_cast<std::size_t>(ch) * h + y / 2) * w + xx / 2]
                        += go[(static_cast<std::size_t>(ch) * 2 * h + y) * 2 * w + xx];
    });
    return out;
}

Tensor avg_pool2x(Tape& tape, const Tensor& x)
{
    require_chw(x, "avg_pool2x");
    const int c = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
    if (h % 2 || w % 2)
        throw InvalidInput("avg_pool2x: spatial dims must be even, got " + x.shape().str());
    const int ho = h / 2, wo = w / 2;
    Tensor out = Tensor::zeros(Shape{c, ho, wo}, x.requires_grad());
    auto xv = x.values();
    auto ov = out.values();
    for (int ch = 0; ch < c; ++ch)
        for (int y = 0; y < ho; ++y)
            for (int xx = 0; xx < wo; ++xx) {
                const double* p = xv.data() + (static_cast<std::size_t>(ch) * h + 2 * y) * w + 2 * xx;
                ov[(static_cast<std::size_t>(ch) * ho + y) * wo + xx] = 0.25 * (p[0] + p[1] + p[w] + p[w + 1]);
            }
    tape.record("avg_pool2x", {x}, out, [x = Tensor(x), out, c, h, w]() mutable {
        if (!x.requires_grad())
            return;
        const int ho = h / 2, wo = w / 2;
        auto go = std::as_const(out).grad();
        auto gx = x.grad();
        for (int ch = 0; ch < c; ++ch)
            for (int y = 0; y < ho; ++y)
                for (int xx = 0; xx < wo; ++xx) {
                    const double g = 0.25 * go[(static_cast<std::size_t>(ch) * ho + y) * wo + xx];
                    double* p = gx.data() + (static_cast<std::size_t>(ch) * h + 2 * y) * w + 2 * xx;
                    p[0] += g;
                    p[1] += g;
                    p[w] += g;
                    p[w + 1] += g;
                }
    });
    return out;
}

Tensor concat_channels(Tape& tape, const Tensor& a, const Tensor& b)
{
    require_chw(a, "concat_channels");
    require_chw(b, "concat_channels");
    if (a.shape()[1] != b.shape()[1] || a.shape()[2] != b.shape()[2])
        throw InvalidInput("concat_channels: spatial mismatch " + a.shape().str() + " vs " + b.shape().str());
    const bool rg = any_requires_grad({&a, &b});
    Tensor out = Tensor::zeros(Shape{a.shape()[0] + b.shape()[0], a.shape()[1], a.shape()[2]}, rg);
    auto ov = out.values();
    std::copy(a.values().begin(), a.values().end(), ov.begin());
    std::copy(b.values().begin(), b.values().end(), ov.begin() + static_cast<std::ptrdiff_t>(a.numel()));
    tape.record("concat_channels", {a, b}, out, [a = Tensor(a), b = Tensor(b), out]() mutable {
        auto go = std::as_const(out).grad();
        if (a.requires_grad()) {
            auto ga = a.grad();
            for (std::size_t i = 0; i < ga.size(); ++i)
                ga[i] += go[i];
        }
        if (b.requires_grad()) {
            auto gb = b.grad();
            const std::size_t off = a.numel();
            for (std::size_t i = 0; i < gb.size(); ++i)
                gb[i] += go[off + i];
        }
    });
    return out;
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b)
{
    if (!(a.shape() == b.shape()))
        throw InvalidInput("add: shape mismatch " + a.shape().str() + " vs " + b.shape().str());
    Tensor out = Tensor::zeros(a.shape(), any_requires_grad({&a, &b}));
    auto av = a.values();
    auto bv = b.values();
    auto ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i)
        ov[i] = av[i] + bv[i];
    tape.record("add", {a, b}, out, [a = Tensor(a), b = Tensor(b), out]() mutable {
        auto go = std::as_const(out).grad();
        for (Tensor* t : {&a, &b}) {
            if (!t->requires_grad())
                continue;
            auto g = t->grad();
            for (std::size_t i = 0; i < g.size(); ++i)
                g[i] += go[i];
        }
    });
    return out;
}

Tensor sum(Tape& tape, const Tensor& x)
{
    double acc = 0.0;
    for (double v : x.values())
        acc += v;
    Tensor out = Tensor::scalar(acc, x.requires_grad());
    tape.record("sum", {x}, out, [x = Tensor(x), out]() mutable {
        if (!x.requires_grad())
            return;
        const double go = std::as_const(out).grad()[0];
        for (double& g : x.grad())
            g += go;
    });
    return out;
}

Tensor weighted_sum(Tape& tape, const Tensor& x, std::span<const double> weights)
{
    if (weights.size() != x.numel())
        throw InvalidInput("weighted_sum: weight count does not match tensor size");
    auto xv = x.values();
    double acc = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i)
        acc += weights[i] * xv[i];
    Tensor out = Tensor::scalar(acc, x.requires_grad());
    tape.record("weighted_sum", {x}, out,
                [x = Tensor(x), out, w = std::vector<double>(weights.begin(), weights.end())]() mutable {
                    if (!x.requires_grad())
                        return;
                    const double go = std::as_const(out).grad()[0];
                    auto gx = x.grad();
                    for (std::size_t i = 0; i < gx.size(); ++i)
                        gx[i] += go * w[i];
                });
    return out;
}

Tensor huber_loss(Tape& tape, const Tensor& x, double delta)
{
    if (!(delta > 0.0))
        throw InvalidInput("huber_loss: delta must be positive");
    if (x.numel() == 0)
        throw InvalidInput("huber_loss: empty input");
    auto xv = x.values();
    double acc = 0.0;
    for (double v : xv) {
        const double a = std::abs(v);
        acc += a <= delta ? 0.5 * v * v : delta * (a - 0.5 * delta);
    }
    const double n = static_cast<double>(xv.size());
    Tensor out = Tensor::scalar(acc / n, x.requires_grad());
    tape.record("huber_loss", {x}, out, [x = Tensor(x), out, delta, n]() mutable {
        if (!x.requires_grad())
            return;
        const double go = std::as_const(out).grad()[0] / n;
        auto xv = std::as_const(x).values();
        auto gx = x.grad();
        for (std::size_t i = 0; i < xv.size(); ++i)
            gx[i] += go * std::clamp(xv[i], -delta, delta);
    });
    return out;
}

Tensor custom_map(Tape& tape, std::string name, const Tensor& x, Shape out_shape, const MapForward& forward,
                  MapAdjoint adjoint)
{
    Tensor out = Tensor::zeros(std::move(out_shape), x.requires_grad());
    forward(x.values(), out.values());
    tape.record(std::move(name), {x}, out, [x = Tensor(x), out, adjoint = std::move(adjoint)]() mutable {
        if (x.requires_grad())
            adjoint(std::as_const(out).grad(), x.grad());
    });
    return out;
}

} // namespace rbpdip::ad
