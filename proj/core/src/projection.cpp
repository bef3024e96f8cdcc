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

#include "rbpdip/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rbpdip/error.hpp"

namespace rbpdip {
namespace {

struct ViewTrig {
    double cos_t;
    double sin_t;
};

// Calls fn(pixel_index, weight) for every pixel on ray (view, det). Both the
// forward and the back projector go through here so they share one matrix.
template <typename Fn>
inline void for_each_ray_weight(const ParallelGeometry& g, const ViewTrig& trig, int det, Fn&& fn)
{
    const int w = g.image_width;
    const int h = g.image_height;
    const double spacing = g.detector_spacing;
    const double inv_spacing = 1.0 / spacing;
    const double t = (det - 0.5 * (g.detector_count - 1)) * spacing;
    const double cx = 0.5 * (w - 1);
    const double cy = 0.5 * (h - 1);
    const double c = trig.cos_t;
    const double s = trig.sin_t;

    if (std::abs(c) >= std::abs(s)) {
        // Step over rows; the kernel spans spacing / |cos| columns either side.
        const double reach = spacing / std::abs(c);
        for (int row = 0; row < h; ++row) {
            const double y = row - cy;
            const double u = (t - y * s) / c + cx;
            const int lo = std::max(0, static_cast<int>(std::ceil(u - reach)));
            const int hi = std::min(w - 1, static_cast<int>(std::floor(u + reach)));
            for (int col = lo; col <= hi; ++col) {
                const double wgt = (1.0 - std::abs((u - col) * c) * inv_spacing) * inv_spacing;
                if (wgt > 0.0)
                    fn(static_cast<std::size_t>(row) * w + col, wgt);
            }
        }
    } else {
        const double reach = spacing / std::abs(s);
        for (int col = 0; col < w; ++col) {
            const double x = col - cx;
            const double v = (t - x * c) / s + cy;
            const int lo = std::max(0, static_cast<int>(std::ceil(v - reach)));
            const int hi = std::min(h - 1, static_cast<int>(std::floor(v + reach)));
            for (int row = lo; row <= hi; ++row) {
                const double wgt = (1.0 - std::abs((v - row) * s) * inv_spacing) * inv_spacing;
                if (wgt > 0.0)
                    fn(static_cast<std::size_t>(row) * w + col, wgt);
            }
        }
    }
}

std::vector<ViewTrig> view_trig(const ParallelGeometry& g)
{
    std::vector<ViewTrig> out;
    out.reserve(g.angles.size());
    for (double a : g.angles)
        out.push_back({std::cos(a), std::sin(a)});
    return out;
}

void check_image(std::size_t n, const ParallelGeometry& g, const char* what)
{
    if (n != static_cast<std::size_t>(g.image_width) * g.image_height)
        throw InvalidInput(std::string(what) + ": image has " + std::to_string(n) + " pixels, geometry expects "
                           + std::to_string(g.image_width) + "x" + std::to_string(g.image_height));
}

void check_sino(std::size_t n, const ParallelGeometry& g, const char* what)
{
    if (n != g.sinogram_size())
        throw InvalidInput(std::string(what) + ": sinogram has " + std::to_string(n) + " values, geometry expects "
                           + std::to_string(g.sinogram_size()));
}

} // namespace

void forward_project(std::span<const double> image, const ParallelGeometry& geom, std::span<double> sino)
{
    geom.validate();
    check_image(image.size(), geom, "forward_project");
    check_sino(sino.size(), geom, "forward_project");
    const auto trig = view_trig(geom);
    const int d = geom.detector_count;
    for (int view = 0; view < geom.views(); ++view) {
        for (int det = 0; det < d; ++det) {
            double acc = 0.0;
            for_each_ray_weight(geom, trig[view], det, [&](std::size_t p, double w) { acc += w * image[p]; });
            sino[static_cast<std::size_t>(view) * d + det] = acc;
        }
    }
}

void back_project(std::span<const double> sino, const ParallelGeometry& geom, std::span<double> image)
{
    geom.validate();
    check_image(image.size(), geom, "back_project");
    check_sino(sino.size(), geom, "back_project");
    std::fill(image.begin(), image.end(), 0.0);
    const auto trig = view_trig(geom);
    const int d = geom.detector_count;
    for (int view = 0; view < geom.views(); ++view) {
        for (int det = 0; det < d; ++det) {
            const double g = sino[static_cast<std::size_t>(view) * d + det];
            if (g == 0.0)
                continue;
            for_each_ray_weight(geom, trig[view], det, [&](std::size_t p, double w) { image[p] += w * g; });
        }
    }
}

void normal_op(std::span<const double> image, const ParallelGeometry& geom, std::span<double> out)
{
    std::vector<double> sino(geom.sinogram_size());
    forward_project(image, geom, sino);
    back_project(sino, geom, out);
}

Sinogram forward_project(const Image& image, const ParallelGeometry& geom)
{
    if (image.width != geom.image_width || image.height != geom.image_height)
        throw InvalidInput("forward_project: image dimensions do not match geometry");
    Sinogram sino(geom);
    forward_project(image.span(), geom, sino.values);
    return sino;
}

Image back_project(const Sinogram& sino, const ParallelGeometry& geom)
{
    if (!(sino.geometry == geom))
        throw InvalidInput("back_project: sinogram geometry does not match");
    Image image(geom.image_width, geom.image_height);
    back_project(sino.values, geom, image.span());
    return image;
}

Image normal_op(const Image& image, const ParallelGeometry& geom)
{
    return back_project(forward_project(image, geom), geom);
}

Projector::Projector(ParallelGeometry geom) : geom_(std::move(geom))
{
    geom_.validate();
    if (image_size() > std::numeric_limits<std::uint32_t>::max())
        throw InvalidInput("Projector: image too large");
    const auto trig = view_trig(geom_);
    const int d = geom_.detector_count;
    row_start_.reserve(sinogram_size() + 1);
    row_start_.push_back(0);
    for (int view = 0; view < geom_.views(); ++view) {
        for (int det = 0; det < d; ++det) {
            for_each_ray_weight(geom_, trig[view], det, [&](std::size_t p, double w) {
                pixels_.push_back(static_cast<std::uint32_t>(p));
                weights_.push_back(w);
            });
            row_start_.push_back(weights_.size());
        }
    }
}

void Projector::forward(std::span<const double> image, std::span<double> sino) const
{
    check_image(image.size(), geom_, "Projector::forward");
    check_sino(sino.size(), geom_, "Projector::forward");
    for (std::size_t k = 0; k < sino.size(); ++k) {
        double acc = 0.0;
        for (std::size_t e = row_start_[k]; e < row_start_[k + 1]; ++e)
            acc += weights_[e] * image[pixels_[e]];
        sino[k] = acc;
    }
}

void Projector::back(std::span<const double> sino, std::span<double> image) const
{
    check_image(image.size(), geom_, "Projector::back");
    check_sino(sino.size(), geom_, "Projector::back");
    std::fill(image.begin(), image.end(), 0.0);
    for (std::size_t k = 0; k < sino.size(); ++k) {
        const double g = sino[k];
        if (g == 0.0)
            continue;
        for (std::size_t e = row_start_[k]; e < row_start_[k + 1]; ++e)
            image[pixels_[e]] += weights_[e] * g;
    }
}

void Projector::normal(std::span<const double> image, std::span<double> out, std::span<double> sino_scratch) const
{
    forward(image, sino_scratch);
    back(sino_scratch, out);
}

NormalOperator make_normal_operator(const ParallelGeometry& geom)
{
    return make_normal_operator(std::make_shared<const Projector>(geom));
}

NormalOperator make_normal_operator(std::shared_ptr<const Projector> projector)
{
    if (!projector)
        throw InvalidInput("make_normal_operator: null projector");
    std::vector<double> sino(projector->sinogram_size());
    return [projector = std::move(projector), sino = std::move(sino)](std::span<const double> in,
                                                                      std::span<double> out) mutable {
        projector->normal(in, out, sino);
    };
}

double adjoint_check(const ParallelGeometry& geom, std::uint64_t seed)
{
    geom.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(geom.image_width) * geom.image_height);
    std::vector<double> y(geom.sinogram_size());
    for (auto& v : x)
        v = dist(rng);
    for (auto& v : y)
        v = dist(rng);
    std::vector<double> ax(y.size());
    std::vector<double> aty(x.size());
    forward_project(x, geom, ax);
    back_project(y, geom, aty);
    const double lhs = dot(ax, y);
    const double rhs = dot(x, aty);
    return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::numeric_limits<double>::min());
}

} // namespace rbpdip
