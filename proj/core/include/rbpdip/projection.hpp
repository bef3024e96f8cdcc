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

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rbpdip/geometry.hpp"
#include "rbpdip/image.hpp"
#include "rbpdip/sinogram.hpp"

namespace rbpdip {

// Matched parallel-beam projector pair.
//
// Each (view, detector) ray walks the image along its dominant axis (rows when
// |cos| >= |sin|, columns otherwise) and picks up the pixels whose projected
// centre t_j lies within one detector spacing of the ray offset t_k, weighted
// by the linear kernel (1 - |t_k - t_j| / spacing) / spacing. The kernel is
// measured on the detector axis, so every pixel inside the field of view
// deposits exactly 1 / spacing into each view. The back projector scatters the
// very same weights, which makes it the exact transpose.

/// g = A c
Sinogram forward_project(const Image& image, const ParallelGeometry& geom);
/// A^T g
Image back_project(const Sinogram& sino, const ParallelGeometry& geom);
/// A^T A c, identical to back_project(forward_project(c)).
Image normal_op(const Image& image, const ParallelGeometry& geom);

// Span variants used in inner loops; `out` is overwritten.
void forward_project(std::span<const double> image, const ParallelGeometry& geom, std::span<double> sino);
void back_project(std::span<const double> sino, const ParallelGeometry& geom, std::span<double> image);
void normal_op(std::span<const double> image, const ParallelGeometry& geom, std::span<double> out);

/// The same matrix with its weights cached in compressed rows (one row per
/// sinogram entry). Results are bit-identical to the matrix-free functions.
class Projector {
public:
    explicit Projector(ParallelGeometry geom);

    const ParallelGeometry& geometry() const { return geom_; }
    std::size_t image_size() const { return static_cast<std::size_t>(geom_.image_width) * geom_.image_height; }
    std::size_t sinogram_size() const { return geom_.sinogram_size(); }
    std::size_t nonzeros() const { return weights_.size(); }

    void forward(std::span<const double> image, std::span<double> sino) const;
    void back(std::span<const double> sino, std::span<double> image) const;
    /// `sino_scratch` receives A image.
    void normal(std::span<const double> image, std::span<double> out, std::span<double> sino_scratch) const;

private:
    ParallelGeometry geom_;
    std::vector<std::size_t> row_start_;
    std::vector<std::uint32_t> pixels_;
    std::vector<double> weights_;
};

/// Symmetric positive semidefinite image-domain operator, e.g. A^T A.
using NormalOperator = std::function<void(std::span<const double>, std::span<double>)>;
NormalOperator make_normal_operator(const ParallelGeometry& geom);
NormalOperator make_normal_operator(std::shared_ptr<const Projector> projector);

/// |<Ax, y> - <x, A^T y>| / max(|<Ax, y>|, eps) for seeded uniform x, y.
double adjoint_check(const ParallelGeometry& geom, std::uint64_t seed);

struct WedgeEnergy {
    double measured = 0.0;
    double unmeasured = 0.0;

    double total() const { return measured + unmeasured; }
    // 0 for an image with no non-DC energy.
    double unmeasured_fraction() const;
};

/// Splits the non-DC 2D DFT energy of a square image into the samples whose
/// polar angle lies within `band_deg` of a measured view's central slice and
/// the rest.
WedgeEnergy wedge_energy(const Image& image, const ParallelGeometry& geom, double band_deg);

} // namespace rbpdip
