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

#include <array>
#include <optional>
#include <span>

#include "rbpdip/geometry.hpp"
#include "rbpdip/image.hpp"
#include "rbpdip/sinogram.hpp"

namespace rbpdip {

struct Ellipse {
    double intensity;
    double semi_x; // semi-axis along x before rotation
    double semi_y;
    double center_x;
    double center_y;
    double angle_deg; // counter-clockwise
};

/// Modified-contrast (Toft) Shepp-Logan table on [-1, 1]^2, y pointing up.
std::span<const Ellipse> shepp_logan_ellipses();

/// Phantom value at (x, y) in [-1, 1]^2: sum of the intensities of the
/// ellipses that contain the point, clipped to [0, 1].
double shepp_logan_value(double x, double y);

/// Renders the phantom at pixel centres. Row 0 is the top (y = +1).
Image shepp_logan(int width, int height);

/// Pixel-centre coordinates in the phantom's [-1, 1]^2 frame.
double phantom_x(int col, int width);
double phantom_y(int row, int height);

/// Bilinear rotation by `degrees` (counter-clockwise on screen) about the
/// image centre. Samples falling outside the source are zero.
Image rotate_image(const Image& image, double degrees);

/// E = I0 exp(-g), N ~ Poisson(E), g_hat = -ln(max(N, 1) / I0). Each entry
/// draws from its own generator derived from (seed, index).
Sinogram poisson_noise(const Sinogram& sino, const NoiseSpec& spec);

/// Forward projection followed by optional Poisson noise. The noise spec is
/// kept on the result for provenance.
Sinogram make_sinogram(const Image& image, const ParallelGeometry& geom, const std::optional<NoiseSpec>& noise = {});

} // namespace rbpdip
