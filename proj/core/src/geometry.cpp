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

#include "rbpdip/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rbpdip/error.hpp"

namespace rbpdip {

void ParallelGeometry::validate() const
{
    if (image_width <= 0 || image_height <= 0)
        throw InvalidInput("geometry: image dimensions must be positive");
    if (detector_count <= 0)
        throw InvalidInput("geometry: detector_count must be positive");
    if (!(detector_spacing > 0.0) || !std::isfinite(detector_spacing))
        throw InvalidInput("geometry: detector_spacing must be positive");
    if (angles.empty())
        throw InvalidInput("geometry: at least one projection angle is required");
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const double a = angles[i];
        if (!std::isfinite(a) || a < 0.0 || a >= std::numbers::pi)
            throw InvalidInput("geometry: angle " + std::to_string(a) + " outside [0, pi)");
        if (i > 0 && !(a > angles[i - 1]))
            throw InvalidInput("geometry: angles must be strictly increasing");
    }
}

int default_detector_count(int width, int height, double detector_spacing)
{
    if (!(detector_spacing > 0.0) || !std::isfinite(detector_spacing))
        throw InvalidInput("geometry: detector_spacing must be positive");
    return static_cast<int>(std::ceil(std::numbers::sqrt2 * std::max(width, height) / detector_spacing));
}

ParallelGeometry uniform_geometry(int width, int height, int views, double range_deg, int detector_count,
                                  double detector_spacing)
{
    if (views <= 0)
        throw InvalidInput("geometry: view count must be positive");
    if (!(range_deg > 0.0) || range_deg > 180.0)
        throw InvalidInput("geometry: angular range must lie in (0, 180] degrees");
    ParallelGeometry g;
    g.image_width = width;
    g.image_height = height;
    g.detector_count = detector_count > 0 ? detector_count : default_detector_count(width, height, detector_spacing);
    g.detector_spacing = detector_spacing;
    g.angles.reserve(views);
    for (int i = 0; i < views; ++i)
        g.angles.push_back(deg_to_rad(range_deg * i / views));
    g.validate();
    return g;
}

double deg_to_rad(double deg)
{
    return deg * std::numbers::pi / 180.0;
}

double rad_to_deg(double rad)
{
    return rad * 180.0 / std::numbers::pi;
}

} // namespace rbpdip
