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

#include <vector>

namespace rbpdip {

/// Detector pitch used when none is given, in pixel units.
inline constexpr double kDefaultDetectorSpacing = 0.8;

/// Parallel-beam acquisition layout. Angles are in radians, strictly
/// increasing in [0, pi). Detector bins are centred on the image centre and
/// measured in pixel units.
struct ParallelGeometry {
    std::vector<double> angles;
    int detector_count = 0;
    double detector_spacing = kDefaultDetectorSpacing;
    int image_width = 0;
    int image_height = 0;

    int views() const { return static_cast<int>(angles.size()); }
    std::size_t sinogram_size() const { return angles.size() * static_cast<std::size_t>(detector_count); }

    // Throws InvalidInput when an invariant is broken.
    void validate() const;

    friend bool operator==(const ParallelGeometry&, const ParallelGeometry&) = default;
};

/// ceil(sqrt(2) * max(width, height) / spacing): covers the whole image at
/// every angle.
int default_detector_count(int width, int height, double detector_spacing = kDefaultDetectorSpacing);

/// `views` angles spaced range_deg / views apart starting at 0 degrees, so
/// (180, 180) gives one view per degree over the half circle and (90, 90)
/// gives 0..89 degrees.
ParallelGeometry uniform_geometry(int width, int height, int views, double range_deg = 180.0,
                                  int detector_count = 0, double detector_spacing = kDefaultDetectorSpacing);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

} // namespace rbpdip
