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
#include <optional>
#include <span>
#include <vector>

#include "rbpdip/geometry.hpp"

namespace rbpdip {

/// Blank-scan photon count and generator seed for the low-dose model.
struct NoiseSpec {
    double i0 = 1e4;
    std::uint64_t seed = 0;

    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

/// Measurement g: one row of `detector_count` line integrals per angle.
struct Sinogram {
    ParallelGeometry geometry;
    std::vector<double> values;
    // Set when the data were synthesized with Poisson noise.
    std::optional<NoiseSpec> noise;

    Sinogram() = default;
    explicit Sinogram(ParallelGeometry geom);
    Sinogram(ParallelGeometry geom, std::vector<double> data);

    int views() const { return geometry.views(); }
    int detectors() const { return geometry.detector_count; }
    std::size_t size() const { return values.size(); }

    std::span<double> row(int view);
    std::span<const double> row(int view) const;

    void validate() const;
};

} // namespace rbpdip
