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

#include "rbpdip/sinogram.hpp"

#include <cmath>
#include <string>

#include "rbpdip/error.hpp"

namespace rbpdip {

Sinogram::Sinogram(ParallelGeometry geom) : geometry(std::move(geom))
{
    values.assign(geometry.sinogram_size(), 0.0);
}

Sinogram::Sinogram(ParallelGeometry geom, std::vector<double> data)
    : geometry(std::move(geom)), values(std::move(data))
{
    validate();
}

std::span<double> Sinogram::row(int view)
{
    return std::span<double>(values).subspan(static_cast<std::size_t>(view) * detectors(), detectors());
}

std::span<const double> Sinogram::row(int view) const
{
    return std::span<const double>(values).subspan(static_cast<std::size_t>(view) * detectors(), detectors());
}

void Sinogram::validate() const
{
    geometry.validate();
    if (values.size() != geometry.sinogram_size())
        throw InvalidInput("sinogram: " + std::to_string(values.size()) + " values for a "
                           + std::to_string(geometry.views()) + "x" + std::to_string(geometry.detector_count)
                           + " geometry");
    for (double v : values)
        if (!std::isfinite(v))
            throw InvalidInput("sinogram: non-finite value");
}

} // namespace rbpdip
