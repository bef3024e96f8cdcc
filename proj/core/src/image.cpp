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

#include "rbpdip/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbpdip/error.hpp"

namespace rbpdip {

Image::Image(int w, int h, double fill) : width(w), height(h)
{
    if (w <= 0 || h <= 0)
        throw InvalidInput("image dimensions must be positive");
    values.assign(static_cast<std::size_t>(w) * h, fill);
}

Image::Image(int w, int h, std::vector<double> data) : width(w), height(h), values(std::move(data))
{
    if (w <= 0 || h <= 0)
        throw InvalidInput("image dimensions must be positive");
    if (values.size() != static_cast<std::size_t>(w) * h)
        throw InvalidInput("image data length " + std::to_string(values.size()) + " does not match "
                           + std::to_string(w) + "x" + std::to_string(h));
}

bool Image::all_finite() const
{
    for (double v : values)
        if (!std::isfinite(v))
            return false;
    return true;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw InvalidInput("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

double max_abs(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace rbpdip
