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

#include <cstddef>
#include <span>
#include <vector>

namespace rbpdip {

/// Row-major grid of real pixel coefficients. Row 0 is the top of the image.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    Image() = default;
    Image(int w, int h, double fill = 0.0);
    Image(int w, int h, std::vector<double> data);

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }

    double& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }

    std::span<double> span() { return values; }
    std::span<const double> span() const { return values; }

    bool same_shape(const Image& other) const { return width == other.width && height == other.height; }
    bool all_finite() const;

    friend bool operator==(const Image&, const Image&) = default;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);

} // namespace rbpdip
