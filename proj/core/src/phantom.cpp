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

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "rbpdip/error.hpp"
#include "rbpdip/simulate.hpp"

namespace rbpdip {
namespace {

constexpr std::array<Ellipse, 10> kSheppLogan{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
}};

} // namespace

std::span<const Ellipse> shepp_logan_ellipses()
{
    return kSheppLogan;
}

double shepp_logan_value(double x, double y)
{
    double v = 0.0;
    for (const Ellipse& e : kSheppLogan) {
        const double phi = e.angle_deg * std::numbers::pi / 180.0;
        const double dx = x - e.center_x;
        const double dy = y - e.center_y;
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double w = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((u * u) / (e.semi_x * e.semi_x) + (w * w) / (e.semi_y * e.semi_y) <= 1.0)
            v += e.intensity;
    }
    return std::clamp(v, 0.0, 1.0);
}

double phantom_x(int col, int width)
{
    return (2.0 * col + 1.0) / width - 1.0;
}

double phantom_y(int row, int height)
{
    return 1.0 - (2.0 * row + 1.0) / height;
}

Image shepp_logan(int width, int height)
{
    if (width < 16 || height < 16)
        throw InvalidInput("shepp_logan: dimensions must be at least 16");
    Image img(width, height);
    for (int row = 0; row < height; ++row)
        for (int col = 0; col < width; ++col)
            img.at(row, col) = shepp_logan_value(phantom_x(col, width), phantom_y(row, height));
    return img;
}

} // namespace rbpdip
