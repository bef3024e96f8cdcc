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

#include <cmath>
#include <numbers>

#include "rbpdip/simulate.hpp"

namespace rbpdip {

Image rotate_image(const Image& image, double degrees)
{
    const int w = image.width;
    const int h = image.height;
    Image out(w, h);
    const double theta = degrees * std::numbers::pi / 180.0;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double cx = 0.5 * (w - 1);
    const double cy = 0.5 * (h - 1);

    auto pixel = [&](int row, int col) {
        return (row < 0 || row >= h || col < 0 || col >= w) ? 0.0 : image.at(row, col);
    };

    for (int row = 0; row < h; ++row)
        for (int col = 0; col < w; ++col) {
            // Inverse map with y pointing up, so positive angles turn the
            // content counter-clockwise on screen.
            const double dx = col - cx;
            const double dy = cy - row;
            const double sx = ct * dx + st * dy;
            const double sy = -st * dx + ct * dy;
            const double src_col = cx + sx;
            const double src_row = cy - sy;
            const double c0 = std::floor(src_col);
            const double r0 = std::floor(src_row);
            const double fx = src_col - c0;
            const double fy = src_row - r0;
            const int ic = static_cast<int>(c0);
            const int ir = static_cast<int>(r0);
            out.at(row, col) = (1 - fy) * ((1 - fx) * pixel(ir, ic) + fx * pixel(ir, ic + 1))
                               + fy * ((1 - fx) * pixel(ir + 1, ic) + fx * pixel(ir + 1, ic + 1));
        }
    return out;
}

} // namespace rbpdip
