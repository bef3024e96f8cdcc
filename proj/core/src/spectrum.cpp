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
#include <complex>
#include <numbers>
#include <vector>

#include "rbpdip/error.hpp"
#include "rbpdip/projection.hpp"

namespace rbpdip {
namespace {

using cplx = std::complex<double>;

// Separable 2D DFT by direct summation; n is at most a few hundred here.
std::vector<cplx> dft2(const Image& img)
{
    const int n = img.width;
    std::vector<cplx> twiddle(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * k / n);

    std::vector<cplx> rows(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k < n; ++k) {
            cplx acc = 0.0;
            for (int c = 0; c < n; ++c)
                acc += img.at(r, c) * twiddle[(static_cast<long>(k) * c) % n];
            rows[static_cast<std::size_t>(r) * n + k] = acc;
        }

    std::vector<cplx> out(rows.size());
    for (int kx = 0; kx < n; ++kx)
        for (int ky = 0; ky < n; ++ky) {
            cplx acc = 0.0;
            for (int r = 0; r < n; ++r)
                acc += rows[static_cast<std::size_t>(r) * n + kx] * twiddle[(static_cast<long>(ky) * r) % n];
            out[static_cast<std::size_t>(ky) * n + kx] = acc;
        }
    return out;
}

// Distance between two directions modulo pi.
double line_angle_distance(double a, double b)
{
    double d = std::fmod(std::abs(a - b), std::numbers::pi);
    return std::min(d, std::numbers::pi - d);
}

} // namespace

double WedgeEnergy::unmeasured_fraction() const
{
    const double t = total();
    return t > 0.0 ? unmeasured / t : 0.0;
}

WedgeEnergy wedge_energy(const Image& image, const ParallelGeometry& geom, double band_deg)
{
    if (image.width != image.height)
        throw InvalidInput("wedge_energy: image must be square");
    if (!(band_deg >= 0.0))
        throw InvalidInput("wedge_energy: band must be non-negative");
    geom.validate();

    const int n = image.width;
    const auto spectrum = dft2(image);
    const double band = deg_to_rad(band_deg);

    WedgeEnergy e;
    for (int iy = 0; iy < n; ++iy) {
        const int ky = iy <= n / 2 ? iy : iy - n;
        for (int ix = 0; ix < n; ++ix) {
            const int kx = ix <= n / 2 ? ix : ix - n;
            if (kx == 0 && ky == 0)
                continue;
            // Column index is x and row index is y, matching the projector's
            // t = x cos(theta) + y sin(theta), so view theta samples this angle.
            const double phi = std::atan2(static_cast<double>(ky), static_cast<double>(kx));
            bool measured = false;
            for (double theta : geom.angles)
                if (line_angle_distance(phi, theta) <= band + 1e-12) {
                    measured = true;
                    break;
                }
            const double power = std::norm(spectrum[static_cast<std::size_t>(iy) * n + ix]);
            (measured ? e.measured : e.unmeasured) += power;
        }
    }
    return e;
}

} // namespace rbpdip
