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

#include "oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace rbpdip::testing {

Dense dense_system_matrix(const ParallelGeometry& geom)
{
    const int w = geom.image_width;
    const int h = geom.image_height;
    const int d = geom.detector_count;
    const double du = geom.detector_spacing;
    Dense m{geom.views() * d, w * h, {}};
    m.a.assign(static_cast<std::size_t>(m.rows) * m.cols, 0.0);
    for (int v = 0; v < geom.views(); ++v) {
        const double ct = std::cos(geom.angles[v]);
        const double st = std::sin(geom.angles[v]);
        for (int k = 0; k < d; ++k) {
            const double tk = (k - (d - 1) / 2.0) * du;
            for (int row = 0; row < h; ++row) {
                for (int col = 0; col < w; ++col) {
                    const double x = col - (w - 1) / 2.0;
                    const double y = row - (h - 1) / 2.0;
                    const double dist = std::abs(tk - (x * ct + y * st));
                    if (dist < du)
                        m(v * d + k, row * w + col) = (1.0 - dist / du) / du;
                }
            }
        }
    }
    return m;
}

std::vector<double> matvec(const Dense& m, const std::vector<double>& x)
{
    std::vector<double> y(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j)
            y[i] += m(i, j) * x[j];
    return y;
}

std::vector<double> matvec_transpose(const Dense& m, const std::vector<double>& y)
{
    std::vector<double> x(m.cols, 0.0);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j)
            x[j] += m(i, j) * y[i];
    return x;
}

Dense transpose_times_self(const Dense& m)
{
    Dense out{m.cols, m.cols, std::vector<double>(static_cast<std::size_t>(m.cols) * m.cols, 0.0)};
    for (int i = 0; i < m.cols; ++i)
        for (int j = 0; j < m.cols; ++j) {
            double acc = 0.0;
            for (int k = 0; k < m.rows; ++k)
                acc += m(k, i) * m(k, j);
            out(i, j) = acc;
        }
    return out;
}

std::vector<double> uniform_vector(std::size_t n, std::uint64_t seed, double lo, double hi)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v)
        x = dist(rng);
    return v;
}

Image uniform_image(int w, int h, std::uint64_t seed, double lo, double hi)
{
    return Image(w, h, uniform_vector(static_cast<std::size_t>(w) * h, seed, lo, hi));
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double scale = 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
        diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

double plain_dot(const std::vector<double>& a, const std::vector<double>& b)
{
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += static_cast<long double>(a[i]) * b[i];
    return static_cast<double>(acc);
}

TempDir::TempDir(const std::string& tag)
{
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path()
            / ("rbpdip-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace rbpdip::testing
