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
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "rbpdip/geometry.hpp"
#include "rbpdip/image.hpp"

namespace rbpdip::testing {

/// Row-major dense matrix, rows x cols.
struct Dense {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
};

/// System matrix built pixel by pixel: entry (ray, pixel) is the linear
/// detector kernel evaluated at the distance between the pixel centre's
/// projection and the ray offset. No ray walking involved.
Dense dense_system_matrix(const ParallelGeometry& geom);

std::vector<double> matvec(const Dense& m, const std::vector<double>& x);
std::vector<double> matvec_transpose(const Dense& m, const std::vector<double>& y);
Dense transpose_times_self(const Dense& m);

std::vector<double> uniform_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0);
Image uniform_image(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0);

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b);
double plain_dot(const std::vector<double>& a, const std::vector<double>& b);

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string read_text(const std::filesystem::path& path);

} // namespace rbpdip::testing
