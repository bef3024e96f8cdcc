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

#include <fstream>
#include <iomanip>
#include <string>

#include "binary_io.hpp"
#include "rbpdip/error.hpp"
#include "rbpdip/io.hpp"

namespace rbpdip {
namespace {
constexpr std::string_view kSinoMagic = "RBPDSINO";
constexpr std::uint32_t kSinoVersion = 1;
} // namespace

void save_sinogram(const Sinogram& sino, const std::filesystem::path& path)
{
    using detail::put_le;
    sino.validate();
    const auto& g = sino.geometry;
    std::vector<unsigned char> out;
    detail::put_magic(out, kSinoMagic);
    put_le<std::uint32_t>(out, kSinoVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.views()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.detector_count));
    put_le<double>(out, g.detector_spacing);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.image_width));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.image_height));
    for (double a : g.angles)
        put_le<double>(out, a);
    put_le<std::uint8_t>(out, sino.noise ? 1 : 0);
    put_le<double>(out, sino.noise ? sino.noise->i0 : 0.0);
    put_le<std::uint64_t>(out, sino.noise ? sino.noise->seed : 0);
    for (double v : sino.values)
        put_le<double>(out, v);
    detail::write_file(path, out);
}

Sinogram load_sinogram(const std::filesystem::path& path)
{
    const auto bytes = detail::read_file(path);
    const unsigned char* cur = bytes.data();
    detail::ByteReader in(cur, bytes.data() + bytes.size(), path.string());
    in.expect_magic(kSinoMagic);
    const auto version = in.get<std::uint32_t>();
    if (version != kSinoVersion)
        throw IoError(path.string() + ": unsupported sinogram version " + std::to_string(version));
    ParallelGeometry g;
    const auto views = in.get<std::uint32_t>();
    g.detector_count = static_cast<int>(in.get<std::uint32_t>());
    g.detector_spacing = in.get<double>();
    g.image_width = static_cast<int>(in.get<std::uint32_t>());
    g.image_height = static_cast<int>(in.get<std::uint32_t>());
    in.need(static_cast<std::size_t>(views) * sizeof(double));
    g.angles.resize(views);
    for (double& a : g.angles)
        a = in.get<double>();
    const bool has_noise = in.get<std::uint8_t>() != 0;
    NoiseSpec spec;
    spec.i0 = in.get<double>();
    spec.seed = in.get<std::uint64_t>();

    Sinogram sino;
    sino.geometry = std::move(g);
    const std::size_t n = sino.geometry.sinogram_size();
    if (in.remaining() != n * sizeof(double))
        throw IoError(path.string() + ": sinogram payload size does not match header");
    sino.values.resize(n);
    for (double& v : sino.values)
        v = in.get<double>();
    if (has_noise)
        sino.noise = spec;
    try {
        sino.validate();
    } catch (const InvalidInput& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return sino;
}

void save_sinogram_csv(const Sinogram& sino, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "# rbpdip-sinogram v1\n";
    out << "view,angle_rad";
    for (int d = 0; d < sino.detectors(); ++d)
        out << ",d" << d;
    out << '\n' << std::setprecision(17);
    for (int v = 0; v < sino.views(); ++v) {
        out << v << ',' << sino.geometry.angles[v];
        for (double x : sino.row(v))
            out << ',' << x;
        out << '\n';
    }
    if (!out)
        throw IoError("short write to " + path.string());
}

} // namespace rbpdip
