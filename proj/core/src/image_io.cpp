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
#include <cctype>
#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "rbpdip/error.hpp"
#include "rbpdip/io.hpp"

namespace rbpdip {
namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::vector<unsigned char>& bytes, std::size_t& pos, const std::string& path)
{
    for (;;) {
        while (pos < bytes.size() && std::isspace(bytes[pos]))
            ++pos;
        if (pos < bytes.size() && bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n')
                ++pos;
            continue;
        }
        break;
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#')
        tok.push_back(static_cast<char>(bytes[pos++]));
    if (tok.empty())
        throw IoError(path + ": truncated PGM header");
    return tok;
}

int parse_header_int(const std::string& tok, const std::string& path, const char* field)
{
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw IoError(path + ": malformed PGM " + field + " '" + tok + "'");
    try {
        return std::stoi(tok);
    } catch (const std::exception&) {
        throw IoError(path + ": PGM " + field + " out of range");
    }
}

} // namespace

Image load_image(const std::filesystem::path& path)
{
    const std::string name = path.string();
    const auto bytes = detail::read_file(path);
    if (bytes.size() < 2 || bytes[0] != 'P')
        throw IoError(name + ": not a PGM file (unsupported format)");
    if (bytes[1] != '5')
        throw IoError(name + ": only binary P5 PGM is supported, found P" + std::string(1, static_cast<char>(bytes[1])));
    std::size_t pos = 2;
    const int w = parse_header_int(next_token(bytes, pos, name), name, "width");
    const int h = parse_header_int(next_token(bytes, pos, name), name, "height");
    const int maxval = parse_header_int(next_token(bytes, pos, name), name, "maxval");
    if (w <= 0 || h <= 0)
        throw IoError(name + ": PGM dimensions must be positive");
    if (maxval <= 0 || maxval > 65535)
        throw IoError(name + ": PGM maxval must lie in [1, 65535]");
    if (pos >= bytes.size() || !std::isspace(bytes[pos]))
        throw IoError(name + ": malformed PGM header");
    ++pos;

    const std::size_t bpp = maxval > 255 ? 2 : 1;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (bytes.size() - pos < n * bpp)
        throw IoError(name + ": PGM pixel data truncated");

    Image img(w, h);
    for (std::size_t i = 0; i < n; ++i) {
        unsigned v = bpp == 2 ? (unsigned{bytes[pos + 2 * i]} << 8) | bytes[pos + 2 * i + 1] : bytes[pos + i];
        if (v > static_cast<unsigned>(maxval))
            throw IoError(name + ": PGM sample exceeds maxval");
        img.values[i] = static_cast<double>(v) / maxval;
    }
    return img;
}

void save_image(const Image& image, const std::filesystem::path& path, int bit_depth)
{
    if (bit_depth != 8 && bit_depth != 16)
        throw InvalidInput("save_image: bit depth must be 8 or 16");
    if (image.empty())
        throw InvalidInput("save_image: empty image");
    const unsigned maxval = bit_depth == 16 ? 65535u : 255u;
    const std::string header
        = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n" + std::to_string(maxval) + "\n";
    std::vector<unsigned char> out(header.begin(), header.end());
    out.reserve(out.size() + image.size() * (bit_depth / 8));
    for (double v : image.values) {
        const double clamped = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
        const auto q = static_cast<unsigned>(std::lround(clamped * maxval));
        if (bit_depth == 16) {
            out.push_back(static_cast<unsigned char>(q >> 8));
            out.push_back(static_cast<unsigned char>(q & 0xFF));
        } else {
            out.push_back(static_cast<unsigned char>(q));
        }
    }
    detail::write_file(path, out);
}

void save_image_scaled(const Image& image, const std::filesystem::path& path, double lo, double hi)
{
    Image scaled = image;
    const double span = hi > lo ? hi - lo : 1.0;
    for (double& v : scaled.values)
        v = (v - lo) / span;
    save_image(scaled, path, 16);
}

} // namespace rbpdip
