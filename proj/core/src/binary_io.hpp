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

// Little-endian helpers shared by the checkpoint and sinogram containers.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "rbpdip/error.hpp"

namespace rbpdip::detail {

template <typename T>
void put_le(std::vector<unsigned char>& out, T value)
{
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(std::begin(bytes), std::end(bytes));
    out.insert(out.end(), std::begin(bytes), std::end(bytes));
}

inline void put_magic(std::vector<unsigned char>& out, std::string_view magic)
{
    out.insert(out.end(), magic.begin(), magic.end());
}

class ByteReader {
public:
    ByteReader(const unsigned char*& cursor, const unsigned char* end, std::string what)
        : cur_(cursor), end_(end), what_(std::move(what))
    {
    }

    template <typename T>
    T get()
    {
        need(sizeof(T));
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, cur_, sizeof(T));
        cur_ += sizeof(T);
        if constexpr (std::endian::native == std::endian::big)
            std::reverse(std::begin(bytes), std::end(bytes));
        T value;
        std::memcpy(&value, bytes, sizeof(T));
        return value;
    }

    void expect_magic(std::string_view magic)
    {
        need(magic.size());
        if (std::memcmp(cur_, magic.data(), magic.size()) != 0)
            throw IoError(what_ + ": bad magic, expected \"" + std::string(magic) + "\"");
        cur_ += magic.size();
    }

    void need(std::size_t n) const
    {
        if (static_cast<std::size_t>(end_ - cur_) < n)
            throw IoError(what_ + ": truncated data");
    }

    std::size_t remaining() const { return static_cast<std::size_t>(end_ - cur_); }

private:
    const unsigned char*& cur_;
    const unsigned char* end_;
    std::string what_;
};

inline std::vector<unsigned char> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

inline void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("short write to " + path.string());
}

} // namespace rbpdip::detail
