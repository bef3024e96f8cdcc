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

#include <filesystem>

#include "rbpdip/image.hpp"
#include "rbpdip/sinogram.hpp"

namespace rbpdip {

/// Reads a binary (P5) PGM with maxval up to 65535 and maps it linearly to
/// [0, 1].
Image load_image(const std::filesystem::path& path);

/// Writes a binary PGM. Values are clamped to [0, 1] and quantized to
/// 8 or 16 bits.
void save_image(const Image& image, const std::filesystem::path& path, int bit_depth = 16);

/// Writes `image` to PGM after an affine stretch of [lo, hi] onto [0, 1].
void save_image_scaled(const Image& image, const std::filesystem::path& path, double lo, double hi);

/// Little-endian sinogram container:
///   char[8] "RBPDSINO", u32 version (1), u32 views, u32 detectors,
///   f64 detector_spacing, u32 image_width, u32 image_height,
///   f64 angles[views], u8 has_noise, f64 i0, u64 seed,
///   f64 values[views * detectors]   (row-major, one row per view)
void save_sinogram(const Sinogram& sino, const std::filesystem::path& path);
Sinogram load_sinogram(const std::filesystem::path& path);

/// CSV export: a "# rbpdip-sinogram v1" comment line, a header
/// "view,angle_rad,d0,...", then one row per view.
void save_sinogram_csv(const Sinogram& sino, const std::filesystem::path& path);

} // namespace rbpdip
