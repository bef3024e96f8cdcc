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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rbpdip/image.hpp"
#include "rbpdip/mbir.hpp"
#include "rbpdip/rbp_dip.hpp"
#include "rbpdip/recon_run.hpp"

namespace rbpdip {

enum class SweepKind {
    sparse_view,   // grid: view counts over [0, 180)
    limited_angle, // grid: angular ranges in degrees, one view per degree
    low_dose,      // grid: blank measurements I0
    perturbation,  // grid: phantom rotations in degrees
};

enum class Method {
    mbir,
    dip_fixed,
    rbp_dip,
};

std::string_view to_string(SweepKind kind);
SweepKind parse_sweep_kind(std::string_view text);
std::string_view to_string(Method method);
/// Accepts "mbir", "dip-fixed" (or "dip") and "rbp-dip".
Method parse_method(std::string_view text);

struct SweepSpec {
    SweepKind kind = SweepKind::sparse_view;
    std::vector<double> grid;
    std::vector<Method> methods;

    // Ground truth: the image at image_path, or a Shepp-Logan phantom of
    // phantom_size x phantom_size when the path is empty.
    std::filesystem::path image_path;
    int phantom_size = 64;

    // Geometry for the axes the grid does not vary.
    int views = 180;
    double range_deg = 180.0;
    int detector_count = 0; // 0: cover the image at every angle
    double detector_spacing = kDefaultDetectorSpacing;

    // Low-dose runs scale the clean sinogram so its largest line integral is
    // this value before drawing counts, then undo the scale.
    double peak_line_integral = 4.0;

    MbirOptions mbir;
    // Shared by dip-fixed and rbp-dip; the mode is set per method.
    RbpConfig rbp;

    double wedge_band_deg = 0.5;
    std::filesystem::path output_dir = "sweep-out";
    std::uint64_t seed = 0;
    // Omit wall-clock columns so reruns are byte-identical.
    bool stable = false;
    int jobs = 1;

    // Throws ConfigError.
    void validate() const;
};

struct SweepRow {
    Method method = Method::mbir;
    double grid_value = 0.0;
    // "ok" or an error code (E_INPUT, E_CONFIG, E_IO, E_NUMERICAL, E_INTERNAL).
    std::string status = "ok";
    std::string message;
    double snr_db = 0.0;
    double final_loss = 0.0;
    double unmeasured_fraction = 0.0;
    int iterations = 0;
    double wall_time_s = 0.0;
    std::filesystem::path run_dir;
};

struct SweepReport {
    std::vector<SweepRow> rows; // grid-major, methods in spec order
    std::filesystem::path summary_path;
};

/// Runs every grid point x method and writes, under output_dir:
///   summary.csv, gt_<grid>.pgm and one directory per run holding
///   recon.pgm and curve.csv. A failing run becomes a row with an error code.
SweepReport run_sweep(const SweepSpec& spec);

/// Directory name of one run, e.g. "rbp-dip_30".
std::string run_name(Method method, double grid_value);
std::string format_grid_value(double value);

void write_curve_csv(const ReconRun& run, const std::filesystem::path& path);
void write_summary_csv(const std::vector<SweepRow>& rows, bool stable, const std::filesystem::path& path);

} // namespace rbpdip
