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

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracle.hpp"
#include "rbpdip/error.hpp"
#include "rbpdip/io.hpp"
#include "rbpdip/metrics.hpp"
#include "rbpdip/simulate.hpp"
#include "rbpdip/sweep.hpp"

using namespace rbpdip;
using namespace rbpdip::testing;

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

double snr_oracle(const std::vector<double>& rec, const std::vector<double>& gt)
{
    big num = 0, den = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        num += big(gt[i]) * big(gt[i]);
        const big d = big(rec[i]) - big(gt[i]);
        den += d * d;
    }
    return static_cast<double>(10 * boost::multiprecision::log10(num / den));
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p, std::string* comment = nullptr)
{
    std::istringstream in(read_text(p));
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            if (comment)
                *comment = line;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

SweepSpec quick_spec(const std::filesystem::path& out)
{
    SweepSpec s;
    s.phantom_size = 16;
    s.grid = {30, 60, 90, 120, 150, 180};
    s.methods = {Method::mbir, Method::rbp_dip};
    s.mbir.max_iters = 20;
    s.mbir.stop_tol = 0.0;
    s.rbp.max_iters = 5;
    s.rbp.unet.depth = 2;
    s.rbp.unet.base_channels = 4;
    s.rbp.unet.max_channels = 8;
    s.output_dir = out;
    s.seed = 3;
    s.stable = true;
    return s;
}

} // namespace

TEST(Snr, TrivialCases)
{
    const Image gt = uniform_image(8, 8, 1, 0.1, 1.0);
    EXPECT_NEAR(snr_db(Image(8, 8), gt), 0.0, 1e-12);
    Image scaled = gt;
    for (double& v : scaled.values)
        v *= 1.1;
    EXPECT_NEAR(snr_db(scaled, gt), 20.0, 1e-9);
    EXPECT_EQ(snr_db(gt, gt), std::numeric_limits<double>::infinity());
    EXPECT_THROW(snr_db(gt, Image(8, 8)), InvalidInput);
    EXPECT_THROW(snr_db(Image(4, 4), gt), InvalidInput);
}

TEST(Snr, MatchesHighPrecisionOracle)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto gt = uniform_vector(500, seed, -1.0, 1.0);
        auto rec = gt;
        const auto noise = uniform_vector(500, seed + 100, -1.0, 1.0);
        const double amp = std::pow(10.0, -static_cast<double>(seed % 7));
        for (std::size_t i = 0; i < rec.size(); ++i)
            rec[i] += amp * noise[i];
        EXPECT_NEAR(snr_db(rec, gt), snr_oracle(rec, gt), 1e-12) << seed;
    }
}

TEST(Sweep, SparseViewGridGivesTwelveRows)
{
    TempDir dir("sweep12");
    const auto spec = quick_spec(dir.path());
    const auto report = run_sweep(spec);
    ASSERT_EQ(report.rows.size(), 12u);
    std::string comment;
    const auto rows = read_csv(report.summary_path, &comment);
    EXPECT_EQ(comment, "# rbpdip-summary v1");
    ASSERT_EQ(rows.size(), 13u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"method", "grid_value", "status", "snr_db", "final_loss",
                                                 "unmeasured_fraction", "iterations"}));
    for (std::size_t i = 0; i < 12; ++i) {
        const auto& r = rows[i + 1];
        EXPECT_EQ(r[0], i % 2 == 0 ? "mbir" : "rbp-dip");
        EXPECT_EQ(r[1], format_grid_value(spec.grid[i / 2]));
        EXPECT_EQ(r[2], "ok");
        EXPECT_EQ(r[6], i % 2 == 0 ? "20" : "5");
        const auto run = dir.path() / run_name(report.rows[i].method, report.rows[i].grid_value);
        EXPECT_TRUE(std::filesystem::exists(run / "recon.pgm"));
        EXPECT_TRUE(std::filesystem::exists(run / "curve.csv"));
    }
    for (double g : spec.grid)
        EXPECT_TRUE(std::filesystem::exists(dir.path() / ("gt_" + format_grid_value(g) + ".pgm")));
}

TEST(Sweep, LimitedAngleGridGivesEightRows)
{
    TempDir dir("sweep8");
    auto spec = quick_spec(dir.path());
    spec.kind = SweepKind::limited_angle;
    spec.grid = {90, 120, 150, 165};
    EXPECT_EQ(run_sweep(spec).rows.size(), 8u);
}

TEST(Sweep, CurveCsvSchema)
{
    TempDir dir("curve");
    auto spec = quick_spec(dir.path());
    spec.grid = {30};
    spec.methods = {Method::dip_fixed};
    run_sweep(spec);
    std::string comment;
    const auto rows = read_csv(dir.path() / "dip-fixed_30" / "curve.csv", &comment);
    EXPECT_EQ(comment, "# rbpdip-curve v1");
    EXPECT_EQ(rows[0], (std::vector<std::string>{"iteration", "loss", "log_loss", "residual_norm", "data_misfit",
                                                 "alpha", "beta", "snr_db"}));
    ASSERT_EQ(rows.size(), 6u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(std::stoi(rows[i][0]), static_cast<int>(i - 1));
        EXPECT_DOUBLE_EQ(std::stod(rows[i][2]), std::log(std::stod(rows[i][1])));
        EXPECT_TRUE(std::isfinite(std::stod(rows[i][7])));
    }
}

TEST(Sweep, EmptyListsAreRejected)
{
    TempDir dir("empty");
    auto spec = quick_spec(dir.path());
    spec.methods.clear();
    EXPECT_THROW(run_sweep(spec), ConfigError);
    spec = quick_spec(dir.path());
    spec.grid.clear();
    EXPECT_THROW(run_sweep(spec), ConfigError);
    spec = quick_spec(dir.path());
    spec.methods = {Method::mbir, Method::mbir};
    EXPECT_THROW(spec.validate(), ConfigError);
    spec = quick_spec(dir.path());
    spec.grid = {30.5};
    EXPECT_THROW(spec.validate(), ConfigError);
    EXPECT_THROW(parse_method("fbp"), ConfigError);
    EXPECT_THROW(parse_sweep_kind("dense"), ConfigError);
}

TEST(Sweep, StableRerunIsByteIdenticalAcrossJobCounts)
{
    TempDir a("stable-a"), b("stable-b");
    auto spec = quick_spec(a.path());
    spec.grid = {30, 60};
    spec.methods = {Method::mbir, Method::dip_fixed, Method::rbp_dip};
    run_sweep(spec);
    spec.output_dir = b.path();
    spec.jobs = 3;
    run_sweep(spec);
    EXPECT_EQ(read_text(a / "summary.csv"), read_text(b / "summary.csv"));
    EXPECT_EQ(read_text(a / "rbp-dip_60" / "curve.csv"), read_text(b / "rbp-dip_60" / "curve.csv"));
    EXPECT_EQ(read_text(a / "rbp-dip_60" / "recon.pgm"), read_text(b / "rbp-dip_60" / "recon.pgm"));
}

TEST(Sweep, WallTimeOnlyWithoutStable)
{
    TempDir dir("wall");
    auto spec = quick_spec(dir.path());
    spec.grid = {30};
    spec.methods = {Method::mbir};
    spec.stable = false;
    run_sweep(spec);
    const auto rows = read_csv(dir / "summary.csv");
    EXPECT_EQ(rows[0].back(), "wall_time_s");
    EXPECT_GE(std::stod(rows[1].back()), 0.0);
}

TEST(Sweep, SnrRecomputableFromEmittedImages)
{
    TempDir dir("recompute");
    auto spec = quick_spec(dir.path());
    spec.phantom_size = 32;
    spec.grid = {60, 180};
    spec.methods = {Method::mbir};
    spec.mbir.max_iters = 200;
    const auto report = run_sweep(spec);
    for (const auto& row : report.rows) {
        const Image rec = load_image(row.run_dir / "recon.pgm");
        const Image gt = load_image(dir / ("gt_" + format_grid_value(row.grid_value) + ".pgm"));
        EXPECT_EQ(snr_db(rec, gt), row.snr_db) << format_grid_value(row.grid_value);
    }
}

TEST(Sweep, FailingRunIsRecordedAndSweepContinues)
{
    TempDir dir("fail");
    auto spec = quick_spec(dir.path());
    spec.phantom_size = 24; // not divisible by 2^4
    spec.rbp.unet.depth = 4;
    spec.grid = {30};
    const auto report = run_sweep(spec);
    ASSERT_EQ(report.rows.size(), 2u);
    EXPECT_EQ(report.rows[0].status, "ok");
    EXPECT_EQ(report.rows[1].status, "E_CONFIG");
    EXPECT_TRUE(std::filesystem::exists(report.rows[1].run_dir / "error.txt"));
    const auto rows = read_csv(report.summary_path);
    EXPECT_EQ(rows[2][2], "E_CONFIG");
    EXPECT_EQ(rows[2][3], "nan");
}

TEST(Sweep, PerturbationRotatesGroundTruth)
{
    TempDir dir("rot");
    auto spec = quick_spec(dir.path());
    spec.kind = SweepKind::perturbation;
    spec.grid = {0, 30};
    spec.methods = {Method::mbir};
    run_sweep(spec);
    const Image g0 = load_image(dir / "gt_0.pgm");
    const Image g30 = load_image(dir / "gt_30.pgm");
    const Image expect = rotate_image(shepp_logan(16, 16), 30.0);
    save_image(shepp_logan(16, 16), dir / "ref.pgm", 16);
    EXPECT_EQ(g0, load_image(dir / "ref.pgm"));
    for (std::size_t i = 0; i < g30.size(); ++i)
        EXPECT_NEAR(g30.values[i], std::clamp(expect.values[i], 0.0, 1.0), 1.0 / 65535);
}

TEST(Sweep, LowDoseAddsNoiseThatShrinksWithDose)
{
    TempDir dir("dose");
    auto spec = quick_spec(dir.path());
    spec.kind = SweepKind::low_dose;
    spec.views = 90;
    spec.grid = {1e2, 1e5};
    spec.methods = {Method::mbir};
    spec.mbir.max_iters = 100;
    const auto report = run_sweep(spec);
    ASSERT_EQ(report.rows.size(), 2u);
    EXPECT_LT(report.rows[0].snr_db, report.rows[1].snr_db);
}
