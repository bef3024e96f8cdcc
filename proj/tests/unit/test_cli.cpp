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

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "oracle.hpp"
#include "rbpdip/io.hpp"
#include "rbpdip/simulate.hpp"

using namespace rbpdip;
using namespace rbpdip::testing;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args)
{
    const std::string cmd = std::string(RBPDIP_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    Result r;
    if (!pipe)
        return r;
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
        r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// Value after "<key> " on its own line, or an empty string.
std::string field(const std::string& out, const std::string& key)
{
    const auto at = out.find("\n" + key + " ");
    const auto start = at == std::string::npos ? (out.rfind(key + " ", 0) == 0 ? 0 : std::string::npos) : at + 1;
    if (start == std::string::npos)
        return {};
    const auto from = start + key.size() + 1;
    return out.substr(from, out.find_first_of(" \n", from) - from);
}

std::string q(const std::filesystem::path& p)
{
    return "'" + p.string() + "'";
}

} // namespace

TEST(Cli, PhantomWritesPgm)
{
    TempDir dir("cli-phantom");
    const auto r = run("phantom --size 32 --out " + q(dir / "p.pgm"));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(load_image(dir / "p.pgm").width, 32);
    const auto r8 = run("phantom --size 16 --bits 8 --out " + q(dir / "p8.pgm"));
    ASSERT_EQ(r8.code, 0) << r8.out;
    EXPECT_EQ(read_text(dir / "p8.pgm").rfind("P5\n16 16\n255\n", 0), 0u);
    EXPECT_NE(run("phantom --size 16 --bits 12 --out " + q(dir / "x.pgm")).code, 0);
}

TEST(Cli, SinogramWritesContainerAndCsv)
{
    TempDir dir("cli-sino");
    const auto r = run("sinogram --phantom-size 16 --views 10 --out " + q(dir / "s.sino") + " --csv " +
                       q(dir / "s.csv"));
    ASSERT_EQ(r.code, 0) << r.out;
    const Sinogram s = load_sinogram(dir / "s.sino");
    EXPECT_EQ(s.geometry.views(), 10);
    EXPECT_EQ(read_text(dir / "s.csv").rfind("# rbpdip-sinogram v1\n", 0), 0u);
}

TEST(Cli, MbirReachesToleranceOnFullViews)
{
    TempDir dir("cli-mbir");
    ASSERT_EQ(run("sinogram --phantom-size 16 --views 60 --out " + q(dir / "s.sino")).code, 0);
    const auto r = run("reconstruct --method mbir --sino " + q(dir / "s.sino") +
                       " --iters 5000 --stop-tol 1e-3 --out " + q(dir / "r.pgm"));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(field(r.out, "stop"), "tolerance") << r.out;
    EXPECT_LE(std::stod(field(r.out, "residual_ratio")), 1e-3);
    EXPECT_TRUE(std::filesystem::exists(dir / "r.pgm"));
}

TEST(Cli, AdjointTestPasses)
{
    const auto r = run("adjoint-test --trials 5 --seed 2");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_LE(std::stod(field(r.out, "max discrepancy")), 1e-10);
}

TEST(Cli, GradcheckPasses)
{
    const auto r = run("gradcheck --samples 10");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("unet"), std::string::npos);
}

TEST(Cli, WedgeReportsFraction)
{
    TempDir dir("cli-wedge");
    ASSERT_EQ(run("phantom --size 32 --out " + q(dir / "p.pgm")).code, 0);
    const auto full = run("wedge --image " + q(dir / "p.pgm") + " --views 180 --range-deg 180");
    ASSERT_EQ(full.code, 0) << full.out;
    EXPECT_DOUBLE_EQ(std::stod(field(full.out, "unmeasured_fraction")), 0.0);
    const auto half = run("wedge --image " + q(dir / "p.pgm") + " --views 90 --range-deg 90");
    ASSERT_EQ(half.code, 0) << half.out;
    EXPECT_GT(std::stod(field(half.out, "unmeasured_fraction")), 0.0);
}

TEST(Cli, RejectsBadArguments)
{
    TempDir dir("cli-bad");
    const auto empty = run("sweep --grid 30 --methods '' --out " + q(dir / "s"));
    EXPECT_NE(empty.code, 0) << empty.out;
    EXPECT_FALSE(std::filesystem::exists(dir / "s" / "summary.csv"));
    EXPECT_NE(run("phantom --no-such-flag").code, 0);
    EXPECT_NE(run("").code, 0);
    std::ofstream(dir / "bad.cfg") << "this line has no equals sign\n";
    EXPECT_NE(run("phantom --config " + q(dir / "bad.cfg")).code, 0);
    std::ofstream(dir / "unknown.cfg") << "colour = blue\n";
    EXPECT_NE(run("phantom --config " + q(dir / "unknown.cfg")).code, 0);
    EXPECT_NE(run("reconstruct --sino " + q(dir / "missing.sino")).code, 0);
}

TEST(Cli, ConfigFileWithFlagOverride)
{
    TempDir dir("cli-config");
    std::ofstream(dir / "p.cfg") << "# phantom settings\nsize = 24\nbits = 8\n";
    const auto a = run("phantom --config " + q(dir / "p.cfg") + " --out " + q(dir / "a.pgm"));
    ASSERT_EQ(a.code, 0) << a.out;
    EXPECT_EQ(read_text(dir / "a.pgm").rfind("P5\n24 24\n255\n", 0), 0u);
    const auto b = run("phantom --config " + q(dir / "p.cfg") + " --size 20 --out " + q(dir / "b.pgm"));
    ASSERT_EQ(b.code, 0) << b.out;
    EXPECT_EQ(read_text(dir / "b.pgm").rfind("P5\n20 20\n255\n", 0), 0u);
}

TEST(Cli, GroundTruthDoesNotChangeOutput)
{
    TempDir dir("cli-gt");
    ASSERT_EQ(run("phantom --size 16 --out " + q(dir / "gt.pgm")).code, 0);
    ASSERT_EQ(run("sinogram --phantom-size 16 --views 20 --out " + q(dir / "s.sino")).code, 0);
    const std::string common = "reconstruct --method rbp-dip --depth 2 --base-channels 4 --max-channels 8 --iters 6 "
                               "--sino " + q(dir / "s.sino");
    const auto a = run(common + " --out " + q(dir / "a.pgm"));
    const auto b = run(common + " --gt " + q(dir / "gt.pgm") + " --out " + q(dir / "b.pgm"));
    ASSERT_EQ(a.code, 0) << a.out;
    ASSERT_EQ(b.code, 0) << b.out;
    EXPECT_EQ(read_text(dir / "a.pgm"), read_text(dir / "b.pgm"));
    EXPECT_TRUE(field(a.out, "snr_db").empty());
    EXPECT_FALSE(field(b.out, "snr_db").empty());
}

TEST(Cli, CheckpointResumeMatchesStraightRun)
{
    TempDir dir("cli-ckpt");
    ASSERT_EQ(run("sinogram --phantom-size 16 --views 20 --out " + q(dir / "s.sino")).code, 0);
    const std::string common = "reconstruct --method rbp-dip --depth 2 --base-channels 4 --max-channels 8 "
                               "--sino " + q(dir / "s.sino");
    ASSERT_EQ(run(common + " --iters 8 --out " + q(dir / "straight.pgm")).code, 0);
    const auto first = run(common + " --iters 4 --checkpoint-every 4 --checkpoint " + q(dir / "ck") + " --out " +
                           q(dir / "half.pgm"));
    ASSERT_EQ(first.code, 0) << first.out;
    const auto second = run(common + " --iters 8 --resume --checkpoint " + q(dir / "ck") + " --out " +
                            q(dir / "resumed.pgm"));
    ASSERT_EQ(second.code, 0) << second.out;
    EXPECT_EQ(read_text(dir / "straight.pgm"), read_text(dir / "resumed.pgm"));
}

TEST(Cli, SweepWritesBundle)
{
    TempDir dir("cli-sweep");
    const auto r = run("sweep --kind sparse-view --grid 20,40 --methods mbir,rbp-dip --phantom-size 16 --iters 4 "
                       "--depth 2 --base-channels 4 --max-channels 8 --stable --out " + q(dir / "s"));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(read_text(dir / "s" / "summary.csv").rfind("# rbpdip-summary v1\n", 0), 0u);
    EXPECT_TRUE(std::filesystem::exists(dir / "s" / "rbp-dip_40" / "curve.csv"));
}
