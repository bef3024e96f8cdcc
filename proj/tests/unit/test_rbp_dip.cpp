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

#include <cmath>

#include "oracle.hpp"
#include "rbpdip/error.hpp"
#include "rbpdip/mbir.hpp"
#include "rbpdip/metrics.hpp"
#include "rbpdip/projection.hpp"
#include "rbpdip/rbp_dip.hpp"
#include "rbpdip/simulate.hpp"

using namespace rbpdip;
using rbpdip::testing::TempDir;

namespace {

RbpConfig tiny_config(ReconMode mode, int iters)
{
    RbpConfig c;
    c.mode = mode;
    c.max_iters = iters;
    c.unet.depth = 2;
    c.unet.base_channels = 4;
    c.unet.max_channels = 8;
    c.seed = 11;
    return c;
}

struct Problem {
    Image truth;
    ParallelGeometry geom;
    Sinogram sino;
};

Problem phantom_problem(int n, int views, double range = 180.0)
{
    Problem p;
    // The phantom needs 16 pixels a side; smaller problems use a random image.
    p.truth = n >= 16 ? shepp_logan(n, n) : rbpdip::testing::uniform_image(n, n, 8);
    p.geom = uniform_geometry(n, n, views, range);
    p.sino = forward_project(p.truth, p.geom);
    return p;
}

} // namespace

TEST(Beta, ClosedFormValues)
{
    EXPECT_NEAR(beta(4000, 1000, 4, 1e-3), 5e-4, 1e-18);
    EXPECT_NEAR(beta(0, 1000, 4, 1e-3), 1e-3 / (1.0 + std::exp(4.0)), 1e-18);
    EXPECT_NEAR(beta(0, 1000, 4, 1e-3), 1.7986e-5, 1e-9);
    EXPECT_NEAR(beta(24000, 1000, 4, 1e-3), 1e-3, 1e-11);
    // Strict growth holds until exp(-(n/n_s - n_c)) drops below one ulp of 1,
    // near n = 40000; after that the value sits at beta_max.
    double prev = -1.0;
    for (int n = 0; n < 60000; n += 50) {
        const double b = beta(n, 1000, 4, 1e-3);
        if (n <= 35000)
            EXPECT_GT(b, prev) << n;
        else
            EXPECT_GE(b, prev) << n;
        EXPECT_LE(b, 1e-3);
        prev = b;
    }
}

TEST(RbpDip, LoggedBetaIncreases)
{
    const auto p = phantom_problem(16, 10);
    auto cfg = tiny_config(ReconMode::rbp_dip, 30);
    cfg.n_s = 5.0;
    cfg.n_c = 2.0;
    const auto rec = rbp_dip_reconstruct(p.sino, p.geom, cfg);
    ASSERT_EQ(rec.run.records.size(), 30u);
    for (std::size_t k = 1; k < rec.run.records.size(); ++k) {
        EXPECT_GT(rec.run.records[k].beta, rec.run.records[k - 1].beta);
        EXPECT_LE(rec.run.records[k].beta, cfg.beta_max);
        EXPECT_EQ(rec.run.records[k].iteration, rec.run.records[k - 1].iteration + 1);
        EXPECT_TRUE(std::isfinite(rec.run.records[k].loss));
    }
}

TEST(RbpDip, ZeroNetworkAndUnitBetaIsSteepestDescent)
{
    const auto p = phantom_problem(8, 10);
    auto cfg = tiny_config(ReconMode::rbp_dip, 50);
    cfg.unet.depth = 1;
    cfg.beta_override = 1.0;
    cfg.freeze_network = true;
    UNetConfig uc = cfg.unet;
    uc.seed = cfg.seed;
    UNet net = unet_init(uc);
    net.zero_weights();
    RbpDipSolver solver(p.sino, p.geom, cfg, net);

    const auto ref = mbir_reconstruct(p.sino, p.geom, {50, 0.0});
    ASSERT_EQ(ref.run.records.size(), 50u);
    for (int k = 0; k < 50; ++k) {
        solver.step();
        // Replay the reference up to the same iteration.
        const auto partial = mbir_reconstruct(p.sino, p.geom, {k + 1, 0.0});
        ASSERT_EQ(solver.image().values, partial.image.values) << "iteration " << k;
        EXPECT_EQ(solver.history().records[k].alpha, ref.run.records[k].alpha);
    }
    EXPECT_EQ(solver.image().values, ref.image.values);
}

TEST(RbpDip, ZeroNetworkAndZeroBetaStaysAtZero)
{
    const auto p = phantom_problem(16, 12);
    auto cfg = tiny_config(ReconMode::rbp_dip, 40);
    cfg.beta_override = 0.0;
    cfg.freeze_network = true;
    UNetConfig uc = cfg.unet;
    uc.seed = cfg.seed;
    UNet net = unet_init(uc);
    net.zero_weights();
    const auto rec = RbpDipSolver(p.sino, p.geom, cfg, net).run();
    for (double v : rec.image.values)
        EXPECT_EQ(v, 0.0);
}

TEST(RbpDip, RbpIncrementIsNotOnTheTape)
{
    const auto p = phantom_problem(16, 12);
    RbpDipSolver solver(p.sino, p.geom, tiny_config(ReconMode::rbp_dip, 5));
    solver.step();
    solver.step();
    const auto& tape = solver.last_tape();
    ASSERT_GT(tape.size(), 0u);
    // The network input is a leaf: nothing on the tape produced it.
    const auto& first = tape.entries().front();
    EXPECT_EQ(first.op, "conv2d");
    EXPECT_FALSE(tape.produced(first.inputs.front()));
    EXPECT_FALSE(first.inputs.front().requires_grad());
    EXPECT_TRUE(std::ranges::equal(first.inputs.front().values(), solver.input().values));
    // The only addition is the outer skip c = z + G(z).
    int adds = 0;
    for (const auto& e : tape.entries())
        if (e.op == "add") {
            ++adds;
            EXPECT_TRUE(e.inputs.front().same(first.inputs.front()));
        }
    EXPECT_EQ(adds, 1);
}

TEST(RbpDip, DipModeHasFixedInputAndNoSkip)
{
    const auto p = phantom_problem(16, 12);
    RbpDipSolver solver(p.sino, p.geom, tiny_config(ReconMode::dip_fixed, 5));
    const Image z0 = solver.input();
    for (double v : z0.values) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 0.1);
    }
    solver.step();
    solver.step();
    EXPECT_EQ(solver.input().values, z0.values);
    for (const auto& e : solver.last_tape().entries())
        EXPECT_NE(e.op, "add");
    EXPECT_EQ(solver.history().records.back().beta, 0.0);
}

TEST(RbpDip, SameSeedSameRun)
{
    const auto p = phantom_problem(16, 12);
    for (auto mode : {ReconMode::rbp_dip, ReconMode::dip_fixed}) {
        const auto a = RbpDipSolver(p.sino, p.geom, tiny_config(mode, 25), &p.truth).run();
        const auto b = RbpDipSolver(p.sino, p.geom, tiny_config(mode, 25), &p.truth).run();
        EXPECT_EQ(a.image.values, b.image.values);
        ASSERT_EQ(a.run.records.size(), b.run.records.size());
        for (std::size_t k = 0; k < a.run.records.size(); ++k) {
            EXPECT_EQ(a.run.records[k].loss, b.run.records[k].loss);
            EXPECT_EQ(a.run.records[k].snr_db, b.run.records[k].snr_db);
        }
    }
}

TEST(RbpDip, GroundTruthOnlyAffectsLogs)
{
    const auto p = phantom_problem(16, 12);
    const auto with = rbp_dip_reconstruct(p.sino, p.geom, tiny_config(ReconMode::rbp_dip, 20), &p.truth);
    const auto without = rbp_dip_reconstruct(p.sino, p.geom, tiny_config(ReconMode::rbp_dip, 20));
    EXPECT_EQ(with.image.values, without.image.values);
    for (std::size_t k = 0; k < with.run.records.size(); ++k) {
        EXPECT_EQ(with.run.records[k].loss, without.run.records[k].loss);
        EXPECT_TRUE(std::isfinite(with.run.records[k].snr_db));
        EXPECT_TRUE(std::isnan(without.run.records[k].snr_db));
    }
}

TEST(RbpDip, CheckpointResumeMatchesStraightRun)
{
    TempDir dir("ckpt");
    const auto p = phantom_problem(16, 12);
    const auto straight = RbpDipSolver(p.sino, p.geom, tiny_config(ReconMode::rbp_dip, 20)).run();

    auto cfg = tiny_config(ReconMode::rbp_dip, 20);
    cfg.checkpoint_every = 10;
    cfg.checkpoint_path = dir / "state";
    RbpDipSolver first(p.sino, p.geom, cfg);
    for (int k = 0; k < 10; ++k)
        first.step();
    ASSERT_TRUE(std::filesystem::exists(dir / "state.unet"));
    ASSERT_TRUE(std::filesystem::exists(dir / "state.state"));

    RbpDipSolver resumed(p.sino, p.geom, tiny_config(ReconMode::rbp_dip, 20));
    resumed.load_checkpoint(dir / "state");
    EXPECT_EQ(resumed.iteration(), 10);
    const auto rec = resumed.run();
    EXPECT_EQ(rec.image.values, straight.image.values);
    ASSERT_EQ(rec.run.records.size(), 10u);
    EXPECT_EQ(rec.run.records.back().loss, straight.run.records.back().loss);
    EXPECT_EQ(rec.run.records.front().iteration, 10);

    RbpDipSolver wrong_mode(p.sino, p.geom, tiny_config(ReconMode::dip_fixed, 20));
    EXPECT_THROW(wrong_mode.load_checkpoint(dir / "state"), IoError);
    auto other_seed = tiny_config(ReconMode::rbp_dip, 20);
    other_seed.seed = 12;
    RbpDipSolver wrong_seed(p.sino, p.geom, other_seed);
    EXPECT_THROW(wrong_seed.load_checkpoint(dir / "state"), IoError);
}

TEST(RbpDip, DipLearnsToSuppressOutputOnZeroData)
{
    const auto g = uniform_geometry(16, 16, 12);
    auto cfg = tiny_config(ReconMode::dip_fixed, 200);
    cfg.unet.head_init_scale = 1.0;
    RbpDipSolver solver(Sinogram(g), g, cfg);
    solver.step();
    const double first = norm2(solver.image().values);
    while (solver.iteration() < 200)
        solver.step();
    EXPECT_GT(first, 0.0);
    EXPECT_LT(norm2(solver.image().values), first);
}

TEST(RbpDip, NonFiniteLossAborts)
{
    const auto p = phantom_problem(16, 12);
    auto cfg = tiny_config(ReconMode::rbp_dip, 10);
    cfg.beta_override = 1e308;
    cfg.unet.head_init_scale = 1.0;
    RbpDipSolver solver(p.sino, p.geom, cfg);
    EXPECT_THROW(
        {
            for (int k = 0; k < 5; ++k)
                solver.step();
        },
        NumericalError);
}

TEST(RbpDip, ConfigValidation)
{
    const auto p = phantom_problem(16, 12);
    auto bad = [&](auto mutate) {
        auto cfg = tiny_config(ReconMode::rbp_dip, 5);
        mutate(cfg);
        EXPECT_THROW(RbpDipSolver(p.sino, p.geom, cfg), ConfigError);
    };
    bad([](RbpConfig& c) { c.n_s = 0.0; });
    bad([](RbpConfig& c) { c.beta_max = -1.0; });
    bad([](RbpConfig& c) { c.max_iters = 0; });
    bad([](RbpConfig& c) { c.huber_delta = 0.0; });
    bad([](RbpConfig& c) { c.checkpoint_every = 3; });
    bad([](RbpConfig& c) { c.unet.depth = 5; });
    EXPECT_THROW(dip_reconstruct(p.sino, p.geom, tiny_config(ReconMode::rbp_dip, 5)), ConfigError);
    EXPECT_EQ(parse_recon_mode("dip"), ReconMode::dip_fixed);
    EXPECT_THROW(parse_recon_mode("tv"), ConfigError);
}

TEST(RbpDip, DipFillsTheUnmeasuredWedge)
{
    // Limited angle 0..90 degrees: MBIR from zero cannot touch the missing
    // wedge, a generator-driven image does.
    const auto p = phantom_problem(64, 90, 90.0);
    const auto mbir = mbir_reconstruct(p.sino, p.geom, {300, 0.0});
    RbpConfig cfg;
    cfg.mode = ReconMode::dip_fixed;
    cfg.max_iters = 300;
    const auto dip = dip_reconstruct(p.sino, p.geom, cfg);
    EXPECT_GT(wedge_energy(dip.image, p.geom, 0.5).unmeasured_fraction(),
              wedge_energy(mbir.image, p.geom, 0.5).unmeasured_fraction());
}

TEST(RbpDip, SmoothedLossSettlesAfterWarmup)
{
    const auto p = phantom_problem(64, 30);
    RbpConfig cfg;
    cfg.max_iters = 1500;
    const auto rec = rbp_dip_reconstruct(p.sino, p.geom, cfg);
    std::vector<double> windows;
    for (int start = 500; start + 100 <= 1500; start += 100) {
        double acc = 0.0;
        for (int k = start; k < start + 100; ++k)
            acc += rec.run.records[k].loss;
        windows.push_back(acc / 100);
    }
    int violations = 0;
    for (std::size_t i = 1; i < windows.size(); ++i)
        violations += windows[i] > windows[i - 1];
    EXPECT_LE(violations, static_cast<int>(0.05 * (windows.size() - 1)));
}
