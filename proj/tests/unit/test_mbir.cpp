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
#include "rbpdip/simulate.hpp"

using namespace rbpdip;
using namespace rbpdip::testing;

TEST(StepSize, IdentityOperatorGivesOne)
{
    const NormalOperator identity = [](std::span<const double> in, std::span<double> out) {
        std::copy(in.begin(), in.end(), out.begin());
    };
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto r = uniform_vector(40, seed);
        const StepSize s = sd_step_size(r, identity);
        EXPECT_EQ(s.status, StepStatus::ok);
        EXPECT_DOUBLE_EQ(s.alpha, 1.0);
    }
}

TEST(StepSize, ScaledIdentityGivesQuarter)
{
    const NormalOperator four = [](std::span<const double> in, std::span<double> out) {
        for (std::size_t i = 0; i < in.size(); ++i)
            out[i] = 4.0 * in[i];
    };
    const auto r = uniform_vector(33, 2);
    EXPECT_DOUBLE_EQ(sd_step_size(r, four).alpha, 0.25);
}

TEST(StepSize, ConvergedAndNullSpaceSignals)
{
    const NormalOperator zero = [](std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    const std::vector<double> r0(9, 0.0);
    EXPECT_EQ(sd_step_size(r0, zero).status, StepStatus::converged);
    const auto r = uniform_vector(9, 1);
    EXPECT_EQ(sd_step_size(r, zero).status, StepStatus::null_space);
}

TEST(StepSize, MatchesDenseOracle)
{
    const auto g = uniform_geometry(8, 8, 9, 180.0);
    const Dense ata = transpose_times_self(dense_system_matrix(g));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Image r = uniform_image(8, 8, seed, -1.0, 1.0);
        const double expect = plain_dot(r.values, r.values) / plain_dot(r.values, matvec(ata, r.values));
        EXPECT_NEAR(sd_step_size(r, g).alpha, expect, 1e-10 * expect);
    }
}

TEST(Mbir, FirstStepResidualIsOrthogonal)
{
    const auto g = uniform_geometry(8, 8, 6, 150.0);
    const Dense a = dense_system_matrix(g);
    const Dense ata = transpose_times_self(a);
    const Image truth = uniform_image(8, 8, 3);
    const Sinogram s = forward_project(truth, g);

    // Step by hand on the dense matrices.
    const auto r0 = matvec_transpose(a, s.values);
    const double alpha = plain_dot(r0, r0) / plain_dot(r0, matvec(ata, r0));
    std::vector<double> c1(r0.size());
    for (std::size_t i = 0; i < c1.size(); ++i)
        c1[i] = alpha * r0[i];
    const auto ac1 = matvec(ata, c1);
    std::vector<double> r1(r0.size());
    for (std::size_t i = 0; i < r1.size(); ++i)
        r1[i] = r0[i] - ac1[i];
    EXPECT_LE(std::abs(plain_dot(r1, r0)) / plain_dot(r0, r0), 1e-8);

    // The library's first iterate matches the hand step.
    const auto rec = mbir_reconstruct(s, g, {1, 0.0});
    EXPECT_LE(max_rel_diff(rec.image.values, c1), 1e-10);
    EXPECT_NEAR(rec.run.records[0].residual_norm, std::sqrt(plain_dot(r1, r1)), 1e-10 * std::sqrt(plain_dot(r0, r0)));
}

TEST(Mbir, DataMisfitNeverIncreases)
{
    const Image truth = shepp_logan(32, 32);
    for (int views : {20, 45, 180}) {
        const auto g = uniform_geometry(32, 32, views, 180.0);
        const auto rec = mbir_reconstruct(forward_project(truth, g), g, {400, 0.0});
        ASSERT_EQ(rec.run.records.size(), 400u);
        for (std::size_t k = 1; k < rec.run.records.size(); ++k)
            EXPECT_LE(rec.run.records[k].data_misfit, rec.run.records[k - 1].data_misfit * (1.0 + 1e-12))
                << views << " views, iteration " << k;
    }
}

TEST(Mbir, LoggedResidualIsRederivable)
{
    const Image truth = shepp_logan(24, 24);
    const auto g = uniform_geometry(24, 24, 40, 180.0);
    const Sinogram s = forward_project(truth, g);
    const auto rec = mbir_reconstruct(s, g, {25, 0.0});
    const Image atg = back_project(s, g);
    const Image atac = normal_op(rec.image, g);
    double rr = 0.0;
    for (std::size_t i = 0; i < atg.size(); ++i)
        rr += (atg.values[i] - atac.values[i]) * (atg.values[i] - atac.values[i]);
    EXPECT_NEAR(rec.run.records.back().residual_norm, std::sqrt(rr), 1e-9 * std::sqrt(rr));
    for (std::size_t k = 0; k < rec.run.records.size(); ++k)
        EXPECT_EQ(rec.run.records[k].iteration, static_cast<int>(k));
}

TEST(Mbir, ZeroSinogramGivesZeroImage)
{
    const auto g = uniform_geometry(16, 16, 10);
    const auto rec = mbir_reconstruct(Sinogram(g), g);
    EXPECT_LE(rec.run.records.size(), 1u);
    for (double v : rec.image.values)
        EXPECT_EQ(v, 0.0);
}

TEST(Mbir, StopsAtTolerance)
{
    const auto g = uniform_geometry(8, 8, 30);
    const auto rec = mbir_reconstruct(forward_project(uniform_image(8, 8, 1), g), g, {20000, 1e-6});
    EXPECT_EQ(rec.run.stop_reason, "tolerance");
    EXPECT_LT(static_cast<int>(rec.run.records.size()), 20000);
}

TEST(Mbir, RejectsBadInput)
{
    const auto g = uniform_geometry(8, 8, 4);
    Sinogram empty;
    EXPECT_THROW(mbir_reconstruct(empty, g), InvalidInput);
    EXPECT_THROW(mbir_reconstruct(Sinogram(g), g, {0, 1e-6}), InvalidInput);
    EXPECT_THROW(mbir_reconstruct(Sinogram(g), g, {10, -1.0}), InvalidInput);
}

TEST(Mbir, GroundTruthOnlyAffectsLogs)
{
    const Image truth = shepp_logan(32, 32);
    const auto g = uniform_geometry(32, 32, 30);
    const Sinogram s = forward_project(truth, g);
    const auto with = mbir_reconstruct(s, g, {50, 0.0}, &truth);
    const auto without = mbir_reconstruct(s, g, {50, 0.0});
    EXPECT_EQ(with.image.values, without.image.values);
    EXPECT_TRUE(std::isfinite(with.run.records.back().snr_db));
    EXPECT_TRUE(std::isnan(without.run.records.back().snr_db));
}

TEST(Mbir, SparseViewReconstructionStaysInMeasuredSlices)
{
    // 30 views leave most of the frequency plane unsampled; a zero-started
    // solver should not put energy there.
    const Image truth = shepp_logan(64, 64);
    const auto g = uniform_geometry(64, 64, 30);
    const auto rec = mbir_reconstruct(forward_project(truth, g), g, {1500, 0.0});
    EXPECT_LE(wedge_energy(rec.image, g, 0.5).unmeasured_fraction(), 0.02);
}
