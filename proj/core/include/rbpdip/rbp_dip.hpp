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
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "rbpdip/geometry.hpp"
#include "rbpdip/image.hpp"
#include "rbpdip/projection.hpp"
#include "rbpdip/recon_run.hpp"
#include "rbpdip/rmsprop.hpp"
#include "rbpdip/sinogram.hpp"
#include "rbpdip/tape.hpp"
#include "rbpdip/unet.hpp"

namespace rbpdip {

enum class ReconMode {
    rbp_dip,   // network input driven by residual back projection
    dip_fixed, // network input frozen at seeded noise
};

std::string_view to_string(ReconMode mode);
ReconMode parse_recon_mode(std::string_view text);

struct RbpConfig {
    double n_c = 4.0;
    double n_s = 1000.0;
    double beta_max = 1e-3;
    int max_iters = 10000;
    double huber_delta = 1.0;
    UNetConfig unet;
    ad::RmsPropConfig optimizer;
    ReconMode mode = ReconMode::rbp_dip;
    // Seeds the network weights and, in dip-fixed mode, the input noise.
    std::uint64_t seed = 0;
    // dip-fixed input is uniform on [0, dip_noise_max].
    double dip_noise_max = 0.1;

    // Write a checkpoint every K iterations to checkpoint_path (0 = never).
    int checkpoint_every = 0;
    std::filesystem::path checkpoint_path;
    // Keep a copy of c every K iterations in the run history (0 = never).
    int snapshot_every = 0;

    // Replaces the beta schedule with a constant.
    std::optional<double> beta_override;
    // Keeps the network weights fixed (no optimizer updates).
    bool freeze_network = false;

    void validate() const;
};

/// beta_max / (1 + exp(-(n / n_s - n_c)))
double beta(int n, double n_s, double n_c, double beta_max);

/// One reconstruction in progress. step() runs one loop iteration:
///
///   alpha = <r, r> / <r, A^T A r>
///   z     = c + alpha * beta(n) * r          (outside the tape)
///   c     = z + G(w; z)                      (dip-fixed: c = G(w; z0))
///   r     = A^T g - A^T A c
///   w    <- RMSProp(grad_w Huber(r / ||A^T g||_inf))
class RbpDipSolver {
public:
    RbpDipSolver(const Sinogram& sino, const ParallelGeometry& geom, RbpConfig config,
                 const Image* ground_truth = nullptr);
    RbpDipSolver(const Sinogram& sino, const ParallelGeometry& geom, RbpConfig config, UNet initial_net,
                 const Image* ground_truth = nullptr);

    void step();
    /// Steps until max_iters and returns the final image and history.
    Reconstruction run();

    int iteration() const { return iteration_; }
    const Image& image() const { return c_; }
    const Image& input() const { return z_; }
    const Image& residual() const { return r_; }
    const UNet& net() const { return net_; }
    const ReconRun& history() const { return run_; }
    const RbpConfig& config() const { return config_; }
    // Tape of the most recent step.
    const ad::Tape& last_tape() const { return tape_; }

    /// Writes `<path>.unet` (network blob) and `<path>.state` (loop state).
    void save_checkpoint(const std::filesystem::path& path) const;
    /// Restores a checkpoint written for the same sinogram and config.
    void load_checkpoint(const std::filesystem::path& path);

private:
    void init();
    void log_record(double loss, double alpha, double beta_value, double misfit);

    Sinogram sino_;
    ParallelGeometry geom_;
    RbpConfig config_;
    const Image* ground_truth_;
    UNet net_;
    ad::RmsProp optimizer_;
    ad::Tape tape_;
    std::shared_ptr<const Projector> projector_;
    NormalOperator normal_;

    std::vector<double> atg_;
    double residual_scale_ = 1.0;
    Image c_;
    Image z_;
    Image r_;
    std::vector<double> sino_scratch_;
    int iteration_ = 0;
    ReconRun run_;
};

/// Algorithm loop with the residual-back-projection input (mode rbp-dip).
Reconstruction rbp_dip_reconstruct(const Sinogram& sino, const ParallelGeometry& geom, const RbpConfig& config,
                                   const Image* ground_truth = nullptr);

/// Plain deep-image-prior baseline: fixed noise input, c = G(w; z0).
Reconstruction dip_reconstruct(const Sinogram& sino, const ParallelGeometry& geom, const RbpConfig& config,
                               const Image* ground_truth = nullptr);

} // namespace rbpdip
