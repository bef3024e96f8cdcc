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

#include <span>

#include "rbpdip/geometry.hpp"
#include "rbpdip/image.hpp"
#include "rbpdip/projection.hpp"
#include "rbpdip/recon_run.hpp"
#include "rbpdip/sinogram.hpp"

namespace rbpdip {

enum class StepStatus {
    ok,
    converged,  // r == 0
    null_space, // r != 0 but <r, A^T A r> == 0
};

struct StepSize {
    StepStatus status = StepStatus::ok;
    double alpha = 0.0;
};

/// Exact line-search step <r, r> / <r, A^T A r> for the normal equations.
StepSize sd_step_size(std::span<const double> r, const NormalOperator& op);
StepSize sd_step_size(const Image& r, const ParallelGeometry& geom);

struct MbirOptions {
    int max_iters = 5000;
    double stop_tol = 1e-6;
};

/// Normal-equation residual r = A^T g - A^T A c. `sino_scratch` receives A c.
void normal_residual(std::span<const double> atg, std::span<const double> c, const ParallelGeometry& geom,
                     std::span<double> r, std::span<double> sino_scratch);
void normal_residual(std::span<const double> atg, std::span<const double> c, const Projector& projector,
                     std::span<double> r, std::span<double> sino_scratch);

/// Steepest descent on the normal equations from c = 0. The optional ground
/// truth only feeds the logged SNR.
Reconstruction mbir_reconstruct(const Sinogram& sino, const ParallelGeometry& geom, const MbirOptions& options = {},
                                const Image* ground_truth = nullptr);

} // namespace rbpdip
