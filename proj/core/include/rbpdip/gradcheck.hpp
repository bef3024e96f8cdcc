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
#include <functional>
#include <string>
#include <vector>

#include "rbpdip/tape.hpp"
#include "rbpdip/tensor.hpp"

namespace rbpdip::ad {

struct GradCheckResult {
    std::string name;
    std::size_t samples = 0;
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;

    bool passed(double tolerance) const { return samples > 0 && max_rel_error <= tolerance; }
};

/// Builds the scalar loss on a fresh tape.
using LossFn = std::function<Tensor(Tape&)>;

/// Compares reverse-mode gradients of `loss` against central differences with
/// step h on `samples` coordinates drawn uniformly from `params`. The error
/// per coordinate is |a - n| / max(|a|, |n|, floor).
GradCheckResult gradient_check(std::string name, const LossFn& loss, const std::vector<Tensor>& params, int samples,
                               std::uint64_t seed, double h = 1e-6, double floor = 1e-8);

/// Every differentiable op plus a depth-2 U-net on a 16x16 input.
std::vector<GradCheckResult> standard_gradient_suite(int samples, std::uint64_t seed);

} // namespace rbpdip::ad
