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

#include <functional>
#include <span>
#include <string>

#include "rbpdip/tape.hpp"
#include "rbpdip/tensor.hpp"

namespace rbpdip::ad {

/// Cross-correlation of x (C_in, H, W) with kernel (C_out, C_in, K, K) and
/// bias (C_out), zero padding. Output (C_out, (H + 2p - K)/s + 1, ...).
Tensor conv2d(Tape& tape, const Tensor& x, const Tensor& kernel, const Tensor& bias, int stride, int padding);

/// max(x, slope * x); the derivative at 0 is `slope`.
Tensor leaky_relu(Tape& tape, const Tensor& x, double slope);

/// Nearest-neighbour 2x spatial upsampling.
Tensor upsample2x(Tape& tape, const Tensor& x);

/// 2x2 mean pooling with stride 2; even spatial dims required.
Tensor avg_pool2x(Tape& tape, const Tensor& x);

/// Stacks (C_a, H, W) and (C_b, H, W) into (C_a + C_b, H, W).
Tensor concat_channels(Tape& tape, const Tensor& a, const Tensor& b);

Tensor add(Tape& tape, const Tensor& a, const Tensor& b);

/// Scalar sum of all elements.
Tensor sum(Tape& tape, const Tensor& x);

/// Scalar sum_i weights[i] * x[i] with constant weights.
Tensor weighted_sum(Tape& tape, const Tensor& x, std::span<const double> weights);

/// Mean Huber penalty: 0.5 x^2 for |x| <= delta, delta (|x| - delta / 2) beyond.
Tensor huber_loss(Tape& tape, const Tensor& x, double delta);

/// Caller-supplied map with a hand-written adjoint. `forward(in, out)` fills
/// the output; `adjoint(grad_out, grad_in)` must *add* J^T grad_out into
/// grad_in.
using MapForward = std::function<void(std::span<const double>, std::span<double>)>;
using MapAdjoint = std::function<void(std::span<const double>, std::span<double>)>;
Tensor custom_map(Tape& tape, std::string name, const Tensor& x, Shape out_shape, const MapForward& forward,
                  MapAdjoint adjoint);

} // namespace rbpdip::ad
