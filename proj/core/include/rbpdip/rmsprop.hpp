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
#include <vector>

#include "rbpdip/tensor.hpp"

namespace rbpdip::ad {

struct RmsPropConfig {
    double learning_rate = 1e-4;
    double rho = 0.99;
    double eps = 1e-8;
    // lr(n) = learning_rate * decay^floor(n / decay_period)
    double decay = 0.9;
    int decay_period = 1000;

    void validate() const;
};

double rmsprop_learning_rate(const RmsPropConfig& config, int iteration);

/// acc <- rho acc + (1 - rho) g^2;  p <- p - lr(n) g / (sqrt(acc) + eps)
void rmsprop_step(std::span<double> param, std::span<const double> grad, std::span<double> accumulator,
                  const RmsPropConfig& config, int iteration);

/// RMSProp over a fixed parameter list, one accumulator per parameter.
class RmsProp {
public:
    RmsProp(RmsPropConfig config, std::vector<Tensor> params);

    void step(int iteration);

    const RmsPropConfig& config() const { return config_; }
    std::span<const std::vector<double>> accumulators() const { return accumulators_; }
    std::vector<std::vector<double>>& mutable_accumulators() { return accumulators_; }

private:
    RmsPropConfig config_;
    std::vector<Tensor> params_;
    std::vector<std::vector<double>> accumulators_;
};

} // namespace rbpdip::ad
