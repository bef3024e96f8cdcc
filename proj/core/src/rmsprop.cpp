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

#include "rbpdip/rmsprop.hpp"

#include <cmath>

#include "rbpdip/error.hpp"

namespace rbpdip::ad {

void RmsPropConfig::validate() const
{
    if (!(learning_rate > 0.0))
        throw ConfigError("rmsprop: learning rate must be positive");
    if (!(rho >= 0.0 && rho < 1.0))
        throw ConfigError("rmsprop: rho must lie in [0, 1)");
    if (!(eps > 0.0))
        throw ConfigError("rmsprop: eps must be positive");
    if (!(decay > 0.0 && decay <= 1.0))
        throw ConfigError("rmsprop: decay must lie in (0, 1]");
    if (decay_period < 1)
        throw ConfigError("rmsprop: decay period must be at least 1");
}

double rmsprop_learning_rate(const RmsPropConfig& config, int iteration)
{
    return config.learning_rate * std::pow(config.decay, iteration / config.decay_period);
}

void rmsprop_step(std::span<double> param, std::span<const double> grad, std::span<double> accumulator,
                  const RmsPropConfig& config, int iteration)
{
    if (param.size() != grad.size() || param.size() != accumulator.size())
        throw InvalidInput("rmsprop: parameter, gradient and accumulator sizes differ");
    const double lr = rmsprop_learning_rate(config, iteration);
    const double rho = config.rho;
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad[i];
        accumulator[i] = rho * accumulator[i] + (1.0 - rho) * g * g;
        param[i] -= lr * g / (std::sqrt(accumulator[i]) + config.eps);
    }
}

RmsProp::RmsProp(RmsPropConfig config, std::vector<Tensor> params) : config_(config), params_(std::move(params))
{
    config_.validate();
    accumulators_.reserve(params_.size());
    for (const auto& p : params_)
        accumulators_.emplace_back(p.numel(), 0.0);
}

void RmsProp::step(int iteration)
{
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto& p = params_[i];
        rmsprop_step(p.values(), p.grad(), accumulators_[i], config_, iteration);
    }
}

} // namespace rbpdip::ad
