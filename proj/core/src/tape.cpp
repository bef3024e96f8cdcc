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

#include "rbpdip/tape.hpp"

#include "rbpdip/error.hpp"

namespace rbpdip::ad {

void Tape::record(std::string op, std::vector<Tensor> inputs, Tensor output, std::function<void()> backward)
{
    entries_.push_back({std::move(op), std::move(inputs), std::move(output), std::move(backward)});
}

bool Tape::produced(const Tensor& t) const
{
    for (const auto& e : entries_)
        if (e.output.same(t))
            return true;
    return false;
}

std::size_t Tape::backward(Tensor& loss)
{
    if (!loss.defined() || loss.numel() != 1 || loss.shape().rank() != 0)
        throw InvalidInput("backward: loss must be a scalar tensor");
    if (!produced(loss))
        throw InvalidInput("backward: loss was not produced on this tape");

    for (auto& e : entries_) {
        if (e.output.requires_grad())
            e.output.zero_grad();
        for (auto& in : e.inputs)
            if (in.requires_grad())
                in.zero_grad();
    }
    if (!loss.requires_grad())
        return 0;
    loss.grad()[0] = 1.0;

    std::size_t visited = 0;
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
        ++visited;
        if (it->output.requires_grad() && it->backward)
            it->backward();
    }
    return visited;
}

} // namespace rbpdip::ad
