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
#include <vector>

#include "rbpdip/tensor.hpp"

namespace rbpdip::ad {

struct TapeEntry {
    std::string op;
    std::vector<Tensor> inputs;
    Tensor output;
    // Reads output.grad() and accumulates into the inputs that require grad.
    std::function<void()> backward;
};

/// Records differentiable operations in execution order and replays their
/// adjoints in reverse.
class Tape {
public:
    void record(std::string op, std::vector<Tensor> inputs, Tensor output, std::function<void()> backward);

    /// Fills grad() of every requires-grad tensor on the tape with
    /// d loss / d tensor. Gradients are reset first, so running backward twice
    /// gives identical results. Returns the number of entries visited.
    std::size_t backward(Tensor& loss);

    std::span<const TapeEntry> entries() const { return entries_; }
    bool produced(const Tensor& t) const;
    std::size_t size() const { return entries_.size(); }
    void clear() { entries_.clear(); }

private:
    std::vector<TapeEntry> entries_;
};

} // namespace rbpdip::ad
