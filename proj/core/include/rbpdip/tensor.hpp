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

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rbpdip::ad {

/// Dimensions of a tensor. Rank 0 is a scalar; activations are (C, H, W),
/// convolution kernels (C_out, C_in, K, K) and biases (C).
struct Shape {
    std::vector<int> dims;

    Shape() = default;
    Shape(std::initializer_list<int> d) : dims(d) {}
    explicit Shape(std::vector<int> d) : dims(std::move(d)) {}

    std::size_t rank() const { return dims.size(); }
    std::size_t numel() const;
    int operator[](std::size_t i) const { return dims[i]; }
    std::string str() const;

    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Shared handle to a value buffer and its lazily allocated gradient. Copies
/// alias the same storage, the way network parameters are passed around.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return static_cast<bool>(node_); }
    const Shape& shape() const;
    std::size_t numel() const;

    std::span<double> values();
    std::span<const double> values() const;
    double item() const;

    bool requires_grad() const;
    void set_requires_grad(bool flag);

    // Allocates a zero gradient on first access.
    std::span<double> grad();
    std::span<const double> grad() const;
    bool has_grad() const;
    void zero_grad();

    // Same underlying storage.
    bool same(const Tensor& other) const { return node_ == other.node_; }

private:
    struct Node {
        Shape shape;
        std::vector<double> values;
        mutable std::vector<double> grad;
        bool requires_grad = false;
    };

    explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

    std::shared_ptr<Node> node_;
};

} // namespace rbpdip::ad
