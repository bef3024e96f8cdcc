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

#include "rbpdip/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbpdip/error.hpp"

namespace rbpdip::ad {

std::size_t Shape::numel() const
{
    std::size_t n = 1;
    for (int d : dims)
        n *= static_cast<std::size_t>(d);
    return n;
}

std::string Shape::str() const
{
    std::string s = "(";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i)
            s += ", ";
        s += std::to_string(dims[i]);
    }
    return s + ")";
}

Tensor Tensor::zeros(Shape shape, bool requires_grad)
{
    for (int d : shape.dims)
        if (d < 0)
            throw InvalidInput("tensor: negative dimension in " + shape.str());
    auto node = std::make_shared<Node>();
    node->values.assign(shape.numel(), 0.0);
    node->shape = std::move(shape);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad)
{
    if (values.size() != shape.numel())
        throw InvalidInput("tensor: " + std::to_string(values.size()) + " values for shape " + shape.str());
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->values = std::move(values);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad)
{
    return from(Shape{}, {value}, requires_grad);
}

const Shape& Tensor::shape() const
{
    return node_->shape;
}

std::size_t Tensor::numel() const
{
    return node_->values.size();
}

std::span<double> Tensor::values()
{
    return node_->values;
}

std::span<const double> Tensor::values() const
{
    return node_->values;
}

double Tensor::item() const
{
    if (node_->values.size() != 1)
        throw InvalidInput("tensor: item() on a tensor of shape " + node_->shape.str());
    return node_->values[0];
}

bool Tensor::requires_grad() const
{
    return node_->requires_grad;
}

void Tensor::set_requires_grad(bool flag)
{
    node_->requires_grad = flag;
}

std::span<double> Tensor::grad()
{
    if (node_->grad.size() != node_->values.size())
        node_->grad.assign(node_->values.size(), 0.0);
    return node_->grad;
}

std::span<const double> Tensor::grad() const
{
    if (node_->grad.size() != node_->values.size())
        node_->grad.assign(node_->values.size(), 0.0);
    return node_->grad;
}

bool Tensor::has_grad() const
{
    return node_->grad.size() == node_->values.size() && !node_->values.empty();
}

void Tensor::zero_grad()
{
    auto g = grad();
    std::fill(g.begin(), g.end(), 0.0);
}

} // namespace rbpdip::ad
