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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "rbpdip/error.hpp"
#include "rbpdip/projection.hpp"
#include "rbpdip/simulate.hpp"

namespace rbpdip {
namespace {

// SplitMix64 as a UniformRandomBitGenerator; cheap to seed per entry.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

std::uint64_t entry_seed(std::uint64_t seed, std::uint64_t index)
{
    SplitMix64 mix(seed);
    const std::uint64_t base = mix();
    SplitMix64 entry(base ^ (index * 0xD1B54A32D192ED03ull));
    return entry();
}

} // namespace

Sinogram poisson_noise(const Sinogram& sino, const NoiseSpec& spec)
{
    if (!(spec.i0 > 0.0) || !std::isfinite(spec.i0))
        throw InvalidInput("poisson_noise: I0 must be positive");
    Sinogram out = sino;
    out.noise = spec;
    for (std::size_t i = 0; i < sino.values.size(); ++i) {
        const double expected = spec.i0 * std::exp(-sino.values[i]);
        SplitMix64 rng(entry_seed(spec.seed, i));
        std::poisson_distribution<long long> dist(expected);
        const long long counts = expected > 0.0 ? dist(rng) : 0;
        out.values[i] = -std::log(static_cast<double>(std::max<long long>(counts, 1)) / spec.i0);
    }
    return out;
}

Sinogram make_sinogram(const Image& image, const ParallelGeometry& geom, const std::optional<NoiseSpec>& noise)
{
    Sinogram clean = forward_project(image, geom);
    if (!noise)
        return clean;
    return poisson_noise(clean, *noise);
}

} // namespace rbpdip
