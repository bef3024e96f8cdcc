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
#include <filesystem>
#include <string>
#include <vector>

#include "rbpdip/tape.hpp"
#include "rbpdip/tensor.hpp"

namespace rbpdip {

enum class Downsample : std::uint32_t {
    strided_conv = 0,
    avg_pool = 1,
};

struct UNetConfig {
    int depth = 4;
    int base_channels = 16;
    // Channel width doubles per level up to this cap.
    int max_channels = 128;
    int kernel_size = 3;
    double activation_slope = 0.1;
    std::uint64_t seed = 0;
    Downsample downsample = Downsample::strided_conv;
    // Multiplies the He-normal draw of the final 1x1 layer. The default 0
    // starts G as the zero map so c = z at the first iteration.
    double head_init_scale = 0.0;
    // When non-zero, checked against the 2^depth divisibility rule at init.
    int input_width = 0;
    int input_height = 0;

    int level_channels(int level) const;
    int bottleneck_channels() const;
    void validate() const;
    void validate_input(int width, int height) const;

    friend bool operator==(const UNetConfig&, const UNetConfig&) = default;
};

struct ConvLayer {
    std::string name;
    ad::Tensor weight; // (C_out, C_in, K, K)
    ad::Tensor bias;   // (C_out)
    int stride = 1;
    int padding = 0;
};

/// Activations kept for structural checks of the encoder/decoder wiring.
struct UNetTrace {
    std::vector<ad::Tensor> encoder_skips;
};

/// Generator G(w; z) without the outer skip. Encoder level l runs
/// conv -> act -> downsample, the bottleneck runs two conv -> act, decoder
/// level l runs upsample -> concat(encoder l) -> conv -> act, and a 1x1
/// conv maps to one linear output channel.
class UNet {
public:
    explicit UNet(const UNetConfig& config);

    const UNetConfig& config() const { return config_; }

    /// z is (1, H, W); returns (1, H, W).
    ad::Tensor forward(ad::Tape& tape, const ad::Tensor& z, UNetTrace* trace = nullptr) const;

    std::vector<ConvLayer>& layers() { return layers_; }
    const std::vector<ConvLayer>& layers() const { return layers_; }
    std::vector<ad::Tensor> parameters() const;
    std::size_t parameter_count() const;

    void set_trainable(bool trainable);
    void zero_weights();
    // Deep copy; the default copy shares parameter storage.
    UNet clone() const;

    void save(const std::filesystem::path& path) const;
    static UNet load(const std::filesystem::path& path);
    void write(std::vector<unsigned char>& out) const;
    static UNet read(const unsigned char*& cursor, const unsigned char* end);

private:
    struct Skeleton {};
    UNet(const UNetConfig& config, Skeleton);
    void build_layers();

    UNetConfig config_;
    std::vector<ConvLayer> layers_;
    // Indices into layers_.
    std::vector<std::size_t> encoder_convs_;
    std::vector<std::size_t> encoder_downs_;
    std::vector<std::size_t> bottleneck_;
    std::vector<std::size_t> decoder_convs_; // indexed by level
    std::size_t head_ = 0;
};

/// Seeded He-normal weights (std sqrt(2 / fan_in)), zero biases.
UNet unet_init(const UNetConfig& config);

} // namespace rbpdip
