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

#include "rbpdip/unet.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "binary_io.hpp"
#include "rbpdip/error.hpp"
#include "rbpdip/ops.hpp"

namespace rbpdip {

namespace {
constexpr std::string_view kUNetMagic = "RBPDUNET";
constexpr std::uint32_t kUNetVersion = 1;
} // namespace

int UNetConfig::level_channels(int level) const
{
    long c = static_cast<long>(base_channels) << level;
    return static_cast<int>(std::min<long>(c, max_channels));
}

int UNetConfig::bottleneck_channels() const
{
    return level_channels(depth);
}

void UNetConfig::validate() const
{
    if (depth < 1 || depth > 16)
        throw ConfigError("unet: depth must lie in [1, 16]");
    if (base_channels < 1)
        throw ConfigError("unet: base_channels must be positive");
    if (max_channels < base_channels)
        throw ConfigError("unet: max_channels must be >= base_channels");
    if (kernel_size < 1 || kernel_size % 2 == 0)
        throw ConfigError("unet: kernel_size must be a positive odd integer");
    if (!(activation_slope >= 0.0 && activation_slope < 1.0))
        throw ConfigError("unet: activation slope must lie in [0, 1)");
    if (!std::isfinite(head_init_scale) || head_init_scale < 0.0)
        throw ConfigError("unet: head_init_scale must be finite and non-negative");
    if (downsample != Downsample::strided_conv && downsample != Downsample::avg_pool)
        throw ConfigError("unet: unknown downsampling mode");
    if (input_width != 0 || input_height != 0)
        validate_input(input_width, input_height);
}

void UNetConfig::validate_input(int width, int height) const
{
    const int factor = 1 << depth;
    if (width <= 0 || height <= 0 || width % factor != 0 || height % factor != 0)
        throw ConfigError("unet: input " + std::to_string(width) + "x" + std::to_string(height)
                          + " is not divisible by 2^depth = " + std::to_string(factor));
}

UNet::UNet(const UNetConfig& config) : config_(config)
{
    config_.validate();
    build_layers();
}

UNet::UNet(const UNetConfig& config, Skeleton) : config_(config)
{
    build_layers();
}

void UNet::build_layers()
{
    const int k = config_.kernel_size;
    const int pad = (k - 1) / 2;
    auto make = [&](std::string name, int cin, int cout, int kernel, int stride, int padding) {
        ConvLayer layer;
        layer.name = std::move(name);
        layer.weight = ad::Tensor::zeros(ad::Shape{cout, cin, kernel, kernel}, true);
        layer.bias = ad::Tensor::zeros(ad::Shape{cout}, true);
        layer.stride = stride;
        layer.padding = padding;
        layers_.push_back(std::move(layer));
        return layers_.size() - 1;
    };

    const int depth = config_.depth;
    int in = 1;
    for (int l = 0; l < depth; ++l) {
        const int c = config_.level_channels(l);
        encoder_convs_.push_back(make("enc" + std::to_string(l) + ".conv", in, c, k, 1, pad));
        if (config_.downsample == Downsample::strided_conv)
            encoder_downs_.push_back(make("enc" + std::to_string(l) + ".down", c, c, k, 2, pad));
        in = c;
    }
    const int cb = config_.bottleneck_channels();
    bottleneck_.push_back(make("bottleneck.0", in, cb, k, 1, pad));
    bottleneck_.push_back(make("bottleneck.1", cb, cb, k, 1, pad));

    decoder_convs_.assign(static_cast<std::size_t>(depth), 0);
    int below = cb;
    for (int l = depth - 1; l >= 0; --l) {
        const int c = config_.level_channels(l);
        decoder_convs_[l] = make("dec" + std::to_string(l) + ".conv", below + c, c, k, 1, pad);
        below = c;
    }
    head_ = make("head", config_.level_channels(0), 1, 1, 1, 0);
}

ad::Tensor UNet::forward(ad::Tape& tape, const ad::Tensor& z, UNetTrace* trace) const
{
    if (!z.defined() || z.shape().rank() != 3 || z.shape()[0] != 1)
        throw InvalidInput("unet: input must be a single-channel (1, H, W) tensor");
    config_.validate_input(z.shape()[2], z.shape()[1]);

    const double slope = config_.activation_slope;
    auto conv = [&](std::size_t idx, const ad::Tensor& x) {
        const ConvLayer& L = layers_[idx];
        return ad::conv2d(tape, x, L.weight, L.bias, L.stride, L.padding);
    };

    std::vector<ad::Tensor> skips;
    ad::Tensor x = z;
    for (int l = 0; l < config_.depth; ++l) {
        x = ad::leaky_relu(tape, conv(encoder_convs_[l], x), slope);
        skips.push_back(x);
        x = config_.downsample == Downsample::strided_conv ? conv(encoder_downs_[l], x) : ad::avg_pool2x(tape, x);
    }
    for (std::size_t idx : bottleneck_)
        x = ad::leaky_relu(tape, conv(idx, x), slope);
    for (int l = config_.depth - 1; l >= 0; --l) {
        x = ad::upsample2x(tape, x);
        x = ad::concat_channels(tape, x, skips[l]);
        x = ad::leaky_relu(tape, conv(decoder_convs_[l], x), slope);
    }
    if (trace)
        trace->encoder_skips = skips;
    return conv(head_, x);
}

std::vector<ad::Tensor> UNet::parameters() const
{
    std::vector<ad::Tensor> out;
    out.reserve(2 * layers_.size());
    for (const auto& L : layers_) {
        out.push_back(L.weight);
        out.push_back(L.bias);
    }
    return out;
}

std::size_t UNet::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& L : layers_)
        n += L.weight.numel() + L.bias.numel();
    return n;
}

void UNet::set_trainable(bool trainable)
{
    for (auto& L : layers_) {
        L.weight.set_requires_grad(trainable);
        L.bias.set_requires_grad(trainable);
    }
}

void UNet::zero_weights()
{
    for (auto& L : layers_) {
        std::ranges::fill(L.weight.values(), 0.0);
        std::ranges::fill(L.bias.values(), 0.0);
    }
}

UNet UNet::clone() const
{
    UNet copy(config_, Skeleton{});
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        std::ranges::copy(layers_[i].weight.values(), copy.layers_[i].weight.values().begin());
        std::ranges::copy(layers_[i].bias.values(), copy.layers_[i].bias.values().begin());
        copy.layers_[i].weight.set_requires_grad(layers_[i].weight.requires_grad());
        copy.layers_[i].bias.set_requires_grad(layers_[i].bias.requires_grad());
    }
    return copy;
}

UNet unet_init(const UNetConfig& config)
{
    UNet net(config);
    std::mt19937_64 rng(config.seed);
    for (auto& L : net.layers()) {
        const auto& s = L.weight.shape();
        const double fan_in = static_cast<double>(s[1]) * s[2] * s[3];
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
        const double gain = L.name == "head" ? config.head_init_scale : 1.0;
        for (double& w : L.weight.values())
            w = gain * dist(rng);
    }
    return net;
}

// Blob layout (little-endian):
//   char[8]  "RBPDUNET"
//   u32      version (1)
//   u32      depth, base_channels, max_channels, kernel_size, downsample
//   f64      activation_slope, head_init_scale
//   u64      seed
//   u32      input_width, input_height
//   u32      layer count
//   per layer: u32 c_out, u32 c_in, u32 k, f64 weight[c_out*c_in*k*k], f64 bias[c_out]
void UNet::write(std::vector<unsigned char>& out) const
{
    using detail::put_le;
    detail::put_magic(out, kUNetMagic);
    put_le<std::uint32_t>(out, kUNetVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config_.depth));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config_.base_channels));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config_.max_channels));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config_.kernel_size));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config_.downsample));
    put_le<double>(out, config_.activation_slope);
    put_le<double>(out, config_.head_init_scale);
    put_le<std::uint64_t>(out, config_.seed);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config_.input_width));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config_.input_height));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(layers_.size()));
    for (const auto& L : layers_) {
        const auto& s = L.weight.shape();
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s[0]));
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s[1]));
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s[2]));
        for (double v : L.weight.values())
            put_le<double>(out, v);
        for (double v : L.bias.values())
            put_le<double>(out, v);
    }
}

UNet UNet::read(const unsigned char*& cursor, const unsigned char* end)
{
    detail::ByteReader in(cursor, end, "unet checkpoint");
    in.expect_magic(kUNetMagic);
    const auto version = in.get<std::uint32_t>();
    if (version != kUNetVersion)
        throw IoError("unet checkpoint: unsupported version " + std::to_string(version));
    UNetConfig cfg;
    cfg.depth = static_cast<int>(in.get<std::uint32_t>());
    cfg.base_channels = static_cast<int>(in.get<std::uint32_t>());
    cfg.max_channels = static_cast<int>(in.get<std::uint32_t>());
    cfg.kernel_size = static_cast<int>(in.get<std::uint32_t>());
    cfg.downsample = static_cast<Downsample>(in.get<std::uint32_t>());
    cfg.activation_slope = in.get<double>();
    cfg.head_init_scale = in.get<double>();
    cfg.seed = in.get<std::uint64_t>();
    cfg.input_width = static_cast<int>(in.get<std::uint32_t>());
    cfg.input_height = static_cast<int>(in.get<std::uint32_t>());
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw IoError(std::string("unet checkpoint: invalid config: ") + e.what());
    }
    UNet net(cfg);
    const auto count = in.get<std::uint32_t>();
    if (count != net.layers_.size())
        throw IoError("unet checkpoint: layer count does not match config");
    for (auto& L : net.layers_) {
        const auto& s = L.weight.shape();
        const int cout = static_cast<int>(in.get<std::uint32_t>());
        const int cin = static_cast<int>(in.get<std::uint32_t>());
        const int k = static_cast<int>(in.get<std::uint32_t>());
        if (cout != s[0] || cin != s[1] || k != s[2])
            throw IoError("unet checkpoint: layer " + L.name + " has unexpected shape");
        in.need((L.weight.numel() + L.bias.numel()) * sizeof(double));
        for (double& v : L.weight.values())
            v = in.get<double>();
        for (double& v : L.bias.values())
            v = in.get<double>();
    }
    return net;
}

void UNet::save(const std::filesystem::path& path) const
{
    std::vector<unsigned char> bytes;
    write(bytes);
    detail::write_file(path, bytes);
}

UNet UNet::load(const std::filesystem::path& path)
{
    const auto bytes = detail::read_file(path);
    const unsigned char* cur = bytes.data();
    UNet net = read(cur, bytes.data() + bytes.size());
    if (cur != bytes.data() + bytes.size())
        throw IoError("unet checkpoint: trailing bytes in " + path.string());
    return net;
}

} // namespace rbpdip
