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

#include "rbpdip/rbp_dip.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "binary_io.hpp"
#include "rbpdip/error.hpp"
#include "rbpdip/mbir.hpp"
#include "rbpdip/metrics.hpp"
#include "rbpdip/ops.hpp"
#include "rbpdip/projection.hpp"

namespace rbpdip {

namespace {
constexpr std::string_view kStateMagic = "RBPDSTAT";
constexpr std::uint32_t kStateVersion = 1;
constexpr std::uint64_t kNoiseSeedSalt = 0x9E3779B97F4A7C15ull;
} // namespace

std::string_view to_string(ReconMode mode)
{
    return mode == ReconMode::rbp_dip ? "rbp-dip" : "dip-fixed";
}

ReconMode parse_recon_mode(std::string_view text)
{
    if (text == "rbp-dip")
        return ReconMode::rbp_dip;
    if (text == "dip-fixed" || text == "dip")
        return ReconMode::dip_fixed;
    throw ConfigError("unknown reconstruction mode '" + std::string(text) + "'");
}

void RbpConfig::validate() const
{
    if (!(n_s > 0.0))
        throw ConfigError("rbp: n_s must be positive");
    if (!std::isfinite(n_c))
        throw ConfigError("rbp: n_c must be finite");
    if (!(beta_max > 0.0))
        throw ConfigError("rbp: beta_max must be positive");
    if (max_iters < 1)
        throw ConfigError("rbp: max_iters must be at least 1");
    if (!(huber_delta > 0.0))
        throw ConfigError("rbp: huber delta must be positive");
    if (!(dip_noise_max > 0.0))
        throw ConfigError("rbp: dip noise amplitude must be positive");
    if (checkpoint_every < 0 || snapshot_every < 0)
        throw ConfigError("rbp: checkpoint/snapshot intervals must be non-negative");
    if (checkpoint_every > 0 && checkpoint_path.empty())
        throw ConfigError("rbp: checkpoint_every set without a checkpoint path");
    if (beta_override && !std::isfinite(*beta_override))
        throw ConfigError("rbp: beta override must be finite");
    unet.validate();
    optimizer.validate();
}

double beta(int n, double n_s, double n_c, double beta_max)
{
    return beta_max / (1.0 + std::exp(-(n / n_s - n_c)));
}

RbpDipSolver::RbpDipSolver(const Sinogram& sino, const ParallelGeometry& geom, RbpConfig config,
                           const Image* ground_truth)
    : RbpDipSolver(sino, geom, config, [&] {
          UNetConfig uc = config.unet;
          uc.seed = config.seed;
          uc.input_width = geom.image_width;
          uc.input_height = geom.image_height;
          return unet_init(uc);
      }(), ground_truth)
{
}

RbpDipSolver::RbpDipSolver(const Sinogram& sino, const ParallelGeometry& geom, RbpConfig config, UNet initial_net,
                           const Image* ground_truth)
    : sino_(sino),
      geom_(geom),
      config_(std::move(config)),
      ground_truth_(ground_truth),
      net_(std::move(initial_net)),
      optimizer_(config_.optimizer, net_.parameters())
{
    init();
}

void RbpDipSolver::init()
{
    config_.validate();
    if (sino_.values.empty())
        throw InvalidInput("rbp: empty sinogram");
    if (!(sino_.geometry == geom_))
        throw InvalidInput("rbp: sinogram geometry does not match");
    sino_.validate();
    net_.config().validate_input(geom_.image_width, geom_.image_height);
    if (ground_truth_ && (ground_truth_->width != geom_.image_width || ground_truth_->height != geom_.image_height))
        throw InvalidInput("rbp: ground truth dimensions do not match geometry");
    net_.set_trainable(!config_.freeze_network);

    const int w = geom_.image_width;
    const int h = geom_.image_height;
    projector_ = std::make_shared<const Projector>(geom_);
    normal_ = make_normal_operator(projector_);
    atg_.assign(static_cast<std::size_t>(w) * h, 0.0);
    projector_->back(sino_.values, atg_);
    const double inf_norm = max_abs(atg_);
    residual_scale_ = inf_norm > 0.0 ? 1.0 / inf_norm : 1.0;

    sino_scratch_.assign(geom_.sinogram_size(), 0.0);
    c_ = Image(w, h);
    z_ = Image(w, h);
    r_ = Image(w, h);
    normal_residual(atg_, c_.values, *projector_, r_.values, sino_scratch_);

    if (config_.mode == ReconMode::dip_fixed) {
        std::mt19937_64 rng(config_.seed ^ kNoiseSeedSalt);
        std::uniform_real_distribution<double> dist(0.0, config_.dip_noise_max);
        for (double& v : z_.values)
            v = dist(rng);
    }
}

void RbpDipSolver::step()
{
    const int n = iteration_;
    const int w = geom_.image_width;
    const int h = geom_.image_height;
    const bool rbp = config_.mode == ReconMode::rbp_dip;

    double alpha = 0.0;
    double beta_value = 0.0;
    if (rbp) {
        beta_value = config_.beta_override ? *config_.beta_override
                                           : beta(n, config_.n_s, config_.n_c, config_.beta_max);
        const StepSize s = sd_step_size(r_.values, normal_);
        // A converged or null-space residual contributes nothing this step.
        if (s.status == StepStatus::ok)
            alpha = s.alpha;
        const double gain = alpha * beta_value;
        for (std::size_t i = 0; i < z_.values.size(); ++i)
            z_.values[i] = c_.values[i] + gain * r_.values[i];
    }

    tape_.clear();
    const ad::Tensor z = ad::Tensor::from(ad::Shape{1, h, w}, z_.values, false);
    const ad::Tensor g = net_.forward(tape_, z);
    const ad::Tensor c = rbp ? ad::add(tape_, z, g) : g;

    const double scale = residual_scale_;
    const ad::Tensor r = ad::custom_map(
        tape_, "normal_residual", c, ad::Shape{1, h, w},
        [&](std::span<const double> in, std::span<double> out) {
            normal_residual(atg_, in, *projector_, r_.values, sino_scratch_);
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = scale * r_.values[i];
        },
        [projector = projector_, scale](std::span<const double> gout, std::span<double> gin) {
            // d(scale * (A^T g - A^T A c)) / dc is -scale A^T A, which is symmetric.
            std::vector<double> tmp(gin.size());
            std::vector<double> sino(projector->sinogram_size());
            projector->normal(gout, tmp, sino);
            for (std::size_t i = 0; i < gin.size(); ++i)
                gin[i] -= scale * tmp[i];
        });
    ad::Tensor loss = ad::huber_loss(tape_, r, config_.huber_delta);
    const double loss_value = loss.item();
    if (!std::isfinite(loss_value))
        throw NumericalError("rbp: non-finite loss at iteration " + std::to_string(n) + " (alpha "
                             + std::to_string(alpha) + ", beta " + std::to_string(beta_value) + ")");

    std::ranges::copy(c.values(), c_.values.begin());
    double misfit = 0.0;
    for (std::size_t i = 0; i < sino_scratch_.size(); ++i) {
        const double d = sino_.values[i] - sino_scratch_[i];
        misfit += d * d;
    }

    if (!config_.freeze_network) {
        tape_.backward(loss);
        optimizer_.step(n);
    }

    log_record(loss_value, alpha, beta_value, std::sqrt(misfit));
    ++iteration_;

    if (config_.snapshot_every > 0 && iteration_ % config_.snapshot_every == 0) {
        run_.snapshot_iterations.push_back(iteration_);
        run_.snapshots.push_back(c_);
    }
    if (config_.checkpoint_every > 0 && iteration_ % config_.checkpoint_every == 0)
        save_checkpoint(config_.checkpoint_path);
}

void RbpDipSolver::log_record(double loss, double alpha, double beta_value, double misfit)
{
    IterationRecord rec;
    rec.iteration = iteration_;
    rec.loss = loss;
    rec.residual_norm = norm2(r_.values);
    rec.data_misfit = misfit;
    rec.alpha = alpha;
    rec.beta = beta_value;
    if (ground_truth_)
        rec.snr_db = snr_db(c_, *ground_truth_);
    run_.records.push_back(rec);
}

Reconstruction RbpDipSolver::run()
{
    while (iteration_ < config_.max_iters)
        step();
    run_.stop_reason = "max-iters";
    return {c_, run_};
}

// State layout (little-endian):
//   char[8] "RBPDSTAT", u32 version, u32 mode, u64 seed, u32 iteration,
//   u32 width, u32 height, f64 c[w*h], f64 z[w*h],
//   u32 accumulator count, per accumulator: u64 length, f64 values[length]
void RbpDipSolver::save_checkpoint(const std::filesystem::path& path) const
{
    using detail::put_le;
    net_.save(std::filesystem::path(path.string() + ".unet"));

    std::vector<unsigned char> out;
    detail::put_magic(out, kStateMagic);
    put_le<std::uint32_t>(out, kStateVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(config_.mode));
    put_le<std::uint64_t>(out, config_.seed);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(iteration_));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c_.width));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c_.height));
    for (double v : c_.values)
        put_le<double>(out, v);
    for (double v : z_.values)
        put_le<double>(out, v);
    const auto accs = optimizer_.accumulators();
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(accs.size()));
    for (const auto& acc : accs) {
        put_le<std::uint64_t>(out, acc.size());
        for (double v : acc)
            put_le<double>(out, v);
    }
    detail::write_file(std::filesystem::path(path.string() + ".state"), out);
}

void RbpDipSolver::load_checkpoint(const std::filesystem::path& path)
{
    UNet loaded = UNet::load(std::filesystem::path(path.string() + ".unet"));
    if (loaded.layers().size() != net_.layers().size())
        throw IoError("rbp checkpoint: network layout does not match");
    for (std::size_t i = 0; i < loaded.layers().size(); ++i) {
        auto& dst = net_.layers()[i];
        const auto& src = loaded.layers()[i];
        if (!(dst.weight.shape() == src.weight.shape()))
            throw IoError("rbp checkpoint: layer " + dst.name + " shape mismatch");
        std::ranges::copy(src.weight.values(), dst.weight.values().begin());
        std::ranges::copy(src.bias.values(), dst.bias.values().begin());
    }

    const auto bytes = detail::read_file(std::filesystem::path(path.string() + ".state"));
    const unsigned char* cur = bytes.data();
    detail::ByteReader in(cur, bytes.data() + bytes.size(), "rbp checkpoint");
    in.expect_magic(kStateMagic);
    if (in.get<std::uint32_t>() != kStateVersion)
        throw IoError("rbp checkpoint: unsupported version");
    if (in.get<std::uint32_t>() != static_cast<std::uint32_t>(config_.mode))
        throw IoError("rbp checkpoint: mode does not match");
    if (in.get<std::uint64_t>() != config_.seed)
        throw IoError("rbp checkpoint: seed does not match");
    const int iteration = static_cast<int>(in.get<std::uint32_t>());
    const int w = static_cast<int>(in.get<std::uint32_t>());
    const int h = static_cast<int>(in.get<std::uint32_t>());
    if (w != c_.width || h != c_.height)
        throw IoError("rbp checkpoint: image size does not match");
    for (double& v : c_.values)
        v = in.get<double>();
    for (double& v : z_.values)
        v = in.get<double>();
    auto& accs = optimizer_.mutable_accumulators();
    if (in.get<std::uint32_t>() != accs.size())
        throw IoError("rbp checkpoint: optimizer state does not match network");
    for (auto& acc : accs) {
        if (in.get<std::uint64_t>() != acc.size())
            throw IoError("rbp checkpoint: optimizer accumulator size mismatch");
        for (double& v : acc)
            v = in.get<double>();
    }
    if (in.remaining() != 0)
        throw IoError("rbp checkpoint: trailing bytes");
    iteration_ = iteration;
    normal_residual(atg_, c_.values, *projector_, r_.values, sino_scratch_);
}

Reconstruction rbp_dip_reconstruct(const Sinogram& sino, const ParallelGeometry& geom, const RbpConfig& config,
                                   const Image* ground_truth)
{
    RbpConfig cfg = config;
    cfg.mode = ReconMode::rbp_dip;
    return RbpDipSolver(sino, geom, cfg, ground_truth).run();
}

Reconstruction dip_reconstruct(const Sinogram& sino, const ParallelGeometry& geom, const RbpConfig& config,
                               const Image* ground_truth)
{
    if (config.mode != ReconMode::dip_fixed)
        throw ConfigError("dip_reconstruct: config mode must be dip-fixed");
    return RbpDipSolver(sino, geom, config, ground_truth).run();
}

} // namespace rbpdip
