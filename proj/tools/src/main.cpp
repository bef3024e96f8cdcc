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

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "config_file.hpp"
#include "rbpdip/error.hpp"
#include "rbpdip/gradcheck.hpp"
#include "rbpdip/io.hpp"
#include "rbpdip/mbir.hpp"
#include "rbpdip/metrics.hpp"
#include "rbpdip/projection.hpp"
#include "rbpdip/rbp_dip.hpp"
#include "rbpdip/simulate.hpp"
#include "rbpdip/sweep.hpp"

namespace {

using namespace rbpdip;

constexpr int kExitCheckFailed = 1;
constexpr int kExitRuntime = 2;

struct GeometryFlags {
    int views = 180;
    double range_deg = 180.0;
    int detectors = 0;
    double spacing = kDefaultDetectorSpacing;
};

void add_geometry_flags(CLI::App* cmd, GeometryFlags& g)
{
    cmd->add_option("--views", g.views, "Number of projection angles")->capture_default_str();
    cmd->add_option("--range-deg", g.range_deg, "Angular range in degrees, views spaced range/views apart")
        ->capture_default_str();
    cmd->add_option("--detectors", g.detectors, "Detector bins (0 covers the image at every angle)")
        ->capture_default_str();
    cmd->add_option("--spacing", g.spacing, "Detector spacing in pixels")->capture_default_str();
}

struct NetFlags {
    int depth = 4;
    int base_channels = 16;
    int max_channels = 128;
    int kernel = 3;
    double slope = 0.1;
    double head_scale = UNetConfig{}.head_init_scale;
    std::string downsample = "strided";
    double lr = 1e-4;
    double nc = 4.0;
    double ns = 1000.0;
    double beta_max = 1e-3;
    double delta = 1.0;
    double dip_noise = 0.1;
};

void add_net_flags(CLI::App* cmd, NetFlags& n)
{
    cmd->add_option("--nc", n.nc, "Beta schedule centre n_c")->capture_default_str();
    cmd->add_option("--ns", n.ns, "Beta schedule stretch n_s")->capture_default_str();
    cmd->add_option("--beta-max", n.beta_max, "Beta asymptote")->capture_default_str();
    cmd->add_option("--delta", n.delta, "Huber delta on the scaled residual")->capture_default_str();
    cmd->add_option("--lr", n.lr, "RMSProp learning rate")->capture_default_str();
    cmd->add_option("--depth", n.depth, "U-net encoder levels")->capture_default_str();
    cmd->add_option("--base-channels", n.base_channels, "Channels at the first level")->capture_default_str();
    cmd->add_option("--max-channels", n.max_channels, "Channel cap")->capture_default_str();
    cmd->add_option("--kernel", n.kernel, "Convolution kernel size")->capture_default_str();
    cmd->add_option("--slope", n.slope, "Leaky ReLU slope")->capture_default_str();
    cmd->add_option("--head-scale", n.head_scale, "Scale of the initial 1x1 output layer weights")
        ->capture_default_str();
    cmd->add_option("--downsample", n.downsample, "Encoder downsampling")
        ->check(CLI::IsMember({"strided", "avgpool"}))
        ->capture_default_str();
    cmd->add_option("--dip-noise", n.dip_noise, "dip-fixed input noise amplitude")->capture_default_str();
}

RbpConfig make_rbp_config(const NetFlags& n, int iters, std::uint64_t seed)
{
    RbpConfig cfg;
    cfg.n_c = n.nc;
    cfg.n_s = n.ns;
    cfg.beta_max = n.beta_max;
    cfg.huber_delta = n.delta;
    cfg.max_iters = iters;
    cfg.seed = seed;
    cfg.dip_noise_max = n.dip_noise;
    cfg.optimizer.learning_rate = n.lr;
    cfg.unet.depth = n.depth;
    cfg.unet.base_channels = n.base_channels;
    cfg.unet.max_channels = n.max_channels;
    cfg.unet.kernel_size = n.kernel;
    cfg.unet.activation_slope = n.slope;
    cfg.unet.head_init_scale = n.head_scale;
    cfg.unet.downsample = n.downsample == "avgpool" ? Downsample::avg_pool : Downsample::strided_conv;
    return cfg;
}

Image load_or_phantom(const std::string& path, int size)
{
    return path.empty() ? shepp_logan(size, size) : load_image(path);
}

// phantom ---------------------------------------------------------------

struct PhantomArgs {
    int size = 64;
    int width = 0;
    int height = 0;
    int bits = 16;
    std::string out = "phantom.pgm";
};

int run_phantom(const PhantomArgs& a)
{
    const int w = a.width > 0 ? a.width : a.size;
    const int h = a.height > 0 ? a.height : a.size;
    save_image(shepp_logan(w, h), a.out, a.bits);
    std::cout << "wrote " << a.out << " (" << w << "x" << h << ", " << a.bits << "-bit)\n";
    return 0;
}

// sinogram --------------------------------------------------------------

struct SinogramArgs {
    std::string image;
    int phantom_size = 64;
    GeometryFlags geom;
    double i0 = 0.0;
    double peak = 0.0;
    std::uint64_t seed = 0;
    std::string out = "sinogram.sino";
    std::string csv;
};

int run_sinogram(const SinogramArgs& a)
{
    const Image img = load_or_phantom(a.image, a.phantom_size);
    const auto geom = uniform_geometry(img.width, img.height, a.geom.views, a.geom.range_deg, a.geom.detectors,
                                       a.geom.spacing);
    Sinogram sino = make_sinogram(img, geom);
    if (a.i0 > 0.0) {
        const double peak = max_abs(sino.values);
        const double scale = a.peak > 0.0 && peak > 0.0 ? a.peak / peak : 1.0;
        for (double& v : sino.values)
            v *= scale;
        sino = poisson_noise(sino, NoiseSpec{a.i0, a.seed});
        for (double& v : sino.values)
            v /= scale;
    }
    save_sinogram(sino, a.out);
    if (!a.csv.empty())
        save_sinogram_csv(sino, a.csv);
    std::cout << "wrote " << a.out << " (" << geom.views() << " views x " << geom.detector_count << " detectors";
    if (sino.noise)
        std::cout << ", I0 " << sino.noise->i0 << ", seed " << sino.noise->seed;
    std::cout << ")\n";
    return 0;
}

// reconstruct -----------------------------------------------------------

struct ReconArgs {
    std::string sino;
    std::string method = "mbir";
    int iters = 0;
    double stop_tol = MbirOptions{}.stop_tol;
    std::uint64_t seed = 0;
    std::string gt;
    int checkpoint_every = 0;
    std::string checkpoint;
    bool resume = false;
    NetFlags net;
    std::string out = "recon.pgm";
    std::string curve;
};

int run_reconstruct(const ReconArgs& a)
{
    const Sinogram sino = load_sinogram(a.sino);
    const auto& geom = sino.geometry;
    std::unique_ptr<Image> gt;
    if (!a.gt.empty())
        gt = std::make_unique<Image>(load_image(a.gt));

    Reconstruction rec;
    if (a.method == "mbir") {
        MbirOptions opt;
        opt.max_iters = a.iters > 0 ? a.iters : MbirOptions{}.max_iters;
        opt.stop_tol = a.stop_tol;
        rec = mbir_reconstruct(sino, geom, opt, gt.get());
    } else {
        RbpConfig cfg = make_rbp_config(a.net, a.iters > 0 ? a.iters : RbpConfig{}.max_iters, a.seed);
        cfg.mode = parse_recon_mode(a.method);
        cfg.checkpoint_every = a.checkpoint_every;
        if (!a.checkpoint.empty())
            cfg.checkpoint_path = a.checkpoint;
        RbpDipSolver solver(sino, geom, cfg, gt.get());
        if (a.resume) {
            if (a.checkpoint.empty())
                throw ConfigError("--resume needs --checkpoint");
            solver.load_checkpoint(a.checkpoint);
            std::cout << "resumed at iteration " << solver.iteration() << "\n";
        }
        rec = solver.run();
    }

    save_image(rec.image, a.out, 16);
    if (!a.curve.empty())
        write_curve_csv(rec.run, a.curve);

    std::vector<double> atg(static_cast<std::size_t>(geom.image_width) * geom.image_height);
    back_project(sino.values, geom, atg);
    std::vector<double> r(atg.size());
    std::vector<double> scratch(geom.sinogram_size());
    normal_residual(atg, rec.image.values, geom, r, scratch);
    const double atg_norm = norm2(atg);
    const double ratio = atg_norm > 0.0 ? norm2(r) / atg_norm : 0.0;

    std::printf("method %s\n", a.method.c_str());
    std::printf("iterations %zu\n", rec.run.records.size());
    std::printf("stop %s\n", rec.run.stop_reason.c_str());
    std::printf("final_loss %.9g\n", rec.run.records.empty() ? 0.0 : rec.run.records.back().loss);
    std::printf("residual_ratio %.9g (stop_tol %.3g)\n", ratio, a.stop_tol);
    if (gt)
        std::printf("snr_db %.6f\n", snr_db(rec.image, *gt));
    std::printf("wrote %s\n", a.out.c_str());
    return 0;
}

// sweep -----------------------------------------------------------------

struct SweepArgs {
    std::string kind = "sparse-view";
    std::vector<double> grid;
    std::vector<std::string> methods;
    std::string image;
    int phantom_size = 64;
    GeometryFlags geom;
    double peak = SweepSpec{}.peak_line_integral;
    int iters = 1500;
    int mbir_iters = 0;
    double stop_tol = 0.0;
    NetFlags net;
    double band = SweepSpec{}.wedge_band_deg;
    std::string out = "sweep-out";
    std::uint64_t seed = 0;
    bool stable = false;
    int jobs = 1;
};

int run_sweep_cmd(const SweepArgs& a)
{
    SweepSpec spec;
    spec.kind = parse_sweep_kind(a.kind);
    spec.grid = a.grid;
    for (const auto& m : a.methods)
        spec.methods.push_back(parse_method(m));
    spec.image_path = a.image;
    spec.phantom_size = a.phantom_size;
    spec.views = a.geom.views;
    spec.range_deg = a.geom.range_deg;
    spec.detector_count = a.geom.detectors;
    spec.detector_spacing = a.geom.spacing;
    spec.peak_line_integral = a.peak;
    spec.mbir.max_iters = a.mbir_iters > 0 ? a.mbir_iters : a.iters;
    spec.mbir.stop_tol = a.stop_tol;
    spec.rbp = make_rbp_config(a.net, a.iters, a.seed);
    spec.wedge_band_deg = a.band;
    spec.output_dir = a.out;
    spec.seed = a.seed;
    spec.stable = a.stable;
    spec.jobs = a.jobs;

    const auto report = run_sweep(spec);
    int failures = 0;
    for (const auto& row : report.rows) {
        std::printf("%-9s %8s  %-11s snr %9.4f dB  loss %.4e\n", std::string(to_string(row.method)).c_str(),
                    format_grid_value(row.grid_value).c_str(), row.status.c_str(), row.snr_db, row.final_loss);
        if (row.status != "ok") {
            std::fprintf(stderr, "  %s\n", row.message.c_str());
            ++failures;
        }
    }
    std::printf("wrote %s\n", report.summary_path.string().c_str());
    return failures == 0 ? 0 : kExitCheckFailed;
}

// adjoint-test ----------------------------------------------------------

struct AdjointArgs {
    int trials = 20;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    double spacing = kDefaultDetectorSpacing;
};

int run_adjoint(const AdjointArgs& a)
{
    std::mt19937_64 rng(a.seed);
    std::uniform_int_distribution<int> size(16, 128);
    std::uniform_int_distribution<int> views(1, 180);
    std::uniform_real_distribution<double> range(1.0, 180.0);
    double worst = 0.0;
    for (int t = 0; t < a.trials; ++t) {
        const int w = size(rng);
        const int h = size(rng);
        const int v = t == 0 ? 1 : (t == 1 ? 180 : views(rng));
        const double rg = t < 2 ? 180.0 : range(rng);
        const auto geom = uniform_geometry(w, h, v, rg, 0, a.spacing);
        const double err = adjoint_check(geom, a.seed + static_cast<std::uint64_t>(t));
        worst = std::max(worst, err);
        std::printf("%3d  %3dx%-3d views %3d range %7.3f  discrepancy %.3e\n", t, w, h, v, rg, err);
    }
    std::printf("max discrepancy %.3e (tolerance %.1e)\n", worst, a.tol);
    return worst <= a.tol ? 0 : kExitCheckFailed;
}

// gradcheck -------------------------------------------------------------

struct GradArgs {
    int samples = 50;
    std::uint64_t seed = 0;
    double tol = 1e-4;
};

int run_gradcheck(const GradArgs& a)
{
    bool ok = true;
    for (const auto& r : ad::standard_gradient_suite(a.samples, a.seed)) {
        const bool pass = r.passed(a.tol);
        ok = ok && pass;
        std::printf("%-18s samples %3zu  max rel %.3e  max abs %.3e  %s\n", r.name.c_str(), r.samples,
                    r.max_rel_error, r.max_abs_error, pass ? "ok" : "FAIL");
    }
    return ok ? 0 : kExitCheckFailed;
}

// wedge -----------------------------------------------------------------

struct WedgeArgs {
    std::string image;
    int views = 180;
    double range_deg = 180.0;
    double band = SweepSpec{}.wedge_band_deg;
};

int run_wedge(const WedgeArgs& a)
{
    const Image img = load_image(a.image);
    const auto geom = uniform_geometry(img.width, img.height, a.views, a.range_deg);
    const auto e = wedge_energy(img, geom, a.band);
    std::printf("measured %.9g\nunmeasured %.9g\nunmeasured_fraction %.9g\n", e.measured, e.unmeasured,
                e.unmeasured_fraction());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rbpdip: CT reconstruction with MBIR, deep image prior and residual back projection"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key = value file; keys are the subcommand's long flag names");
    app.config_formatter(std::make_shared<rbpdip::cli::FlatConfig>(&app));
    app.allow_config_extras(CLI::config_extras_mode::error);

    int code = 0;

    PhantomArgs phantom;
    auto* c_phantom = app.add_subcommand("phantom", "Write a Shepp-Logan phantom as PGM");
    c_phantom->add_option("--size", phantom.size, "Square size")->capture_default_str();
    c_phantom->add_option("--width", phantom.width, "Width (overrides --size)");
    c_phantom->add_option("--height", phantom.height, "Height (overrides --size)");
    c_phantom->add_option("--bits", phantom.bits, "PGM bit depth")->check(CLI::IsMember({8, 16}))->capture_default_str();
    c_phantom->add_option("--out,-o", phantom.out, "Output PGM")->capture_default_str();
    c_phantom->callback([&] { code = run_phantom(phantom); });

    SinogramArgs sino;
    auto* c_sino = app.add_subcommand("sinogram", "Project an image (or the phantom) into a sinogram");
    c_sino->add_option("--image", sino.image, "Input PGM (default: phantom)");
    c_sino->add_option("--phantom-size", sino.phantom_size, "Phantom size when no image is given")
        ->capture_default_str();
    add_geometry_flags(c_sino, sino.geom);
    c_sino->add_option("--i0", sino.i0, "Blank measurement for Poisson noise (0: noise-free)")->capture_default_str();
    c_sino->add_option("--peak", sino.peak, "Scale line integrals to this maximum before drawing counts (0: off)")
        ->capture_default_str();
    c_sino->add_option("--seed", sino.seed, "Noise seed")->capture_default_str();
    c_sino->add_option("--out,-o", sino.out, "Output sinogram container")->capture_default_str();
    c_sino->add_option("--csv", sino.csv, "Also write a CSV export");
    c_sino->callback([&] { code = run_sinogram(sino); });

    ReconArgs recon;
    auto* c_recon = app.add_subcommand("reconstruct", "Reconstruct an image from a sinogram");
    c_recon->add_option("--sino", recon.sino, "Input sinogram container")->required();
    c_recon->add_option("--method", recon.method, "Reconstruction method")
        ->check(CLI::IsMember({"mbir", "dip", "dip-fixed", "rbp-dip"}))
        ->capture_default_str();
    c_recon->add_option("--iters", recon.iters, "Iterations (0: method default)")->capture_default_str();
    c_recon->add_option("--stop-tol", recon.stop_tol, "MBIR relative residual tolerance")->capture_default_str();
    c_recon->add_option("--seed", recon.seed, "Network and input-noise seed")->capture_default_str();
    c_recon->add_option("--gt", recon.gt, "Ground-truth PGM, used only for SNR logging");
    c_recon->add_option("--checkpoint-every", recon.checkpoint_every, "Checkpoint period (0: off)")
        ->capture_default_str();
    c_recon->add_option("--checkpoint", recon.checkpoint, "Checkpoint path prefix");
    c_recon->add_flag("--resume", recon.resume, "Resume from --checkpoint");
    add_net_flags(c_recon, recon.net);
    c_recon->add_option("--out,-o", recon.out, "Output PGM")->capture_default_str();
    c_recon->add_option("--curve", recon.curve, "Per-iteration CSV");
    c_recon->callback([&] { code = run_reconstruct(recon); });

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "Run a grid of reconstructions and write a report bundle");
    c_sweep->add_option("--kind", sweep.kind, "Sweep kind")
        ->check(CLI::IsMember({"sparse-view", "limited-angle", "low-dose", "perturbation"}))
        ->capture_default_str();
    c_sweep->add_option("--grid", sweep.grid, "Grid values (comma separated)")->delimiter(',')->required();
    c_sweep->add_option("--methods", sweep.methods, "Methods (comma separated: mbir, dip-fixed, rbp-dip)")
        ->delimiter(',');
    c_sweep->add_option("--image", sweep.image, "Ground-truth PGM (default: phantom)");
    c_sweep->add_option("--phantom-size", sweep.phantom_size, "Phantom size")->capture_default_str();
    add_geometry_flags(c_sweep, sweep.geom);
    c_sweep->add_option("--peak", sweep.peak, "Low-dose peak line integral")->capture_default_str();
    c_sweep->add_option("--iters", sweep.iters, "Iterations per run")->capture_default_str();
    c_sweep->add_option("--mbir-iters", sweep.mbir_iters, "MBIR iterations (0: same as --iters)")
        ->capture_default_str();
    c_sweep->add_option("--stop-tol", sweep.stop_tol, "MBIR relative residual tolerance")->capture_default_str();
    add_net_flags(c_sweep, sweep.net);
    c_sweep->add_option("--band", sweep.band, "Wedge tolerance band in degrees")->capture_default_str();
    c_sweep->add_option("--out,-o", sweep.out, "Output directory")->capture_default_str();
    c_sweep->add_option("--seed", sweep.seed, "Sweep seed")->capture_default_str();
    c_sweep->add_flag("--stable", sweep.stable, "Omit wall-clock columns");
    c_sweep->add_option("--jobs,-j", sweep.jobs, "Concurrent runs")->check(CLI::PositiveNumber)->capture_default_str();
    c_sweep->callback([&] {
        if (sweep.methods.empty())
            throw CLI::ValidationError("--methods", "at least one method is required");
        code = run_sweep_cmd(sweep);
    });

    AdjointArgs adj;
    auto* c_adj = app.add_subcommand("adjoint-test", "Dot-product test of the projector pair");
    c_adj->add_option("--trials", adj.trials, "Random geometries")->capture_default_str();
    c_adj->add_option("--seed", adj.seed, "Seed")->capture_default_str();
    c_adj->add_option("--tol", adj.tol, "Pass threshold")->capture_default_str();
    c_adj->add_option("--spacing", adj.spacing, "Detector spacing")->capture_default_str();
    c_adj->callback([&] { code = run_adjoint(adj); });

    GradArgs grad;
    auto* c_grad = app.add_subcommand("gradcheck", "Finite-difference check of every autodiff op and the U-net");
    c_grad->add_option("--samples", grad.samples, "Coordinates per check")->capture_default_str();
    c_grad->add_option("--seed", grad.seed, "Seed")->capture_default_str();
    c_grad->add_option("--tol", grad.tol, "Relative error threshold")->capture_default_str();
    c_grad->callback([&] { code = run_gradcheck(grad); });

    WedgeArgs wedge;
    auto* c_wedge = app.add_subcommand("wedge", "Fourier energy outside the measured angular slices");
    c_wedge->add_option("--image", wedge.image, "Input PGM (square)")->required();
    c_wedge->add_option("--views", wedge.views, "Number of measured angles")->capture_default_str();
    c_wedge->add_option("--range-deg", wedge.range_deg, "Measured angular range")->capture_default_str();
    c_wedge->add_option("--band", wedge.band, "Tolerance band in degrees")->capture_default_str();
    c_wedge->callback([&] { code = run_wedge(wedge); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const rbpdip::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return static_cast<int>(CLI::ExitCodes::ValidationError);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return code;
}
