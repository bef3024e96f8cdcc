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

#include "rbpdip/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "rbpdip/error.hpp"
#include "rbpdip/io.hpp"
#include "rbpdip/metrics.hpp"
#include "rbpdip/projection.hpp"
#include "rbpdip/simulate.hpp"

namespace rbpdip {

std::string_view to_string(SweepKind kind)
{
    switch (kind) {
    case SweepKind::sparse_view:
        return "sparse-view";
    case SweepKind::limited_angle:
        return "limited-angle";
    case SweepKind::low_dose:
        return "low-dose";
    case SweepKind::perturbation:
        return "perturbation";
    }
    return "unknown";
}

SweepKind parse_sweep_kind(std::string_view text)
{
    for (auto k : {SweepKind::sparse_view, SweepKind::limited_angle, SweepKind::low_dose, SweepKind::perturbation})
        if (text == to_string(k))
            return k;
    throw ConfigError("unknown sweep kind '" + std::string(text) + "'");
}

std::string_view to_string(Method method)
{
    switch (method) {
    case Method::mbir:
        return "mbir";
    case Method::dip_fixed:
        return "dip-fixed";
    case Method::rbp_dip:
        return "rbp-dip";
    }
    return "unknown";
}

Method parse_method(std::string_view text)
{
    if (text == "mbir")
        return Method::mbir;
    if (text == "dip-fixed" || text == "dip")
        return Method::dip_fixed;
    if (text == "rbp-dip")
        return Method::rbp_dip;
    throw ConfigError("unknown method '" + std::string(text) + "'");
}

namespace {

bool is_whole(double v)
{
    return std::isfinite(v) && v == std::floor(v);
}

std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string error_code(const std::exception_ptr& e)
{
    try {
        std::rethrow_exception(e);
    } catch (const ConfigError&) {
        return "E_CONFIG";
    } catch (const InvalidInput&) {
        return "E_INPUT";
    } catch (const IoError&) {
        return "E_IO";
    } catch (const NumericalError&) {
        return "E_NUMERICAL";
    } catch (...) {
        return "E_INTERNAL";
    }
}

std::string error_message(const std::exception_ptr& e)
{
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

struct GridPoint {
    double value = 0.0;
    Image gt;
    ParallelGeometry geom;
    Sinogram sino;
};

GridPoint build_point(const SweepSpec& spec, const Image& base, double value)
{
    GridPoint p;
    p.value = value;
    p.gt = spec.kind == SweepKind::perturbation ? rotate_image(base, value) : base;
    int views = spec.views;
    double range = spec.range_deg;
    if (spec.kind == SweepKind::sparse_view) {
        views = static_cast<int>(value);
        range = 180.0;
    } else if (spec.kind == SweepKind::limited_angle) {
        views = static_cast<int>(value);
        range = value;
    }
    p.geom = uniform_geometry(base.width, base.height, views, range, spec.detector_count, spec.detector_spacing);
    p.sino = make_sinogram(p.gt, p.geom);
    if (spec.kind == SweepKind::low_dose) {
        const double peak = max_abs(p.sino.values);
        const double scale = peak > 0.0 ? spec.peak_line_integral / peak : 1.0;
        for (double& v : p.sino.values)
            v *= scale;
        p.sino = poisson_noise(p.sino, NoiseSpec{value, spec.seed});
        for (double& v : p.sino.values)
            v /= scale;
    }
    return p;
}

SweepRow run_one(const SweepSpec& spec, const GridPoint& point, Method method)
{
    SweepRow row;
    row.method = method;
    row.grid_value = point.value;
    row.run_dir = spec.output_dir / run_name(method, point.value);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::filesystem::create_directories(row.run_dir);
        Reconstruction rec;
        if (method == Method::mbir) {
            rec = mbir_reconstruct(point.sino, point.geom, spec.mbir, &point.gt);
        } else {
            RbpConfig cfg = spec.rbp;
            cfg.seed = spec.seed;
            cfg.mode = method == Method::rbp_dip ? ReconMode::rbp_dip : ReconMode::dip_fixed;
            if (cfg.checkpoint_every > 0)
                cfg.checkpoint_path = row.run_dir / "checkpoint";
            rec = RbpDipSolver(point.sino, point.geom, cfg, &point.gt).run();
        }
        save_image(rec.image, row.run_dir / "recon.pgm", 16);
        // Scored on the emitted pair (clamped to [0, 1], 16-bit) so the
        // summary can be recomputed from the files alone.
        row.snr_db = snr_db(load_image(row.run_dir / "recon.pgm"),
                            load_image(spec.output_dir / ("gt_" + format_grid_value(point.value) + ".pgm")));
        row.final_loss = rec.run.records.empty() ? 0.0 : rec.run.records.back().loss;
        row.iterations = static_cast<int>(rec.run.records.size());
        if (point.gt.width == point.gt.height)
            row.unmeasured_fraction = wedge_energy(rec.image, point.geom, spec.wedge_band_deg).unmeasured_fraction();
        else
            row.unmeasured_fraction = std::numeric_limits<double>::quiet_NaN();
        write_curve_csv(rec.run, row.run_dir / "curve.csv");
    } catch (...) {
        const auto e = std::current_exception();
        row.status = error_code(e);
        row.message = error_message(e);
        row.snr_db = std::numeric_limits<double>::quiet_NaN();
        row.final_loss = std::numeric_limits<double>::quiet_NaN();
        row.unmeasured_fraction = std::numeric_limits<double>::quiet_NaN();
        std::ofstream(row.run_dir / "error.txt") << row.status << ": " << row.message << "\n";
    }
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

} // namespace

void SweepSpec::validate() const
{
    if (grid.empty())
        throw ConfigError("sweep: grid is empty");
    if (methods.empty())
        throw ConfigError("sweep: method list is empty");
    for (std::size_t i = 0; i < methods.size(); ++i)
        for (std::size_t j = i + 1; j < methods.size(); ++j)
            if (methods[i] == methods[j])
                throw ConfigError("sweep: method '" + std::string(to_string(methods[i])) + "' listed twice");
    for (double v : grid) {
        switch (kind) {
        case SweepKind::sparse_view:
            if (!is_whole(v) || v < 1.0)
                throw ConfigError("sweep: sparse-view grid values must be positive view counts");
            break;
        case SweepKind::limited_angle:
            if (!is_whole(v) || v < 1.0 || v > 180.0)
                throw ConfigError("sweep: limited-angle grid values must be whole degrees in [1, 180]");
            break;
        case SweepKind::low_dose:
            if (!(v > 0.0) || !std::isfinite(v))
                throw ConfigError("sweep: low-dose grid values must be positive I0");
            break;
        case SweepKind::perturbation:
            if (!std::isfinite(v))
                throw ConfigError("sweep: rotation angles must be finite");
            break;
        }
    }
    if (image_path.empty() && phantom_size < 16)
        throw ConfigError("sweep: phantom size must be at least 16");
    if (views < 1)
        throw ConfigError("sweep: views must be positive");
    if (!(range_deg > 0.0) || range_deg > 180.0)
        throw ConfigError("sweep: range must lie in (0, 180] degrees");
    if (detector_count < 0)
        throw ConfigError("sweep: detector count must be non-negative");
    if (!(detector_spacing > 0.0) || !std::isfinite(detector_spacing))
        throw ConfigError("sweep: detector spacing must be positive");
    if (!(peak_line_integral > 0.0) || !std::isfinite(peak_line_integral))
        throw ConfigError("sweep: peak line integral must be positive");
    if (!(wedge_band_deg >= 0.0))
        throw ConfigError("sweep: wedge band must be non-negative");
    if (jobs < 1)
        throw ConfigError("sweep: jobs must be at least 1");
    if (mbir.max_iters < 1 || !(mbir.stop_tol >= 0.0))
        throw ConfigError("sweep: invalid mbir options");
    RbpConfig rbp_check = rbp;
    rbp_check.checkpoint_path = "checkpoint";
    rbp_check.validate();
}

std::string format_grid_value(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", value);
    return buf;
}

std::string run_name(Method method, double grid_value)
{
    return std::string(to_string(method)) + "_" + format_grid_value(grid_value);
}

void write_curve_csv(const ReconRun& run, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "# rbpdip-curve v1\n";
    out << "iteration,loss,log_loss,residual_norm,data_misfit,alpha,beta,snr_db\n";
    for (const auto& r : run.records) {
        out << r.iteration << ',' << fmt(r.loss) << ',' << fmt(std::log(r.loss)) << ',' << fmt(r.residual_norm) << ','
            << fmt(r.data_misfit) << ',' << fmt(r.alpha) << ',' << fmt(r.beta) << ',' << fmt(r.snr_db) << '\n';
    }
    if (!out)
        throw IoError("write failed for " + path.string());
}

void write_summary_csv(const std::vector<SweepRow>& rows, bool stable, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "# rbpdip-summary v1\n";
    out << "method,grid_value,status,snr_db,final_loss,unmeasured_fraction,iterations";
    if (!stable)
        out << ",wall_time_s";
    out << '\n';
    for (const auto& r : rows) {
        out << to_string(r.method) << ',' << format_grid_value(r.grid_value) << ',' << r.status << ','
            << fmt(r.snr_db) << ',' << fmt(r.final_loss) << ',' << fmt(r.unmeasured_fraction) << ','
            << r.iterations;
        if (!stable)
            out << ',' << fmt(r.wall_time_s);
        out << '\n';
    }
    if (!out)
        throw IoError("write failed for " + path.string());
}

SweepReport run_sweep(const SweepSpec& spec)
{
    spec.validate();
    const Image base = spec.image_path.empty() ? shepp_logan(spec.phantom_size, spec.phantom_size)
                                               : load_image(spec.image_path);
    std::filesystem::create_directories(spec.output_dir);

    std::vector<GridPoint> points;
    points.reserve(spec.grid.size());
    for (double v : spec.grid) {
        points.push_back(build_point(spec, base, v));
        save_image(points.back().gt, spec.output_dir / ("gt_" + format_grid_value(v) + ".pgm"), 16);
    }

    const std::size_t n_methods = spec.methods.size();
    const std::size_t n_tasks = points.size() * n_methods;
    std::vector<SweepRow> rows(n_tasks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < n_tasks; t = next++)
            rows[t] = run_one(spec, points[t / n_methods], spec.methods[t % n_methods]);
    };
    const int n_threads = static_cast<int>(std::min<std::size_t>(spec.jobs, n_tasks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < n_threads; ++i)
            pool.emplace_back(worker);
    }

    SweepReport report;
    report.rows = std::move(rows);
    report.summary_path = spec.output_dir / "summary.csv";
    write_summary_csv(report.rows, spec.stable, report.summary_path);
    return report;
}

} // namespace rbpdip
