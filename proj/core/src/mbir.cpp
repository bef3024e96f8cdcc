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

#include "rbpdip/mbir.hpp"

#include <cmath>
#include <memory>
#include <vector>

#include "rbpdip/error.hpp"
#include "rbpdip/metrics.hpp"

namespace rbpdip {

StepSize sd_step_size(std::span<const double> r, const NormalOperator& op)
{
    const double rr = dot(r, r);
    if (rr == 0.0)
        return {StepStatus::converged, 0.0};
    std::vector<double> ar(r.size());
    op(r, ar);
    const double rar = dot(r, ar);
    if (!(rar > 0.0))
        return {StepStatus::null_space, 0.0};
    return {StepStatus::ok, rr / rar};
}

StepSize sd_step_size(const Image& r, const ParallelGeometry& geom)
{
    return sd_step_size(r.span(), make_normal_operator(geom));
}

void normal_residual(std::span<const double> atg, std::span<const double> c, const ParallelGeometry& geom,
                     std::span<double> r, std::span<double> sino_scratch)
{
    forward_project(c, geom, sino_scratch);
    back_project(sino_scratch, geom, r);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = atg[i] - r[i];
}

void normal_residual(std::span<const double> atg, std::span<const double> c, const Projector& projector,
                     std::span<double> r, std::span<double> sino_scratch)
{
    projector.normal(c, r, sino_scratch);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = atg[i] - r[i];
}

namespace {

double misfit(std::span<const double> g, std::span<const double> ac)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = g[i] - ac[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace

Reconstruction mbir_reconstruct(const Sinogram& sino, const ParallelGeometry& geom, const MbirOptions& options,
                                const Image* ground_truth)
{
    if (sino.values.empty())
        throw InvalidInput("mbir: empty sinogram");
    if (!(sino.geometry == geom))
        throw InvalidInput("mbir: sinogram geometry does not match");
    sino.validate();
    if (options.max_iters < 1)
        throw InvalidInput("mbir: max_iters must be at least 1");
    if (!(options.stop_tol >= 0.0))
        throw InvalidInput("mbir: stop_tol must be non-negative");

    const std::size_t n = static_cast<std::size_t>(geom.image_width) * geom.image_height;
    const auto projector = std::make_shared<const Projector>(geom);
    std::vector<double> atg(n);
    projector->back(sino.values, atg);
    const double atg_norm = norm2(atg);

    Reconstruction out;
    out.image = Image(geom.image_width, geom.image_height);
    auto& c = out.image.values;
    std::vector<double> r = atg;
    std::vector<double> ac(geom.sinogram_size());
    const auto op = make_normal_operator(projector);

    auto log = [&](int it, double alpha) {
        IterationRecord rec;
        rec.iteration = it;
        rec.residual_norm = norm2(r);
        rec.loss = rec.residual_norm;
        rec.data_misfit = misfit(sino.values, ac);
        rec.alpha = alpha;
        rec.beta = 1.0;
        if (ground_truth)
            rec.snr_db = snr_db(out.image, *ground_truth);
        out.run.records.push_back(rec);
    };

    if (atg_norm == 0.0) {
        log(0, 0.0);
        out.run.stop_reason = "converged";
        return out;
    }

    for (int it = 0; it < options.max_iters; ++it) {
        const StepSize step = sd_step_size(r, op);
        if (step.status != StepStatus::ok) {
            log(it, 0.0);
            out.run.stop_reason = step.status == StepStatus::converged ? "converged" : "null-space";
            return out;
        }
        for (std::size_t i = 0; i < n; ++i)
            c[i] = c[i] + step.alpha * r[i];
        normal_residual(atg, c, *projector, r, ac);
        log(it, step.alpha);
        if (norm2(r) / atg_norm <= options.stop_tol) {
            out.run.stop_reason = "tolerance";
            return out;
        }
    }
    out.run.stop_reason = "max-iters";
    return out;
}

} // namespace rbpdip
