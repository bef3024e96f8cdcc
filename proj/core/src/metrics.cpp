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

#include "rbpdip/metrics.hpp"

#include <cmath>
#include <limits>

#include "rbpdip/error.hpp"

namespace rbpdip {

double snr_db(std::span<const double> rec, std::span<const double> gt)
{
    if (rec.size() != gt.size())
        throw InvalidInput("snr: image sizes differ");
    double signal = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        signal += gt[i] * gt[i];
        const double e = rec[i] - gt[i];
        error += e * e;
    }
    if (signal == 0.0)
        throw InvalidInput("snr: ground truth is all zero");
    if (error == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(signal / error);
}

double snr_db(const Image& rec, const Image& gt)
{
    if (!rec.same_shape(gt))
        throw InvalidInput("snr: image dimensions differ");
    return snr_db(rec.span(), gt.span());
}

} // namespace rbpdip
