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

#include <limits>
#include <string>
#include <vector>

#include "rbpdip/image.hpp"

namespace rbpdip {

struct IterationRecord {
    int iteration = 0;
    // Method objective: ||r||_2 for MBIR, the Huber loss for network methods.
    double loss = 0.0;
    // ||A^T g - A^T A c||_2 after the iteration.
    double residual_norm = 0.0;
    // ||g - A c||_2 after the iteration.
    double data_misfit = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    // NaN unless a ground truth was supplied.
    double snr_db = std::numeric_limits<double>::quiet_NaN();
};

/// Per-iteration history of one reconstruction.
struct ReconRun {
    std::vector<IterationRecord> records;
    std::vector<int> snapshot_iterations;
    std::vector<Image> snapshots;
    std::string stop_reason;
};

struct Reconstruction {
    Image image;
    ReconRun run;
};

} // namespace rbpdip
