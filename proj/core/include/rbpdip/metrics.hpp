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

#include "rbpdip/image.hpp"

namespace rbpdip {

/// 20 log10(||gt|| / ||rec - gt||) in dB. Returns +infinity when rec == gt.
double snr_db(std::span<const double> rec, std::span<const double> gt);
double snr_db(const Image& rec, const Image& gt);

} // namespace rbpdip
