/**
 * Copyright 2026 The visbias Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <span>
#include <vector>

namespace visbias {

// Compensated arithmetic mean. Throws Error(Metric) on empty input.
double mean(std::span<const double> values);

// Sample Pearson correlation. Requires equal lengths, n >= 2 and non-zero
// variance in both vectors; throws Error(Metric) otherwise.
double pearson(std::span<const double> x, std::span<const double> y);

// 1-based fractional ranks; tied values share the average of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace visbias
