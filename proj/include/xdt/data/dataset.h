// Copyright 2026 The xdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xdt/model/schema.h"

namespace xdt {

// One labeled interaction. `indicator` is the domain indicator d (1 = target).
struct Sample {
  std::vector<std::int32_t> categorical;
  std::vector<double> dense;
  int label = 0;
  int indicator = 0;
  int domain_id = 0;
  int period = 0;

  bool operator==(const Sample&) const = default;
};

// Domain id of a dataset assembled from several domains.
inline constexpr int kMixedDomain = -1;

// Samples of one (domain, period) cell. A mixed dataset carries
// domain_id == kMixedDomain and keeps the original domain on each sample.
struct PeriodDataset {
  std::vector<Sample> samples;
  int domain_id = 0;
  int period = 0;
  FeatureSchema schema;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  bool operator==(const PeriodDataset&) const = default;
};

Batch make_batch(const PeriodDataset& data, std::span<const std::size_t> rows);
Batch make_batch(const PeriodDataset& data);

// Click-through rate of the dataset (mean label).
double click_rate(const PeriodDataset& data);

// 1:1 mixed set for the adversarial extractor. Holds |target| samples:
// ceil(|target|/2) source samples (d = 0), each drawn by picking a non-empty
// source uniformly and then a sample uniformly within it, and floor(|target|/2)
// distinct target samples (d = 1); the result is shuffled with `seed`.
PeriodDataset build_mixed(std::span<const PeriodDataset* const> sources,
                          const PeriodDataset& target, std::uint64_t seed);

}  // namespace xdt
