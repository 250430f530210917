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
#include <string>
#include <vector>

#include "xdt/nn/matrix.h"

namespace xdt {

// Mann-Whitney rank statistic; tied scores share their average rank. Throws
// std::invalid_argument unless both classes are present.
double auc(const Vector& scores, const Vector& labels);

// Mean binary cross-entropy, logs clamped at 1e-12.
double logloss(const Vector& predictions, const Vector& labels);

struct MetricsRecord {
  int period = 0;
  std::string variant;
  std::uint64_t seed = 0;
  double auc = 0.0;
  double logloss = 0.0;

  bool operator==(const MetricsRecord&) const = default;
};

// Columns period,variant,seed,auc,logloss; metrics in %.6f.
std::string metrics_csv(const std::vector<MetricsRecord>& records);
void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> read_metrics_csv(const std::string& path);

// Writes `text` to `path`, replacing the file.
void write_text(const std::string& path, const std::string& text);

}  // namespace xdt
