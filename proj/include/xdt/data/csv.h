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

#include <string>

#include "xdt/data/dataset.h"

namespace xdt {

// Columns: categorical fields, dense fields, y, domain, period (in that
// order, header required). Dense values are written with 17 significant
// digits so that write -> load is the identity.
void write_csv(const std::string& path, const PeriodDataset& data);

// `target_domain` decides the indicator d of the loaded samples. Throws
// ParseError citing the 1-based line number for malformed rows, a missing
// column, a non-integer index or a label outside {0, 1}.
PeriodDataset load_csv(const std::string& path, const FeatureSchema& schema,
                       int target_domain);

}  // namespace xdt
