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
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "xdt/train/trainer.h"

namespace xdt {

// A configuration problem; the message leads with the offending key path.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  RunConfig run;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string output_dir = "runs";
  std::vector<std::string> ablation_variants;  // empty: the default list
  std::string sweep_parameter = "tau";
  std::vector<double> sweep_grid = {1, 10, 20, 30, 40, 50};
  std::vector<int> plug_periods = {3, 6};
};

// Every key is optional; absent keys take their defaults. Unknown keys, type
// mismatches and out-of-range values throw ConfigError naming the key path.
ExperimentConfig config_from_json(const nlohmann::json& j);
// Reads and parses a JSON file. Throws ConfigError for unreadable or
// malformed files.
ExperimentConfig parse_config(const std::string& path);
// The fully resolved form: every key present.
nlohmann::json config_to_json(const ExperimentConfig& config);

// FNV-1a 64 over the resolved config (without output_dir) and the seed, as 16
// hex digits.
std::string run_id(const ExperimentConfig& config, std::uint64_t seed);

}  // namespace xdt
