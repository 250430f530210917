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
#include <utility>
#include <vector>

#include "json.hpp"
#include "xdt/model/backbone.h"

namespace xdt {

// Versioned binary container: magic, version, JSON metadata, then named
// tensors stored as raw little-endian doubles. Save -> load is bit-exact.
struct TensorArchive {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::pair<std::string, Matrix>> tensors;

  const Matrix& get(const std::string& name) const;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_archive(const std::string& path, const TensorArchive& archive);
// Throws ParseError on a missing file, bad magic or version, or truncation.
TensorArchive load_archive(const std::string& path);

nlohmann::json schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& j);

// Appends the model's tensors under `prefix` and its structure to meta.
void pack_backbone(const Backbone& model, const std::string& prefix,
                   TensorArchive& archive);
Backbone unpack_backbone(const TensorArchive& archive,
                         const std::string& prefix);

void save_backbone(const std::string& path, const Backbone& model);
Backbone load_backbone(const std::string& path);

}  // namespace xdt
