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

#include "xdt/model/schema.h"

#include <set>
#include <stdexcept>

namespace xdt {

FeatureSchema FeatureSchema::standard() {
  FeatureSchema schema;
  schema.categorical = {{"c0", 1000}, {"c1", 500}, {"c2", 100}, {"c3", 10}};
  schema.dense = {"x0", "x1"};
  schema.embedding_dim = 8;
  return schema;
}

void FeatureSchema::validate() const {
  if (embedding_dim < 1) {
    throw std::invalid_argument("schema: embedding_dim must be >= 1, got " +
                                std::to_string(embedding_dim));
  }
  if (categorical.empty() && dense.empty()) {
    throw std::invalid_argument("schema: no features");
  }
  std::set<std::string> seen;
  auto check_name = [&](const std::string& name) {
    if (name.empty()) throw std::invalid_argument("schema: empty field name");
    if (!seen.insert(name).second) {
      throw std::invalid_argument("schema: duplicate field name '" + name + "'");
    }
  };
  for (const auto& field : categorical) {
    check_name(field.name);
    if (field.cardinality < 1) {
      throw std::invalid_argument("schema: field '" + field.name +
                                  "' has cardinality " +
                                  std::to_string(field.cardinality));
    }
  }
  for (const auto& name : dense) check_name(name);
  for (const char* reserved : {"y", "domain", "period"}) {
    if (seen.count(reserved) != 0) {
      throw std::invalid_argument(std::string("schema: field name '") +
                                  reserved + "' is reserved");
    }
  }
}

}  // namespace xdt
