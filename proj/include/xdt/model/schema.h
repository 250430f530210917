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

struct CategoricalField {
  std::string name;
  int cardinality = 1;
};

// Feature layout shared by every domain: one embedding table per categorical
// field, dense features appended after the embeddings.
struct FeatureSchema {
  std::vector<CategoricalField> categorical;
  std::vector<std::string> dense;
  int embedding_dim = 8;

  // 4 categorical fields (1000, 500, 100, 10) and 2 dense fields.
  static FeatureSchema standard();

  // Throws std::invalid_argument on cardinality < 1, empty or duplicate names.
  void validate() const;
  int num_categorical() const { return static_cast<int>(categorical.size()); }
  int num_dense() const { return static_cast<int>(dense.size()); }
  // Width of the concatenated embedding + dense input vector.
  int input_width() const {
    return num_categorical() * embedding_dim + num_dense();
  }

  bool operator==(const FeatureSchema&) const = default;
};

inline bool operator==(const CategoricalField& a, const CategoricalField& b) {
  return a.name == b.name && a.cardinality == b.cardinality;
}

using IndexMatrix =
    Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Columnar mini-batch. `label` holds y and `domain` holds the indicator d.
struct Batch {
  IndexMatrix categorical;
  Matrix dense;
  Vector label;
  Vector domain;

  Eigen::Index size() const { return categorical.rows(); }
};

}  // namespace xdt
