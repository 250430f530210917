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

#include "xdt/nn/matrix.h"

#include <algorithm>
#include <cstring>

namespace xdt {

std::string shape_string(Eigen::Index rows, Eigen::Index cols) {
  return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

void require_shape(std::string_view what, Eigen::Index rows, Eigen::Index cols,
                   Eigen::Index want_rows, Eigen::Index want_cols) {
  if (rows != want_rows || cols != want_cols) {
    throw DimensionError(std::string(what) + ": expected " +
                         shape_string(want_rows, want_cols) + ", got " +
                         shape_string(rows, cols));
  }
}

std::size_t total_size(const ParamList& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.size();
  return n;
}

Vector flatten(const ParamList& params) {
  Vector flat(static_cast<Eigen::Index>(total_size(params)));
  Eigen::Index offset = 0;
  for (const auto& p : params) {
    std::copy(p.begin(), p.end(), flat.data() + offset);
    offset += static_cast<Eigen::Index>(p.size());
  }
  return flat;
}

void unflatten(const Vector& flat, const ParamList& params) {
  if (static_cast<std::size_t>(flat.size()) != total_size(params)) {
    throw DimensionError("unflatten: expected " +
                         std::to_string(total_size(params)) +
                         " values, got " + std::to_string(flat.size()));
  }
  Eigen::Index offset = 0;
  for (const auto& p : params) {
    std::copy(flat.data() + offset, flat.data() + offset + p.size(), p.begin());
    offset += static_cast<Eigen::Index>(p.size());
  }
}

void zero(const ParamList& params) {
  for (const auto& p : params) std::fill(p.begin(), p.end(), 0.0);
}

bool bit_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

}  // namespace xdt
