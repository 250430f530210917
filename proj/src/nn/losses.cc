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

#include "xdt/nn/losses.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xdt {

double binary_cross_entropy(const Vector& p, const Vector& y) {
  if (p.size() == 0) throw std::invalid_argument("cross-entropy: empty batch");
  if (p.size() != y.size()) {
    throw DimensionError("cross-entropy: " + std::to_string(p.size()) +
                         " predictions vs " + std::to_string(y.size()) +
                         " labels");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pos = std::max(p[i], kLogClamp);
    const double neg = std::max(1.0 - p[i], kLogClamp);
    sum -= y[i] * std::log(pos) + (1.0 - y[i]) * std::log(neg);
  }
  return sum / static_cast<double>(p.size());
}

Vector binary_cross_entropy_logit_grad(const Vector& p, const Vector& y) {
  if (p.size() != y.size()) {
    throw DimensionError("cross-entropy grad: " + std::to_string(p.size()) +
                         " predictions vs " + std::to_string(y.size()) +
                         " labels");
  }
  return (p - y) / static_cast<double>(p.size());
}

}  // namespace xdt
