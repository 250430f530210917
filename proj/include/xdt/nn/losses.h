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

#include "xdt/nn/matrix.h"

namespace xdt {

inline constexpr double kLogClamp = 1e-12;

// Mean binary cross-entropy of probabilities `p` against labels `y`, with the
// logs clamped at 1e-12. Shared by every cross-entropy in the project.
double binary_cross_entropy(const Vector& p, const Vector& y);

// dL/dlogit for p = sigmoid(logit) under binary_cross_entropy: (p - y) / n.
Vector binary_cross_entropy_logit_grad(const Vector& p, const Vector& y);

}  // namespace xdt
