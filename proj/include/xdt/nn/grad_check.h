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

#include <functional>

#include "xdt/nn/matrix.h"

namespace xdt {

// Loss over a flat parameter vector. When `grad` is non-null it receives the
// analytic gradient (same length as `point`).
using LossWithGrad = std::function<double(const Vector& point, Vector* grad)>;

// Max over coordinates of |analytic - central difference| / max(1, |analytic|).
// eps must lie in [1e-7, 1e-4].
double grad_check(const LossWithGrad& loss, const Vector& point, double eps);

// Adapts a module exposed through a ParamList: the loss closure reads the
// live parameters, which are overwritten with each probed point and restored
// afterwards.
double grad_check_params(const ParamList& params,
                         const std::function<double(Vector* grad)>& loss,
                         double eps);

}  // namespace xdt
