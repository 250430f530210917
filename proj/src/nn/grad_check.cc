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

#include "xdt/nn/grad_check.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xdt {

double grad_check(const LossWithGrad& loss, const Vector& point, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-4)) {
    throw std::invalid_argument("grad_check: eps " + std::to_string(eps) +
                                " outside [1e-7, 1e-4]");
  }
  Vector analytic = Vector::Zero(point.size());
  const double base = loss(point, &analytic);
  if (!std::isfinite(base)) throw NumericError("grad_check: non-finite loss");

  Vector probe = point;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    probe[i] = point[i] + eps;
    const double up = loss(probe, nullptr);
    probe[i] = point[i] - eps;
    const double down = loss(probe, nullptr);
    probe[i] = point[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("grad_check: non-finite loss at coordinate " +
                         std::to_string(i));
    }
    const double numeric = (up - down) / (2.0 * eps);
    const double err =
        std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(analytic[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

double grad_check_params(const ParamList& params,
                         const std::function<double(Vector* grad)>& loss,
                         double eps) {
  const Vector original = flatten(params);
  const LossWithGrad fn = [&](const Vector& point, Vector* grad) {
    unflatten(point, params);
    return loss(grad);
  };
  double result = 0.0;
  try {
    result = grad_check(fn, original, eps);
  } catch (...) {
    unflatten(original, params);
    throw;
  }
  unflatten(original, params);
  return result;
}

}  // namespace xdt
