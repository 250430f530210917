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

#include "xdt/nn/adam.h"

#include <cmath>

namespace xdt {

AdamState AdamState::like(const ParamList& params, double lr) {
  AdamState state;
  state.lr = lr;
  for (const auto& p : params) {
    state.first_moment.push_back(Vector::Zero(static_cast<Eigen::Index>(p.size())));
    state.second_moment.push_back(Vector::Zero(static_cast<Eigen::Index>(p.size())));
  }
  return state;
}

void adam_step(const ParamList& params, const ParamList& grads,
               AdamState& state) {
  if (params.size() != grads.size() ||
      params.size() != state.first_moment.size()) {
    throw DimensionError("adam_step: " + std::to_string(params.size()) +
                         " parameter tensors, " + std::to_string(grads.size()) +
                         " gradients, " +
                         std::to_string(state.first_moment.size()) + " moments");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != grads[i].size() ||
        static_cast<Eigen::Index>(params[i].size()) !=
            state.first_moment[i].size()) {
      throw DimensionError("adam_step: tensor " + std::to_string(i) +
                           " has " + std::to_string(params[i].size()) +
                           " values, gradient " +
                           std::to_string(grads[i].size()));
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double* p = params[i].data();
    const double* g = grads[i].data();
    double* m = state.first_moment[i].data();
    double* v = state.second_moment[i].data();
    for (std::size_t j = 0; j < params[i].size(); ++j) {
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      p[j] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

}  // namespace xdt
