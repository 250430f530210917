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

#include "xdt/nn/grad_check.h"
#include "test_util.h"

namespace xdt::testing {

// Step-2 trainable parameters in the order the gradient is flattened.
inline ParamList step2_params(TrainerState& state) {
  ParamList out = state.target.params();
  state.transfer->gating.collect(out);
  state.transfer->mapper.collect(out);
  for (auto& p : state.transfer->projections) p.collect(out);
  return out;
}

inline Vector flatten_step2(Step2Grads& g) {
  ParamList out = g.target.params();
  g.transfer.gating.collect(out);
  g.transfer.mapper.collect(out);
  for (auto& p : g.transfer.projections) p.collect(out);
  return flatten(out);
}

inline double step2_grad_error(TrainerState& state, const Batch& target, const Batch& mixed,
                               const HyperParams& hyper, const TransferSpec& spec,
                               double eps = 1e-5) {
  return grad_check_params(
      step2_params(state),
      [&](Vector* grad) {
        if (grad == nullptr) {
          return step2_objective(state, target, mixed, hyper, spec, nullptr).step2_total;
        }
        Step2Grads g;
        const double loss =
            step2_objective(state, target, mixed, hyper, spec, &g).step2_total;
        *grad = flatten_step2(g);
        return loss;
      },
      eps);
}

inline double step1_grad_error(TrainerState& state, const Batch& mixed,
                               const TransferSpec& spec, double eps = 1e-5) {
  ParamList params;
  state.transfer->discriminator.collect(params);
  return grad_check_params(
      params,
      [&](Vector* grad) {
        if (grad == nullptr) return step1_objective(state, mixed, spec, nullptr);
        Discriminator g;
        const double loss = step1_objective(state, mixed, spec, &g);
        ParamList gp;
        g.collect(gp);
        *grad = flatten(gp);
        return loss;
      },
      eps);
}

// First `n` rows of a dataset as a batch.
inline Batch head_batch(const PeriodDataset& data, std::size_t n) {
  std::vector<std::size_t> rows(std::min(n, data.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return make_batch(data, rows);
}

inline std::vector<Vector> source_snapshots(const TrainerState& state) {
  std::vector<Vector> out;
  for (const auto& s : state.sources) out.push_back(params_of(s));
  return out;
}

template <typename Module>
Vector module_params(Module m) {
  ParamList p;
  m.collect(p);
  return flatten(p);
}

}  // namespace xdt::testing
