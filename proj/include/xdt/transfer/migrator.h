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

#include <random>
#include <span>

#include "xdt/nn/matrix.h"

namespace xdt {

struct KDConfig {
  double tau = 10.0;
  double beta1 = 0.1;
  double beta2 = 0.1;
  int num_spots = 1;

  void validate() const;
};

// W_KD for one distillation spot: fixed identity when teacher and student
// widths agree, a learned (student × teacher) map otherwise.
struct Projection {
  Matrix weight;
  bool identity = true;

  void collect(ParamList& out) {
    if (!identity) out.push_back(as_span(weight));
  }
  Projection zeros_like() const {
    return {identity ? Matrix() : Matrix::Zero(weight.rows(), weight.cols()),
            identity};
  }
};

Projection make_projection(int teacher_width, int student_width,
                           std::mt19937_64& rng);
Matrix project(const Projection& proj, const Matrix& teacher);

// Mean over samples and dimensions of (W_KD e_s - e_T)^2. Gradients are
// written (overwritten) into the non-null outputs; `grad_proj` accumulates.
double middle_distill_loss(const Matrix& teacher, const Matrix& student,
                           const Projection& proj, Matrix* grad_teacher,
                           Matrix* grad_student, Projection* grad_proj);

// Mean over samples of KL(softmax(Z_s/tau) || softmax(Z_t/tau)) via
// log-softmax, without tau^2 rescaling. Throws on tau <= 0.
double logit_distill_loss(const Matrix& teacher_logits,
                          const Matrix& student_logits, double tau,
                          Matrix* grad_teacher, Matrix* grad_student);

// beta1 * sum(middle) + beta2 * kl.
double kd_total(std::span<const double> middle, double kl, double beta1,
                double beta2);

}  // namespace xdt
