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

#include "xdt/transfer/migrator.h"

#include <cmath>
#include <stdexcept>

#include "xdt/nn/activations.h"
#include "xdt/nn/dense.h"

namespace xdt {

void KDConfig::validate() const {
  if (!(tau > 0)) throw std::invalid_argument("kd: tau must be > 0");
  if (!(beta1 >= 0)) throw std::invalid_argument("kd: beta1 must be >= 0");
  if (!(beta2 >= 0)) throw std::invalid_argument("kd: beta2 must be >= 0");
  if (num_spots < 0) throw std::invalid_argument("kd: num_spots must be >= 0");
}

Projection make_projection(int teacher_width, int student_width,
                           std::mt19937_64& rng) {
  if (teacher_width == student_width) return {Matrix(), true};
  Projection proj{Matrix(student_width, teacher_width), false};
  glorot_fill(proj.weight, teacher_width, student_width, rng);
  return proj;
}

Matrix project(const Projection& proj, const Matrix& teacher) {
  if (proj.identity) return teacher;
  if (teacher.cols() != proj.weight.cols()) {
    throw DimensionError("project: teacher " + shape_string(teacher) +
                         " vs W_KD " + shape_string(proj.weight));
  }
  return teacher * proj.weight.transpose();
}

double middle_distill_loss(const Matrix& teacher, const Matrix& student,
                           const Projection& proj, Matrix* grad_teacher,
                           Matrix* grad_student, Projection* grad_proj) {
  const Matrix projected = project(proj, teacher);
  if (projected.rows() != student.rows() || projected.cols() != student.cols()) {
    throw DimensionError("middle_distill_loss: projected teacher " +
                         shape_string(projected) + " vs student " +
                         shape_string(student));
  }
  const Matrix diff = projected - student;
  const double count = static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() / count;
  const Matrix grad_projected = (2.0 / count) * diff;
  if (grad_student != nullptr) *grad_student = -grad_projected;
  if (grad_teacher != nullptr) {
    *grad_teacher = proj.identity ? grad_projected : Matrix(grad_projected * proj.weight);
  }
  if (grad_proj != nullptr && !proj.identity) {
    grad_proj->weight.noalias() += grad_projected.transpose() * teacher;
  }
  return loss;
}

double logit_distill_loss(const Matrix& teacher_logits,
                          const Matrix& student_logits, double tau,
                          Matrix* grad_teacher, Matrix* grad_student) {
  if (!(tau > 0)) {
    throw std::invalid_argument("logit_distill_loss: tau must be > 0, got " +
                                std::to_string(tau));
  }
  require_shape("logit_distill_loss", student_logits.rows(), student_logits.cols(),
                teacher_logits.rows(), teacher_logits.cols());
  const Matrix log_p = log_softmax_rows(Matrix(teacher_logits / tau));
  const Matrix log_q = log_softmax_rows(Matrix(student_logits / tau));
  const Matrix p = log_p.array().exp().matrix();
  const Matrix gap = log_p - log_q;
  const Vector per_sample = (p.array() * gap.array()).rowwise().sum();
  const double n = static_cast<double>(teacher_logits.rows());
  if (grad_student != nullptr) {
    *grad_student = (log_q.array().exp() - p.array()).matrix() / (n * tau);
  }
  if (grad_teacher != nullptr) {
    *grad_teacher =
        (p.array() * (gap.array().colwise() - per_sample.array())).matrix() / (n * tau);
  }
  return per_sample.sum() / n;
}

double kd_total(std::span<const double> middle, double kl, double beta1,
                double beta2) {
  double sum = 0.0;
  for (double v : middle) sum += v;
  return beta1 * sum + beta2 * kl;
}

}  // namespace xdt
