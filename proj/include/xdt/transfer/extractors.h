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
#include <vector>

#include "xdt/model/backbone.h"
#include "xdt/nn/dense.h"

namespace xdt {

// Two-stage MLP over the target representation whose softmax output assigns
// one scalar weight per source model.
struct GatingNetwork {
  DenseLayer hidden;  // relu
  DenseLayer output;  // identity; softmax is applied by gate_forward
  AccessCounter reads;

  int num_sources() const { return static_cast<int>(output.out_width()); }
  void collect(ParamList& out) {
    hidden.collect(out);
    output.collect(out);
  }
  GatingNetwork zeros_like() const { return {hidden.zeros_like(), output.zeros_like(), {}}; }
};

GatingNetwork make_gating(int repr_width, int hidden_width, int num_sources,
                          std::mt19937_64& rng);

struct GateTrace {
  Matrix hidden;
  Matrix weights;  // batch × N, rows on the simplex
};

GateTrace gate_forward(const GatingNetwork& gating, const Matrix& target_repr);
Matrix gate_weights(const GatingNetwork& gating, const Matrix& target_repr);
// Every row equal to 1/N.
Matrix uniform_gate(Eigen::Index batch, int num_sources);

// Returns dL/d(target_repr); parameter gradients go into `grad` if non-null.
Matrix gate_backward(const GatingNetwork& gating, const Matrix& target_repr,
                     const GateTrace& trace, const Matrix& grad_weights,
                     GatingNetwork* grad);

struct Aggregate {
  Matrix representation;
  Matrix logits;
};

// e_s = sum_n g_n e_n and Z_s = sum_n g_n Z_n, summed in source order with the
// same scalar weight on both. `logits` may be empty to aggregate only the
// representations.
Aggregate aggregate_sources(std::span<const Matrix> reprs,
                            std::span<const Matrix> logits, const Matrix& gate);

// dL/dg from dL/de_s and dL/dZ_s; a zero-size gradient is skipped.
Matrix aggregate_gate_grad(std::span<const Matrix> reprs,
                           std::span<const Matrix> logits,
                           const Matrix& grad_repr, const Matrix& grad_logits);

// Square linear map e' = e · Wᵀ, identity at initialization.
struct Mapper {
  Matrix weight;
  AccessCounter reads;

  void collect(ParamList& out) { out.push_back(as_span(weight)); }
  Mapper zeros_like() const { return {Matrix::Zero(weight.rows(), weight.cols()), {}}; }
};

Mapper make_identity_mapper(int width);
Matrix map_representation(const Mapper& mapper, const Matrix& repr);
Matrix mapper_backward(const Mapper& mapper, const Matrix& input,
                       const Matrix& grad_output, Mapper* grad);

// Two-stage MLP with a scalar sigmoid output: P(sample is from the target).
struct Discriminator {
  DenseLayer hidden;  // relu
  DenseLayer output;  // identity, one unit; sigmoid applied on top
  AccessCounter reads;

  void collect(ParamList& out) {
    hidden.collect(out);
    output.collect(out);
  }
  Discriminator zeros_like() const { return {hidden.zeros_like(), output.zeros_like(), {}}; }
};

Discriminator make_discriminator(int repr_width, int hidden_width,
                                 std::mt19937_64& rng);

struct DiscriminatorTrace {
  Matrix hidden;
  Vector prob;
};

DiscriminatorTrace discriminator_forward(const Discriminator& dis,
                                         const Matrix& repr);
Vector discriminate(const Discriminator& dis, const Matrix& repr);
// `grad_logit` is dL/d(pre-sigmoid output). Returns dL/d(repr).
Matrix discriminator_backward(const Discriminator& dis, const Matrix& repr,
                              const DiscriminatorTrace& trace,
                              const Vector& grad_logit, Discriminator* grad);

// Mean cross-entropy of d̂ against the true indicator d.
double discriminator_loss(const Vector& predicted, const Vector& indicator);
// Cross-entropy against the flipped indicator 1 - d. Minimizing it drives the
// mapper to confuse the discriminator.
double confusion_loss(const Vector& predicted, const Vector& indicator);

struct AdversarialOptions {
  // false: replace the gate by uniform 1/N weights.
  bool use_gating = true;
  // true: d = 1 rows take the target model's own representation instead of
  // the gated source ensemble.
  bool target_rows_from_target_model = false;
};

// Forward state of the adversarial path over one mixed batch.
struct AdversarialTrace {
  BackboneTrace target;              // target model on the mixed batch
  std::vector<Matrix> source_reprs;  // per source
  GateTrace gate;
  Matrix pre_mapper;                 // aggregated representation
  Matrix mapped;                     // after the mapper
  Vector indicator;                  // ground-truth d
};

// Forwards every source model on the mixed batch, gates them with weights
// computed from the target model's representation of the same samples,
// aggregates and maps.
AdversarialTrace adversarial_source_path(std::span<const Backbone> sources,
                                         const Backbone& target,
                                         const GatingNetwork& gating,
                                         const Mapper& mapper,
                                         const Batch& mixed,
                                         const AdversarialOptions& options = {});

// Back-propagates dL/d(mapped) into the mapper, gate and target model
// accumulators (each optional). Source models never receive gradient.
void adversarial_backward(std::span<const Backbone> sources,
                          const Backbone& target, const GatingNetwork& gating,
                          const Mapper& mapper, const Batch& mixed,
                          const AdversarialTrace& trace,
                          const Matrix& grad_mapped,
                          const AdversarialOptions& options, Mapper* mapper_grad,
                          GatingNetwork* gate_grad, Backbone* target_grad);

}  // namespace xdt
