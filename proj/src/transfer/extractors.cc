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

#include "xdt/transfer/extractors.h"

#include <stdexcept>

#include "xdt/nn/losses.h"

namespace xdt {

GatingNetwork make_gating(int repr_width, int hidden_width, int num_sources,
                          std::mt19937_64& rng) {
  if (num_sources < 1) {
    throw std::invalid_argument("make_gating: need at least one source");
  }
  GatingNetwork gating;
  gating.hidden = make_dense(repr_width, hidden_width, Activation::kRelu, rng);
  gating.output = make_dense(hidden_width, num_sources, Activation::kIdentity, rng);
  return gating;
}

GateTrace gate_forward(const GatingNetwork& gating, const Matrix& target_repr) {
  if (target_repr.cols() != gating.hidden.in_width()) {
    throw DimensionError("gate_weights: representation " +
                         shape_string(target_repr) + " vs gate input width " +
                         std::to_string(gating.hidden.in_width()));
  }
  gating.reads.bump(4);
  GateTrace trace;
  trace.hidden = dense_forward(target_repr, gating.hidden);
  trace.weights = softmax_rows(Matrix(dense_forward(trace.hidden, gating.output)));
  return trace;
}

Matrix gate_weights(const GatingNetwork& gating, const Matrix& target_repr) {
  return gate_forward(gating, target_repr).weights;
}

Matrix uniform_gate(Eigen::Index batch, int num_sources) {
  return Matrix::Constant(batch, num_sources, 1.0 / num_sources);
}

Matrix gate_backward(const GatingNetwork& gating, const Matrix& target_repr,
                     const GateTrace& trace, const Matrix& grad_weights,
                     GatingNetwork* grad) {
  const Matrix grad_logits =
      activation_backward(Activation::kSoftmax, trace.weights, grad_weights);
  const Matrix grad_hidden =
      dense_backward(gating.output, trace.hidden, trace.weights, grad_logits,
                     grad ? &grad->output : nullptr);
  return dense_backward(gating.hidden, target_repr, trace.hidden, grad_hidden,
                        grad ? &grad->hidden : nullptr);
}

namespace {

void check_sources(std::span<const Matrix> mats, const Matrix& gate,
                   const char* what) {
  if (static_cast<Eigen::Index>(mats.size()) != gate.cols()) {
    throw DimensionError(std::string("aggregate_sources: ") +
                         std::to_string(mats.size()) + " " + what +
                         " batches for gate " + shape_string(gate));
  }
  for (const Matrix& m : mats) {
    require_shape(std::string("aggregate_sources ") + what, m.rows(), m.cols(),
                  gate.rows(), mats.front().cols());
  }
}

Matrix weighted_sum(std::span<const Matrix> mats, const Matrix& gate) {
  Matrix out = Matrix::Zero(mats.front().rows(), mats.front().cols());
  for (std::size_t n = 0; n < mats.size(); ++n) {
    out.array() += mats[n].array().colwise() * gate.col(n).array();
  }
  return out;
}

}  // namespace

Aggregate aggregate_sources(std::span<const Matrix> reprs,
                            std::span<const Matrix> logits, const Matrix& gate) {
  if (reprs.empty()) throw DimensionError("aggregate_sources: no sources");
  check_sources(reprs, gate, "representation");
  Aggregate out;
  out.representation = weighted_sum(reprs, gate);
  if (!logits.empty()) {
    check_sources(logits, gate, "logit");
    out.logits = weighted_sum(logits, gate);
  }
  return out;
}

Matrix aggregate_gate_grad(std::span<const Matrix> reprs,
                           std::span<const Matrix> logits,
                           const Matrix& grad_repr, const Matrix& grad_logits) {
  const Eigen::Index batch = reprs.empty() ? logits.front().rows() : reprs.front().rows();
  const auto n = static_cast<Eigen::Index>(std::max(reprs.size(), logits.size()));
  Matrix grad = Matrix::Zero(batch, n);
  if (grad_repr.size() != 0) {
    for (std::size_t k = 0; k < reprs.size(); ++k) {
      grad.col(k) += (reprs[k].array() * grad_repr.array()).rowwise().sum().matrix();
    }
  }
  if (grad_logits.size() != 0) {
    for (std::size_t k = 0; k < logits.size(); ++k) {
      grad.col(k) += (logits[k].array() * grad_logits.array()).rowwise().sum().matrix();
    }
  }
  return grad;
}

Mapper make_identity_mapper(int width) {
  return {Matrix::Identity(width, width), {}};
}

Matrix map_representation(const Mapper& mapper, const Matrix& repr) {
  if (repr.cols() != mapper.weight.cols()) {
    throw DimensionError("map_representation: representation " +
                         shape_string(repr) + " vs mapper " +
                         shape_string(mapper.weight));
  }
  mapper.reads.bump();
  return repr * mapper.weight.transpose();
}

Matrix mapper_backward(const Mapper& mapper, const Matrix& input,
                       const Matrix& grad_output, Mapper* grad) {
  if (grad != nullptr) grad->weight.noalias() += grad_output.transpose() * input;
  return grad_output * mapper.weight;
}

Discriminator make_discriminator(int repr_width, int hidden_width,
                                 std::mt19937_64& rng) {
  Discriminator dis;
  dis.hidden = make_dense(repr_width, hidden_width, Activation::kRelu, rng);
  dis.output = make_dense(hidden_width, 1, Activation::kIdentity, rng);
  return dis;
}

DiscriminatorTrace discriminator_forward(const Discriminator& dis,
                                         const Matrix& repr) {
  if (repr.cols() != dis.hidden.in_width()) {
    throw DimensionError("discriminate: representation " + shape_string(repr) +
                         " vs discriminator input width " +
                         std::to_string(dis.hidden.in_width()));
  }
  dis.reads.bump(4);
  DiscriminatorTrace trace;
  trace.hidden = dense_forward(repr, dis.hidden);
  const Matrix logit = dense_forward(trace.hidden, dis.output);
  trace.prob = logit.col(0).unaryExpr([](double z) { return sigmoid(z); });
  return trace;
}

Vector discriminate(const Discriminator& dis, const Matrix& repr) {
  return discriminator_forward(dis, repr).prob;
}

Matrix discriminator_backward(const Discriminator& dis, const Matrix& repr,
                              const DiscriminatorTrace& trace,
                              const Vector& grad_logit, Discriminator* grad) {
  const Matrix grad_out = grad_logit;
  const Matrix grad_hidden =
      dense_backward(dis.output, trace.hidden, Matrix(grad_out), grad_out,
                     grad ? &grad->output : nullptr);
  return dense_backward(dis.hidden, repr, trace.hidden, grad_hidden,
                        grad ? &grad->hidden : nullptr);
}

double discriminator_loss(const Vector& predicted, const Vector& indicator) {
  return binary_cross_entropy(predicted, indicator);
}

double confusion_loss(const Vector& predicted, const Vector& indicator) {
  const Vector flipped = (1.0 - indicator.array()).matrix();
  return binary_cross_entropy(predicted, flipped);
}

AdversarialTrace adversarial_source_path(std::span<const Backbone> sources,
                                         const Backbone& target,
                                         const GatingNetwork& gating,
                                         const Mapper& mapper,
                                         const Batch& mixed,
                                         const AdversarialOptions& options) {
  if (sources.empty()) throw DimensionError("adversarial path: no source models");
  if (mixed.domain.size() != mixed.size()) {
    throw DimensionError("adversarial path: mixed batch carries " +
                         std::to_string(mixed.domain.size()) +
                         " indicators for " + std::to_string(mixed.size()) +
                         " samples");
  }
  AdversarialTrace trace;
  trace.indicator = mixed.domain;
  const bool need_target = options.use_gating || options.target_rows_from_target_model;
  if (need_target) trace.target = forward_trace(target, mixed);
  for (const Backbone& source : sources) {
    trace.source_reprs.push_back(forward_trace(source, mixed).representation());
  }
  if (options.use_gating) {
    trace.gate = gate_forward(gating, trace.target.representation());
  } else {
    trace.gate.weights = uniform_gate(mixed.size(), static_cast<int>(sources.size()));
  }
  trace.pre_mapper =
      aggregate_sources(trace.source_reprs, {}, trace.gate.weights).representation;
  if (options.target_rows_from_target_model) {
    const Matrix& own = trace.target.representation();
    require_shape("adversarial path target rows", own.rows(), own.cols(),
                  trace.pre_mapper.rows(), trace.pre_mapper.cols());
    for (Eigen::Index i = 0; i < mixed.size(); ++i) {
      if (trace.indicator[i] == 1.0) trace.pre_mapper.row(i) = own.row(i);
    }
  }
  trace.mapped = map_representation(mapper, trace.pre_mapper);
  return trace;
}

void adversarial_backward(std::span<const Backbone> sources,
                          const Backbone& target, const GatingNetwork& gating,
                          const Mapper& mapper, const Batch& mixed,
                          const AdversarialTrace& trace,
                          const Matrix& grad_mapped,
                          const AdversarialOptions& options, Mapper* mapper_grad,
                          GatingNetwork* gate_grad, Backbone* target_grad) {
  (void)sources;
  Matrix grad_pre = mapper_backward(mapper, trace.pre_mapper, grad_mapped, mapper_grad);
  Matrix grad_target_repr;
  if (options.target_rows_from_target_model) {
    grad_target_repr = Matrix::Zero(grad_pre.rows(), grad_pre.cols());
    for (Eigen::Index i = 0; i < grad_pre.rows(); ++i) {
      if (trace.indicator[i] == 1.0) {
        grad_target_repr.row(i) = grad_pre.row(i);
        grad_pre.row(i).setZero();
      }
    }
  }
  if (options.use_gating && (gate_grad != nullptr || target_grad != nullptr)) {
    const Matrix grad_gate =
        aggregate_gate_grad(trace.source_reprs, {}, grad_pre, Matrix());
    const Matrix grad_input = gate_backward(gating, trace.target.representation(),
                                            trace.gate, grad_gate, gate_grad);
    if (grad_target_repr.size() == 0) {
      grad_target_repr = grad_input;
    } else {
      grad_target_repr += grad_input;
    }
  }
  if (target_grad != nullptr && grad_target_repr.size() != 0) {
    std::vector<Matrix> grad_hidden(target.trunk.size());
    grad_hidden.back() = std::move(grad_target_repr);
    backward(target, mixed, trace.target, Matrix::Zero(mixed.size(), 2),
             grad_hidden, *target_grad);
  }
}

}  // namespace xdt
