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

#include "xdt/model/backbone.h"

#include <stdexcept>

#include "xdt/nn/activations.h"
#include "xdt/nn/random.h"

namespace xdt {

const char* backbone_kind_name(BackboneKind kind) {
  switch (kind) {
    case BackboneKind::kDnn:
      return "dnn";
    case BackboneKind::kDcn:
      return "dcn";
    case BackboneKind::kWideDeep:
      return "wd";
  }
  return "unknown";
}

BackboneKind parse_backbone_kind(const std::string& name) {
  if (name == "dnn") return BackboneKind::kDnn;
  if (name == "dcn") return BackboneKind::kDcn;
  if (name == "wd") return BackboneKind::kWideDeep;
  throw std::invalid_argument("unknown backbone kind '" + name +
                              "' (expected dnn, dcn or wd)");
}

std::vector<int> Backbone::trunk_widths() const {
  std::vector<int> widths;
  for (const auto& layer : trunk) widths.push_back(static_cast<int>(layer.out_width()));
  return widths;
}

void Backbone::collect(ParamList& out) {
  for (auto& table : embeddings) out.push_back(as_span(table));
  if (cross) {
    out.push_back(as_span(cross->weight));
    out.push_back(as_span(cross->bias));
  }
  for (auto& layer : trunk) layer.collect(out);
  head.collect(out);
  if (wide) {
    for (auto& table : wide->tables) out.push_back(as_span(table));
    out.push_back(as_span(wide->dense_weight));
  }
}

std::size_t Backbone::parameter_count() const {
  return total_size(const_cast<Backbone*>(this)->params());
}

Backbone Backbone::zeros_like() const {
  Backbone z;
  z.kind = kind;
  z.schema = schema;
  for (const auto& table : embeddings) {
    z.embeddings.push_back(Matrix::Zero(table.rows(), table.cols()));
  }
  if (cross) {
    z.cross = CrossStage{Vector::Zero(cross->weight.size()),
                         Vector::Zero(cross->bias.size())};
  }
  for (const auto& layer : trunk) z.trunk.push_back(layer.zeros_like());
  z.head = head.zeros_like();
  if (wide) {
    WidePath w;
    for (const auto& table : wide->tables) {
      w.tables.push_back(Matrix::Zero(table.rows(), table.cols()));
    }
    w.dense_weight = Matrix::Zero(wide->dense_weight.rows(),
                                  wide->dense_weight.cols());
    z.wide = std::move(w);
  }
  return z;
}

Backbone build_backbone(BackboneKind kind, const FeatureSchema& schema,
                        const std::vector<int>& trunk_widths,
                        std::uint64_t seed) {
  schema.validate();
  if (trunk_widths.empty()) {
    throw std::invalid_argument("build_backbone: trunk widths are empty");
  }
  for (int w : trunk_widths) {
    if (w < 1) {
      throw std::invalid_argument("build_backbone: trunk width " +
                                  std::to_string(w) + " < 1");
    }
  }
  auto rng = make_rng({seed});
  Backbone model;
  model.kind = kind;
  model.schema = schema;
  const int k = schema.embedding_dim;
  for (const auto& field : schema.categorical) {
    Matrix table(field.cardinality, k);
    glorot_fill(table, field.cardinality, k, rng);
    model.embeddings.push_back(std::move(table));
  }
  const int width = schema.input_width();
  if (kind == BackboneKind::kDcn) {
    Matrix w(width, 1);
    glorot_fill(w, width, 1, rng);
    model.cross = CrossStage{Vector(w.reshaped()), Vector::Zero(width)};
  }
  int in = width;
  for (int out : trunk_widths) {
    model.trunk.push_back(make_dense(in, out, Activation::kRelu, rng));
    in = out;
  }
  model.head = make_dense(in, 2, Activation::kIdentity, rng);
  if (kind == BackboneKind::kWideDeep) {
    WidePath wide;
    for (const auto& field : schema.categorical) {
      Matrix table(field.cardinality, 2);
      glorot_fill(table, field.cardinality, 2, rng);
      wide.tables.push_back(std::move(table));
    }
    wide.dense_weight = Matrix(2, schema.num_dense());
    glorot_fill(wide.dense_weight, schema.num_dense(), 2, rng);
    model.wide = std::move(wide);
  }
  return model;
}

namespace {

void check_batch(const Backbone& model, const Batch& batch) {
  const auto& schema = model.schema;
  require_shape("batch categorical", batch.categorical.rows(),
                batch.categorical.cols(), batch.size(), schema.num_categorical());
  require_shape("batch dense", batch.dense.rows(), batch.dense.cols(),
                batch.size(), schema.num_dense());
  for (int f = 0; f < schema.num_categorical(); ++f) {
    const int card = schema.categorical[f].cardinality;
    for (Eigen::Index i = 0; i < batch.size(); ++i) {
      const int idx = batch.categorical(i, f);
      if (idx < 0 || idx >= card) {
        throw std::out_of_range("field '" + schema.categorical[f].name +
                                "': index " + std::to_string(idx) +
                                " outside [0, " + std::to_string(card) + ")");
      }
    }
  }
}

}  // namespace

BackboneTrace forward_trace(const Backbone& model, const Batch& batch,
                            OpCounter* ops) {
  check_batch(model, batch);
  const auto& schema = model.schema;
  const Eigen::Index n = batch.size();
  const int k = schema.embedding_dim;
  const int num_cat = schema.num_categorical();
  BackboneTrace trace;
  trace.input.resize(n, schema.input_width());
  for (int f = 0; f < num_cat; ++f) {
    const Matrix& table = model.embeddings[f];
    for (Eigen::Index i = 0; i < n; ++i) {
      trace.input.row(i).segment(f * k, k) = table.row(batch.categorical(i, f));
    }
  }
  if (schema.num_dense() > 0) {
    trace.input.rightCols(schema.num_dense()) = batch.dense;
  }
  model.reads.bump(model.embeddings.size());

  if (model.cross) {
    const auto width = static_cast<std::uint64_t>(trace.input.cols());
    trace.cross_scalar = trace.input * model.cross->weight;
    trace.trunk_input =
        (trace.input.array().colwise() * (trace.cross_scalar.array() + 1.0))
            .matrix();
    trace.trunk_input.rowwise() += model.cross->bias.transpose();
    model.reads.bump(2);
    if (ops != nullptr) ops->flops += static_cast<std::uint64_t>(n) * (4 * width + 1);
  } else {
    trace.trunk_input = trace.input;
  }

  const Matrix* prev = &trace.trunk_input;
  trace.hidden.reserve(model.trunk.size());
  for (const auto& layer : model.trunk) {
    trace.hidden.push_back(dense_forward(*prev, layer, ops));
    prev = &trace.hidden.back();
  }
  trace.logits = dense_forward(*prev, model.head, ops);
  model.reads.bump(2 * (model.trunk.size() + 1));

  if (model.wide) {
    for (int f = 0; f < num_cat; ++f) {
      const Matrix& table = model.wide->tables[f];
      for (Eigen::Index i = 0; i < n; ++i) {
        trace.logits.row(i) += table.row(batch.categorical(i, f));
      }
    }
    if (schema.num_dense() > 0) {
      trace.logits.noalias() += batch.dense * model.wide->dense_weight.transpose();
    }
    model.reads.bump(model.wide->tables.size() + 1);
    if (ops != nullptr) {
      ops->flops += static_cast<std::uint64_t>(n) *
                    (2 * num_cat + 4 * schema.num_dense());
    }
  }
  trace.prediction = softmax_rows(trace.logits).col(1);
  return trace;
}

ForwardOutput forward(const Backbone& model, const Batch& batch) {
  BackboneTrace trace = forward_trace(model, batch);
  return {std::move(trace.hidden.back()), std::move(trace.logits),
          std::move(trace.prediction)};
}

Vector predict(const Backbone& model, const Batch& batch, OpCounter* ops) {
  return forward_trace(model, batch, ops).prediction;
}

std::uint64_t forward_flops(const Backbone& model, std::int64_t batch_size) {
  std::uint64_t per_sample = 0;
  const auto width = static_cast<std::uint64_t>(model.schema.input_width());
  if (model.cross) per_sample += 4 * width + 1;
  std::uint64_t in = width;
  for (const auto& layer : model.trunk) {
    const auto out = static_cast<std::uint64_t>(layer.out_width());
    per_sample += 2 * in * out + out;
    in = out;
  }
  per_sample += 2 * in * 2 + 2;
  if (model.wide) {
    per_sample += 2 * static_cast<std::uint64_t>(model.schema.num_categorical()) +
                  4 * static_cast<std::uint64_t>(model.schema.num_dense());
  }
  return per_sample * static_cast<std::uint64_t>(batch_size);
}

Matrix prediction_logit_grad(const Vector& prediction, const Vector& label) {
  if (prediction.size() != label.size()) {
    throw DimensionError("prediction_logit_grad: " +
                         std::to_string(prediction.size()) +
                         " predictions vs " + std::to_string(label.size()) +
                         " labels");
  }
  const double n = static_cast<double>(prediction.size());
  Matrix grad(prediction.size(), 2);
  grad.col(1) = (prediction - label) / n;
  grad.col(0) = -grad.col(1);
  return grad;
}

void backward(const Backbone& model, const Batch& batch,
              const BackboneTrace& trace, const Matrix& grad_logits,
              const std::vector<Matrix>& grad_hidden, Backbone& grads) {
  const Eigen::Index n = batch.size();
  require_shape("backward grad_logits", grad_logits.rows(), grad_logits.cols(),
                n, 2);
  if (!grad_hidden.empty() && grad_hidden.size() != model.trunk.size()) {
    throw DimensionError("backward: " + std::to_string(grad_hidden.size()) +
                         " hidden gradients for " +
                         std::to_string(model.trunk.size()) + " trunk layers");
  }
  const auto& schema = model.schema;
  const int num_cat = schema.num_categorical();
  const int k = schema.embedding_dim;

  if (model.wide) {
    for (int f = 0; f < num_cat; ++f) {
      Matrix& table = grads.wide->tables[f];
      for (Eigen::Index i = 0; i < n; ++i) {
        table.row(batch.categorical(i, f)) += grad_logits.row(i);
      }
    }
    if (schema.num_dense() > 0) {
      grads.wide->dense_weight.noalias() += grad_logits.transpose() * batch.dense;
    }
  }

  Matrix grad = dense_backward(model.head, trace.hidden.back(), trace.logits,
                               grad_logits, &grads.head);
  for (std::size_t l = model.trunk.size(); l-- > 0;) {
    if (!grad_hidden.empty() && grad_hidden[l].size() != 0) {
      require_shape("backward grad_hidden", grad_hidden[l].rows(),
                    grad_hidden[l].cols(), trace.hidden[l].rows(),
                    trace.hidden[l].cols());
      grad += grad_hidden[l];
    }
    const Matrix& input = l == 0 ? trace.trunk_input : trace.hidden[l - 1];
    grad = dense_backward(model.trunk[l], input, trace.hidden[l], grad,
                          &grads.trunk[l]);
  }

  Matrix grad_input;
  if (model.cross) {
    const Vector grad_scalar = (grad.array() * trace.input.array()).rowwise().sum();
    grads.cross->bias += grad.colwise().sum().transpose();
    grads.cross->weight.noalias() += trace.input.transpose() * grad_scalar;
    grad_input = (grad.array().colwise() * (trace.cross_scalar.array() + 1.0)).matrix();
    grad_input.noalias() += grad_scalar * model.cross->weight.transpose();
  } else {
    grad_input = std::move(grad);
  }

  for (int f = 0; f < num_cat; ++f) {
    Matrix& table = grads.embeddings[f];
    for (Eigen::Index i = 0; i < n; ++i) {
      table.row(batch.categorical(i, f)) += grad_input.row(i).segment(f * k, k);
    }
  }
}

}  // namespace xdt
