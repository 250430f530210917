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

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "xdt/model/schema.h"
#include "xdt/nn/dense.h"

namespace xdt {

enum class BackboneKind { kDnn, kDcn, kWideDeep };

// "dnn", "dcn", "wd"; parse throws std::invalid_argument on anything else.
const char* backbone_kind_name(BackboneKind kind);
BackboneKind parse_backbone_kind(const std::string& name);

// One explicit feature cross applied to the concatenated input:
//   x1 = x0 * (x0 · w) + b + x0
struct CrossStage {
  Vector weight;
  Vector bias;
};

// Linear path over the raw one-hot features, added into the logits.
struct WidePath {
  std::vector<Matrix> tables;  // cardinality × 2 per categorical field
  Matrix dense_weight;         // 2 × num_dense
};

// A per-domain CTR model. The last trunk activation is the representation e;
// the head emits two logits Z and the prediction is softmax(Z)[1].
struct Backbone {
  BackboneKind kind = BackboneKind::kDnn;
  FeatureSchema schema;
  std::vector<Matrix> embeddings;  // cardinality × embedding_dim per field
  std::optional<CrossStage> cross;
  std::vector<DenseLayer> trunk;
  DenseLayer head;
  std::optional<WidePath> wide;
  AccessCounter reads;

  int representation_width() const {
    return static_cast<int>(trunk.back().out_width());
  }
  std::vector<int> trunk_widths() const;

  void collect(ParamList& out);
  ParamList params() {
    ParamList out;
    collect(out);
    return out;
  }
  std::size_t parameter_count() const;
  // Same structure, every parameter zero. Used as a gradient accumulator.
  Backbone zeros_like() const;
};

Backbone build_backbone(BackboneKind kind, const FeatureSchema& schema,
                        const std::vector<int>& trunk_widths,
                        std::uint64_t seed);

// Everything backward needs from one forward pass.
struct BackboneTrace {
  Matrix input;                  // concatenated embeddings + dense
  Vector cross_scalar;           // x0 · w per sample (dcn only)
  Matrix trunk_input;            // input after the cross stage
  std::vector<Matrix> hidden;    // activation of every trunk layer
  Matrix logits;
  Vector prediction;

  const Matrix& representation() const { return hidden.back(); }
};

struct ForwardOutput {
  Matrix representation;
  Matrix logits;
  Vector prediction;
};

// Throws std::out_of_range naming the field and index for a categorical index
// outside its cardinality, DimensionError for a batch of the wrong width.
BackboneTrace forward_trace(const Backbone& model, const Batch& batch,
                            OpCounter* ops = nullptr);
ForwardOutput forward(const Backbone& model, const Batch& batch);

// Target-only inference path: a function of `model` alone.
Vector predict(const Backbone& model, const Batch& batch,
               OpCounter* ops = nullptr);

// Floating-point operations of one forward pass over `batch_size` samples,
// computed from the architecture rather than by running it.
std::uint64_t forward_flops(const Backbone& model, std::int64_t batch_size);

// Accumulates parameter gradients into `grads` (shaped like `model`).
// `grad_hidden` optionally injects dL/d(hidden[l]) per trunk layer; entries
// with zero size are skipped. An empty vector means no injection.
void backward(const Backbone& model, const Batch& batch,
              const BackboneTrace& trace, const Matrix& grad_logits,
              const std::vector<Matrix>& grad_hidden, Backbone& grads);

// dL/dZ of mean binary cross-entropy on the prediction softmax(Z)[1].
Matrix prediction_logit_grad(const Vector& prediction, const Vector& label);

}  // namespace xdt
