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

#include "xdt/nn/activations.h"
#include "xdt/nn/matrix.h"

namespace xdt {

// y = act(x · Wᵀ + b), one row per sample. `weight` is out × in.
template <typename Scalar>
struct BasicDenseLayer {
  MatrixX<Scalar> weight;
  VectorX<Scalar> bias;
  Activation activation = Activation::kIdentity;

  Eigen::Index in_width() const { return weight.cols(); }
  Eigen::Index out_width() const { return weight.rows(); }

  void collect(ParamList& out) {
    out.push_back(as_span(weight));
    out.push_back(as_span(bias));
  }

  BasicDenseLayer zeros_like() const {
    return {MatrixX<Scalar>::Zero(weight.rows(), weight.cols()),
            VectorX<Scalar>::Zero(bias.size()), activation};
  }
};

using DenseLayer = BasicDenseLayer<double>;

// Glorot-uniform weights, zero bias.
DenseLayer make_dense(int in, int out, Activation act, std::mt19937_64& rng);

// Fills `m` from uniform(-s, s), s = sqrt(6 / (fan_in + fan_out)).
void glorot_fill(Matrix& m, int fan_in, int fan_out, std::mt19937_64& rng);

template <typename Scalar>
MatrixX<Scalar> dense_forward(const MatrixX<Scalar>& input,
                              const BasicDenseLayer<Scalar>& layer,
                              OpCounter* ops = nullptr) {
  if (input.cols() != layer.weight.cols() ||
      layer.bias.size() != layer.weight.rows()) {
    throw DimensionError("dense_forward: input " + shape_string(input) +
                         " vs weight " + shape_string(layer.weight));
  }
  MatrixX<Scalar> out = input * layer.weight.transpose();
  out.rowwise() += layer.bias.transpose();
  apply_activation(layer.activation, out);
  if (ops != nullptr) {
    ops->flops += static_cast<std::uint64_t>(input.rows()) *
                  (2 * layer.weight.size() + layer.bias.size());
  }
  return out;
}

// Backward through one layer. `output` is the forward result. Parameter
// gradients are accumulated into `grad` when non-null, and dL/dinput is
// returned.
template <typename Scalar>
MatrixX<Scalar> dense_backward(const BasicDenseLayer<Scalar>& layer,
                               const MatrixX<Scalar>& input,
                               const MatrixX<Scalar>& output,
                               const MatrixX<Scalar>& grad_output,
                               BasicDenseLayer<Scalar>* grad) {
  require_shape("dense_backward grad", grad_output.rows(), grad_output.cols(),
                output.rows(), output.cols());
  const MatrixX<Scalar> grad_pre =
      activation_backward(layer.activation, output, grad_output);
  if (grad != nullptr) {
    grad->weight.noalias() += grad_pre.transpose() * input;
    grad->bias += grad_pre.colwise().sum().transpose();
  }
  return grad_pre * layer.weight;
}

}  // namespace xdt
