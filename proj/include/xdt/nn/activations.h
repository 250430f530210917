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

#include <cmath>
#include <stdexcept>

#include "xdt/nn/matrix.h"

namespace xdt {

enum class Activation { kIdentity, kRelu, kSigmoid, kSoftmax };

const char* activation_name(Activation a);

// Saturates instead of overflowing for large |z|.
template <typename Scalar>
Scalar sigmoid(Scalar z) {
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

template <typename Derived>
VectorX<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0) throw std::invalid_argument("softmax: empty input");
  const Scalar top = v.maxCoeff();
  VectorX<Scalar> out = (v.array() - top).exp().matrix();
  out /= out.sum();
  return out;
}

template <typename Derived>
VectorX<typename Derived::Scalar> log_softmax(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0) throw std::invalid_argument("log_softmax: empty input");
  const Scalar top = v.maxCoeff();
  const Scalar lse = top + std::log((v.array() - top).exp().sum());
  return (v.array() - lse).matrix();
}

// Row-wise variants over a batch.
template <typename Scalar>
MatrixX<Scalar> softmax_rows(const MatrixX<Scalar>& z) {
  if (z.cols() == 0) throw std::invalid_argument("softmax: empty input");
  MatrixX<Scalar> out(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const Scalar top = z.row(r).maxCoeff();
    out.row(r) = (z.row(r).array() - top).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

template <typename Scalar>
MatrixX<Scalar> log_softmax_rows(const MatrixX<Scalar>& z) {
  if (z.cols() == 0) throw std::invalid_argument("log_softmax: empty input");
  MatrixX<Scalar> out(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const Scalar top = z.row(r).maxCoeff();
    const Scalar lse = top + std::log((z.row(r).array() - top).exp().sum());
    out.row(r) = (z.row(r).array() - lse).matrix();
  }
  return out;
}

template <typename Scalar>
void apply_activation(Activation act, MatrixX<Scalar>& z) {
  switch (act) {
    case Activation::kIdentity:
      return;
    case Activation::kRelu:
      z = z.cwiseMax(Scalar(0));
      return;
    case Activation::kSigmoid:
      z = z.unaryExpr([](Scalar v) { return sigmoid(v); });
      return;
    case Activation::kSoftmax:
      z = softmax_rows(z);
      return;
  }
}

// Given the activation output y = act(z) and dL/dy, returns dL/dz.
template <typename Scalar>
MatrixX<Scalar> activation_backward(Activation act, const MatrixX<Scalar>& y,
                                    const MatrixX<Scalar>& grad_y) {
  switch (act) {
    case Activation::kIdentity:
      return grad_y;
    case Activation::kRelu:
      return (y.array() > Scalar(0)).select(grad_y, Scalar(0));
    case Activation::kSigmoid:
      return (grad_y.array() * y.array() * (Scalar(1) - y.array())).matrix();
    case Activation::kSoftmax: {
      const VectorX<Scalar> dot = (grad_y.array() * y.array()).rowwise().sum();
      return (y.array() * (grad_y.colwise() - dot).array()).matrix();
    }
  }
  return grad_y;
}

}  // namespace xdt
