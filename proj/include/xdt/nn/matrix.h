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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xdt/nn/errors.h"

namespace xdt {

template <typename Scalar>
using MatrixX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

// Non-owning views over every trainable tensor of a module, in a fixed order.
// Gradients and optimizer moments of the same module line up index by index.
using ParamList = std::vector<std::span<double>>;

template <typename Derived>
std::span<double> as_span(Eigen::PlainObjectBase<Derived>& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

std::string shape_string(Eigen::Index rows, Eigen::Index cols);

template <typename Derived>
std::string shape_string(const Eigen::DenseBase<Derived>& m) {
  return shape_string(m.rows(), m.cols());
}

// Throws DimensionError("<what>: expected <a>, got <b>") when shapes differ.
void require_shape(std::string_view what, Eigen::Index rows, Eigen::Index cols,
                   Eigen::Index want_rows, Eigen::Index want_cols);

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.derived().array().isFinite().all();
}

std::size_t total_size(const ParamList& params);
Vector flatten(const ParamList& params);
void unflatten(const Vector& flat, const ParamList& params);
void zero(const ParamList& params);
// Bitwise equality of two flattened parameter vectors.
bool bit_equal(const Vector& a, const Vector& b);

// Counts parameter reads of a module. Copyable so that models stay values.
class AccessCounter {
 public:
  AccessCounter() = default;
  AccessCounter(const AccessCounter& other) : count_(other.value()) {}
  AccessCounter& operator=(const AccessCounter& other) {
    count_.store(other.value(), std::memory_order_relaxed);
    return *this;
  }

  void bump(std::uint64_t n = 1) const {
    count_.fetch_add(n, std::memory_order_relaxed);
  }
  std::uint64_t value() const { return count_.load(std::memory_order_relaxed); }
  void reset() const { count_.store(0, std::memory_order_relaxed); }

 private:
  mutable std::atomic<std::uint64_t> count_{0};
};

// Floating-point operation tally (multiply and add each count one).
struct OpCounter {
  std::uint64_t flops = 0;
};

}  // namespace xdt
