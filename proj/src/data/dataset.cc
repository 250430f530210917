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

#include "xdt/data/dataset.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "xdt/nn/random.h"

namespace xdt {

Batch make_batch(const PeriodDataset& data, std::span<const std::size_t> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const int num_cat = data.schema.num_categorical();
  const int num_dense = data.schema.num_dense();
  Batch batch;
  batch.categorical.resize(n, num_cat);
  batch.dense.resize(n, num_dense);
  batch.label.resize(n);
  batch.domain.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Sample& s = data.samples.at(rows[i]);
    for (int f = 0; f < num_cat; ++f) batch.categorical(i, f) = s.categorical[f];
    for (int f = 0; f < num_dense; ++f) batch.dense(i, f) = s.dense[f];
    batch.label[i] = s.label;
    batch.domain[i] = s.indicator;
  }
  return batch;
}

Batch make_batch(const PeriodDataset& data) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  return make_batch(data, rows);
}

double click_rate(const PeriodDataset& data) {
  if (data.empty()) return 0.0;
  double clicks = 0.0;
  for (const auto& s : data.samples) clicks += s.label;
  return clicks / static_cast<double>(data.size());
}

PeriodDataset build_mixed(std::span<const PeriodDataset* const> sources,
                          const PeriodDataset& target, std::uint64_t seed) {
  if (target.empty()) throw std::invalid_argument("build_mixed: empty target dataset");
  std::vector<const PeriodDataset*> pool;
  for (const PeriodDataset* s : sources) {
    if (s != nullptr && !s->empty()) pool.push_back(s);
  }
  if (pool.empty()) {
    throw std::invalid_argument("build_mixed: every source dataset is empty");
  }
  auto rng = make_rng({seed, tag(Stream::kMixed),
                       static_cast<std::uint64_t>(target.period)});
  const std::size_t total = target.size();
  const std::size_t num_target = total / 2;
  const std::size_t num_source = total - num_target;

  PeriodDataset mixed;
  mixed.domain_id = kMixedDomain;
  mixed.period = target.period;
  mixed.schema = target.schema;
  mixed.samples.reserve(total);

  std::uniform_int_distribution<std::size_t> pick_source(0, pool.size() - 1);
  for (std::size_t i = 0; i < num_source; ++i) {
    const PeriodDataset& src = *pool[pick_source(rng)];
    std::uniform_int_distribution<std::size_t> pick(0, src.size() - 1);
    Sample s = src.samples[pick(rng)];
    s.indicator = 0;
    mixed.samples.push_back(std::move(s));
  }
  std::vector<std::size_t> order(target.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < num_target; ++i) {
    Sample s = target.samples[order[i]];
    s.indicator = 1;
    mixed.samples.push_back(std::move(s));
  }
  std::shuffle(mixed.samples.begin(), mixed.samples.end(), rng);
  return mixed;
}

}  // namespace xdt
