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

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "xdt/data/dataset.h"

namespace xdt {

// Knobs of the synthetic click log. The last domain is the target.
struct GenConfig {
  int num_domains = 3;
  int num_periods = 8;
  int samples_per_domain = 10000;
  // Target domain stream size; the target gets the fewest samples.
  int target_samples = 2000;
  double invariant_strength = 2.0;
  double specific_strength = 0.5;
  double drift = 0.1;
  std::uint64_t seed = 1;

  int target_domain() const { return num_domains - 1; }
  int num_sources() const { return num_domains - 1; }
  int samples_for(int domain) const {
    return domain == target_domain() ? target_samples : samples_per_domain;
  }
  void validate() const;
};

// Seeded ground-truth label model. Every sample is embedded as
//   phi(x) = [truth_table_f[x_f] for each field, dense..., 1]
// and clicks are Bernoulli(sigmoid(logit)) with
//   logit = s_inv * w_inv.phi + s_spec * w_d.phi + drift * t * w_t.phi.
// Dense features of domain d are drawn from N(s_spec * mu_d, 1).
struct GroundTruth {
  static constexpr int kTruthDim = 4;

  std::vector<Matrix> tables;        // cardinality × kTruthDim per field
  Vector invariant_weight;           // w_inv
  std::vector<Vector> domain_weight; // w_d per domain
  Vector drift_weight;               // w_t
  std::vector<Vector> dense_shift;   // mu_d per domain

  int phi_width() const { return static_cast<int>(invariant_weight.size()); }
  nlohmann::json to_json() const;
};

class SyntheticGenerator {
 public:
  SyntheticGenerator(GenConfig config, FeatureSchema schema);

  const GenConfig& config() const { return config_; }
  const FeatureSchema& schema() const { return schema_; }
  const GroundTruth& truth() const { return truth_; }

  // Deterministic in (config, domain, period); the cell's generator is
  // derived from exactly those coordinates, so cells may be produced in any
  // order or in parallel.
  PeriodDataset generate_period(int domain, int period) const;

  // The label logit of one sample under this ground truth.
  double logit(const Sample& sample) const;

 private:
  GenConfig config_;
  FeatureSchema schema_;
  GroundTruth truth_;
};

PeriodDataset generate_period(const GenConfig& config,
                              const FeatureSchema& schema, int domain,
                              int period);

// streams[domain][period] for the whole horizon.
using DomainStreams = std::vector<std::vector<PeriodDataset>>;
DomainStreams generate_all(const SyntheticGenerator& generator);

}  // namespace xdt
