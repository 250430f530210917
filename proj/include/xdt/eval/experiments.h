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
#include <string>
#include <vector>

#include "xdt/eval/metrics.h"
#include "xdt/train/trainer.h"

namespace xdt {

// Names accepted by apply_variant: full, base, no-gating, no-adversarial,
// no-middle, no-logit and only-src-K (K is 1-based).
std::vector<std::string> default_ablation_variants(int num_sources);

// A copy of `base` with the variant's overrides. Throws std::invalid_argument
// for unknown names or an out-of-range source index.
RunConfig apply_variant(const RunConfig& base, const std::string& variant);

// Generated data and trained sources for one seed, shared by every run of that
// seed that leaves the data and source settings alone.
struct SeedContext {
  std::uint64_t seed = 0;
  DomainStreams streams;
  SourceHistory sources;
};

SeedContext prepare_seed(const RunConfig& config, std::uint64_t seed);
RunResult run_with_context(const RunConfig& config, const SeedContext& context);

double mean_auc(const std::vector<MetricsRecord>& records);
double mean_logloss(const std::vector<MetricsRecord>& records);

struct VariantSummary {
  std::string variant;
  int runs = 0;
  double auc_mean = 0.0;
  double auc_std = 0.0;  // sample standard deviation over seeds
  double logloss_mean = 0.0;
  double logloss_std = 0.0;
};

struct AblationResult {
  std::vector<MetricsRecord> records;  // ordered by (variant, seed, period)
  std::vector<VariantSummary> summaries;
};

// One incremental run per (variant, seed). `jobs` > 1 runs seeds on worker
// threads; output order does not depend on it.
AblationResult run_ablation(const RunConfig& base,
                            const std::vector<std::string>& variants,
                            const std::vector<std::uint64_t>& seeds,
                            int jobs = 1);

// Columns variant,runs,auc_mean,auc_std,logloss_mean,logloss_std.
std::string summary_csv(const std::vector<VariantSummary>& summaries);

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  std::uint64_t seed = 0;
  double auc = 0.0;      // mean over evaluated periods
  double logloss = 0.0;  // mean over evaluated periods
};

// Parameter is one of tau, alpha, beta1, beta2.
RunConfig with_parameter(const RunConfig& base, const std::string& parameter,
                         double value);
std::vector<SweepRow> sweep(const RunConfig& base, const std::string& parameter,
                            const std::vector<double>& grid,
                            const std::vector<std::uint64_t>& seeds,
                            int jobs = 1);
// Columns parameter,value,seed,auc,logloss.
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Per-period curves for the base run and one run per plug period, labelled
// "base" and "plug-P".
std::vector<MetricsRecord> plug_study(const RunConfig& base,
                                      const std::vector<int>& plug_periods,
                                      const std::vector<std::uint64_t>& seeds,
                                      int jobs = 1);

enum class ReprStage { kPreMapper, kPostMapper };
ReprStage parse_repr_stage(const std::string& name);

struct Representations {
  Matrix values;     // batch × width
  Vector indicator;  // d per row
};

Representations export_representations(const TrainerState& state,
                                       const Batch& mixed, ReprStage stage,
                                       const TransferSpec& spec);
// Columns d,dim0..dimK.
std::string representations_csv(const Representations& reps);

// Held-out accuracy of a logistic-regression domain probe trained by full-batch
// gradient descent on standardized features.
double domain_probe_accuracy(const Representations& train,
                             const Representations& test, int iterations = 500,
                             double lr = 0.5);

}  // namespace xdt
