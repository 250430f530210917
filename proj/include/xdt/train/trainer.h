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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "xdt/data/generator.h"
#include "xdt/eval/metrics.h"
#include "xdt/model/backbone.h"
#include "xdt/model/checkpoint.h"
#include "xdt/nn/adam.h"
#include "xdt/transfer/extractors.h"
#include "xdt/transfer/migrator.h"

namespace xdt {

// Loss weights of the step-2 objective
//   lambda * L_CE + alpha * L_adv2 + beta1 * sum L_MSE + beta2 * L_KL
// plus the optimizer and schedule settings.
struct HyperParams {
  double lambda = 1.0;
  double alpha = 0.05;
  double beta1 = 0.1;
  double beta2 = 0.1;
  double tau = 10.0;
  double lr = 1e-3;
  int batch_size = 256;
  int epochs_per_period = 1;
  int num_spots = 1;

  void validate() const;
  KDConfig kd() const { return {tau, beta1, beta2, num_spots}; }
};

struct ModelSpec {
  BackboneKind kind = BackboneKind::kDnn;
  std::vector<int> trunk_widths = {64, 32};
};

struct TransferSpec {
  int gate_hidden = 16;
  int dis_hidden = 16;
  // false: uniform 1/N aggregation, gate untouched.
  bool use_gating = true;
  // false: no discriminator update and no confusion loss.
  bool adversarial = true;
  bool target_rows_from_target_model = false;

  AdversarialOptions adversarial_options() const {
    return {use_gating, target_rows_from_target_model};
  }
};

// Everything one incremental run needs.
struct RunConfig {
  GenConfig data;
  FeatureSchema schema = FeatureSchema::standard();
  ModelSpec target_model;
  ModelSpec source_model;
  HyperParams hyper;
  TransferSpec transfer;
  // First period trained with the transfer objective; earlier periods are
  // plain fine-tuning. A value >= num_periods gives the fine-tune baseline.
  int plug_period = 0;
  // Indices (0-based) of the sources the transfer uses; empty = all.
  std::vector<int> source_subset;
  std::string variant = "full";
  std::uint64_t seed = 1;

  // Throws std::invalid_argument describing the first inconsistency.
  void validate() const;
  std::vector<int> active_sources() const;
};

// The trainable plumbing between the source ensemble and the target model.
struct TransferModules {
  GatingNetwork gating;
  Mapper mapper;
  Discriminator discriminator;
  std::vector<Projection> projections;  // one W_KD per middle spot

  TransferModules zeros_like() const;
  ParamList gating_params() { return collect_of(gating); }
  ParamList mapper_params() { return collect_of(mapper); }
  ParamList discriminator_params() { return collect_of(discriminator); }
  ParamList projection_params();

 private:
  template <typename T>
  static ParamList collect_of(T& module) {
    ParamList out;
    module.collect(out);
    return out;
  }
};

// Gate and discriminator seeded random, mapper identity, W_KD identity where
// widths agree. Spot i pairs the i-th trunk layer counted from the top.
TransferModules init_transfer(const Backbone& source, const Backbone& target,
                              int num_sources, const TransferSpec& spec,
                              int num_spots, std::mt19937_64& rng);

struct TrainerState {
  std::vector<Backbone> sources;  // the ensemble for the current period
  Backbone target;
  std::optional<TransferModules> transfer;
  AdamState target_opt;
  AdamState gating_opt;
  AdamState mapper_opt;
  AdamState discriminator_opt;
  AdamState projection_opt;
  int period = 0;
  int plug_period = 0;
  std::uint64_t seed = 1;
};

// Components of one transfer step.
struct LossRecord {
  double ce = 0.0;
  double adv1 = 0.0;
  double adv2 = 0.0;
  double mse = 0.0;  // sum over spots
  double kl = 0.0;
  double step2_total = 0.0;
};

double ce_loss(const Vector& predictions, const Vector& labels);

// Gradient accumulators shaped like the step-2 trainable parameters.
struct Step2Grads {
  Backbone target;
  TransferModules transfer;
};

// The step-2 objective at the current parameters. When `grads` is non-null it
// is overwritten with the gradient. `adversarial`, when given, is a trace of
// the mixed batch at the current (non-discriminator) parameters.
LossRecord step2_objective(const TrainerState& state, const Batch& target_batch,
                           const Batch& mixed_batch, const HyperParams& hyper,
                           const TransferSpec& spec, Step2Grads* grads,
                           const AdversarialTrace* adversarial = nullptr);

// L_adv1 at the current parameters; gradient w.r.t. the discriminator only.
double step1_objective(const TrainerState& state, const Batch& mixed_batch,
                       const TransferSpec& spec, Discriminator* grad,
                       AdversarialTrace* trace_out = nullptr);

// Step 1: one Adam update of the discriminator on L_adv1. Returns the loss and,
// if `trace_out` is non-null, the mixed-batch trace it was computed on.
double diit_step1(TrainerState& state, const Batch& mixed_batch,
                  const TransferSpec& spec, AdversarialTrace* trace_out = nullptr);

// Step 2: one Adam update of the target model, gate, mapper and W_KD with the
// discriminator frozen. `trace` may reuse the step-1 trace.
LossRecord diit_step2(TrainerState& state, const Batch& target_batch,
                      const Batch& mixed_batch, const HyperParams& hyper,
                      const TransferSpec& spec,
                      const AdversarialTrace* trace = nullptr);

// Step 1 (when adversarial) followed by step 2. Source models are read-only
// throughout.
LossRecord diit_step(TrainerState& state, const Batch& target_batch,
                     const Batch& mixed_batch, const HyperParams& hyper,
                     const TransferSpec& spec);

// What one period hands to the next.
struct PeriodArtifacts {
  Backbone target;
  std::optional<TransferModules> transfer;
  AdamState target_opt;
  AdamState gating_opt;
  AdamState mapper_opt;
  AdamState discriminator_opt;
  AdamState projection_opt;
};

PeriodArtifacts artifacts_of(const TrainerState& state);

// Initializes the target for `state.period` as an exact copy of the previous
// period's target. With `first_plug` the transfer modules are freshly
// initialized (mapper = identity); otherwise they are carried over. For
// period 0 `previous` may be null and a fresh seeded target is built.
void warm_start(TrainerState& state, const PeriodArtifacts* previous,
                bool first_plug, const RunConfig& config);

// Plain cross-entropy training for hyper.epochs_per_period epochs, batches
// shuffled by a generator derived from `shuffle_seed` and the epoch.
// Returns the mean loss of each batch in order.
std::vector<double> fine_tune(Backbone& model, AdamState& opt,
                              const PeriodDataset& data,
                              const HyperParams& hyper,
                              std::uint64_t shuffle_seed);

// One period of independent source training.
std::vector<double> train_source_period(Backbone& model, AdamState& opt,
                                        const PeriodDataset& data,
                                        const HyperParams& hyper,
                                        std::uint64_t seed, int source_index);

// sources[period][n]: the n-th source model after training on period data.
struct SourceHistory {
  std::vector<std::vector<Backbone>> models;
};

SourceHistory train_all_sources(const RunConfig& config,
                                const DomainStreams& streams);

// Mean loss components of one period.
struct PeriodLosses {
  int period = 0;
  bool transfer = false;
  LossRecord mean;
};

struct RunResult {
  std::vector<MetricsRecord> metrics;
  std::vector<PeriodLosses> losses;
  TrainerState final_state;
};

using PeriodHook = std::function<void(int period, const TrainerState& state)>;

// Target-side schedule over every period, given trained sources. Period t's
// model is evaluated on the period t+1 target stream. `resume` continues from
// saved artifacts of period resume_period - 1.
RunResult run_target(const RunConfig& config, const DomainStreams& streams,
                     const SourceHistory& sources,
                     const PeriodHook& hook = nullptr,
                     const PeriodArtifacts* resume = nullptr,
                     int resume_period = 0);

// Data generation, independent source training and target schedule.
RunResult run_incremental(const RunConfig& config);

MetricsRecord evaluate_target(const Backbone& target, const PeriodDataset& next,
                              int period, const std::string& variant,
                              std::uint64_t seed);

// Checkpoint helpers for the trainer's parameter groups.
void pack_adam(const AdamState& state, const std::string& prefix,
               TensorArchive& archive);
AdamState unpack_adam(const TensorArchive& archive, const std::string& prefix);
void pack_transfer(const TransferModules& modules, const std::string& prefix,
                   TensorArchive& archive);
TransferModules unpack_transfer(const TensorArchive& archive,
                                const std::string& prefix);

void save_artifacts(const std::string& path, const PeriodArtifacts& artifacts,
                    int period);
PeriodArtifacts load_artifacts(const std::string& path, int* period = nullptr);

}  // namespace xdt
