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

#include "xdt/train/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "xdt/nn/errors.h"
#include "xdt/nn/losses.h"
#include "xdt/nn/random.h"

namespace xdt {

namespace {

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> coords) {
  return make_rng(coords)();
}

std::uint64_t target_shuffle_seed(std::uint64_t seed, int period) {
  return derive_seed({seed, tag(Stream::kTargetShuffle),
                      static_cast<std::uint64_t>(period)});
}

std::uint64_t mixed_shuffle_seed(std::uint64_t seed, int period) {
  return derive_seed({seed, tag(Stream::kMixedShuffle),
                      static_cast<std::uint64_t>(period)});
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, int epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng({seed, static_cast<std::uint64_t>(epoch)});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

std::span<const std::size_t> batch_rows(const std::vector<std::size_t>& order,
                                        std::size_t begin, int batch_size) {
  const std::size_t end = std::min(order.size(), begin + batch_size);
  return {order.data() + begin, end - begin};
}

void require_finite_loss(double value, const char* component) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string("non-finite ") + component + " loss");
  }
}

void add_into(Matrix& acc, const Matrix& term) {
  if (acc.size() == 0) {
    acc = term;
  } else {
    acc += term;
  }
}

}  // namespace

void HyperParams::validate() const {
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0)) {
      throw std::invalid_argument(std::string("hyper.") + name + " must be >= 0, got " +
                                  std::to_string(v));
    }
  };
  non_negative(lambda, "lambda");
  non_negative(alpha, "alpha");
  non_negative(beta1, "beta1");
  non_negative(beta2, "beta2");
  if (!(tau > 0)) {
    throw std::invalid_argument("hyper.tau must be > 0, got " + std::to_string(tau));
  }
  if (!(lr > 0)) {
    throw std::invalid_argument("hyper.lr must be > 0, got " + std::to_string(lr));
  }
  if (batch_size < 1) throw std::invalid_argument("hyper.batch_size must be >= 1");
  if (epochs_per_period < 1) {
    throw std::invalid_argument("hyper.epochs_per_period must be >= 1");
  }
  if (num_spots < 0) throw std::invalid_argument("hyper.num_spots must be >= 0");
}

void RunConfig::validate() const {
  data.validate();
  schema.validate();
  hyper.validate();
  if (target_model.trunk_widths.empty() || source_model.trunk_widths.empty()) {
    throw std::invalid_argument("model trunk widths must be non-empty");
  }
  const int depth = static_cast<int>(std::min(target_model.trunk_widths.size(),
                                              source_model.trunk_widths.size()));
  if (hyper.num_spots > depth) {
    throw std::invalid_argument("hyper.num_spots " + std::to_string(hyper.num_spots) +
                                " exceeds trunk depth " + std::to_string(depth));
  }
  if (transfer.target_rows_from_target_model &&
      target_model.trunk_widths.back() != source_model.trunk_widths.back()) {
    throw std::invalid_argument(
        "transfer.target_rows_from_target_model needs equal representation widths");
  }
  if (plug_period < 0) throw std::invalid_argument("plug_period must be >= 0");
  for (int s : source_subset) {
    if (s < 0 || s >= data.num_sources()) {
      throw std::invalid_argument("source index " + std::to_string(s) +
                                  " outside [0, " + std::to_string(data.num_sources()) +
                                  ")");
    }
  }
}

std::vector<int> RunConfig::active_sources() const {
  if (!source_subset.empty()) return source_subset;
  std::vector<int> all(data.num_sources());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

TransferModules TransferModules::zeros_like() const {
  TransferModules z;
  z.gating = gating.zeros_like();
  z.mapper = mapper.zeros_like();
  z.discriminator = discriminator.zeros_like();
  for (const auto& p : projections) z.projections.push_back(p.zeros_like());
  return z;
}

ParamList TransferModules::projection_params() {
  ParamList out;
  for (auto& p : projections) p.collect(out);
  return out;
}

TransferModules init_transfer(const Backbone& source, const Backbone& target,
                              int num_sources, const TransferSpec& spec,
                              int num_spots, std::mt19937_64& rng) {
  const int source_width = source.representation_width();
  TransferModules modules;
  modules.gating = make_gating(target.representation_width(), spec.gate_hidden,
                               num_sources, rng);
  modules.mapper = make_identity_mapper(source_width);
  modules.discriminator = make_discriminator(source_width, spec.dis_hidden, rng);
  const auto src_widths = source.trunk_widths();
  const auto tgt_widths = target.trunk_widths();
  for (int i = 0; i < num_spots; ++i) {
    modules.projections.push_back(
        make_projection(src_widths[src_widths.size() - 1 - i],
                        tgt_widths[tgt_widths.size() - 1 - i], rng));
  }
  return modules;
}

double ce_loss(const Vector& predictions, const Vector& labels) {
  return binary_cross_entropy(predictions, labels);
}

LossRecord step2_objective(const TrainerState& state, const Batch& target_batch,
                           const Batch& mixed_batch, const HyperParams& hyper,
                           const TransferSpec& spec, Step2Grads* grads,
                           const AdversarialTrace* adversarial) {
  if (!state.transfer) throw std::logic_error("step2_objective: transfer not plugged");
  if (state.sources.empty()) throw std::logic_error("step2_objective: no source models");
  if (target_batch.size() == 0 || mixed_batch.size() == 0) {
    throw std::invalid_argument("step2_objective: empty batch");
  }
  const TransferModules& mods = *state.transfer;
  const Backbone& target = state.target;
  const int num_sources = static_cast<int>(state.sources.size());
  const int spots = static_cast<int>(mods.projections.size());

  // Target batch through the target model and the source ensemble.
  const BackboneTrace tt = forward_trace(target, target_batch);
  std::vector<BackboneTrace> st;
  st.reserve(num_sources);
  for (const Backbone& s : state.sources) st.push_back(forward_trace(s, target_batch));
  std::vector<Matrix> reprs, logits;
  for (const auto& trace : st) {
    reprs.push_back(trace.representation());
    logits.push_back(trace.logits);
  }
  GateTrace gate;
  if (spec.use_gating) {
    gate = gate_forward(mods.gating, tt.representation());
  } else {
    gate.weights = uniform_gate(target_batch.size(), num_sources);
  }
  const Aggregate agg = aggregate_sources(reprs, logits, gate.weights);
  const Matrix teacher = map_representation(mods.mapper, agg.representation);

  LossRecord rec;
  rec.ce = ce_loss(tt.prediction, target_batch.label);

  // Middle spots. Spot 0 is the representation and goes through the mapper.
  std::vector<Matrix> spot_teacher_grad(spots), spot_student_grad(spots);
  std::vector<std::vector<Matrix>> spot_reprs(spots);
  std::vector<Projection> proj_grads;
  for (const auto& p : mods.projections) proj_grads.push_back(p.zeros_like());
  for (int i = 0; i < spots; ++i) {
    const std::size_t tl = target.trunk.size() - 1 - i;
    Matrix spot_teacher;
    if (i == 0) {
      spot_teacher = teacher;
    } else {
      for (std::size_t n = 0; n < st.size(); ++n) {
        const auto& hidden = st[n].hidden;
        spot_reprs[i].push_back(hidden[hidden.size() - 1 - i]);
      }
      spot_teacher = aggregate_sources(spot_reprs[i], {}, gate.weights).representation;
    }
    rec.mse += middle_distill_loss(spot_teacher, tt.hidden[tl], mods.projections[i],
                                   &spot_teacher_grad[i], &spot_student_grad[i],
                                   &proj_grads[i]);
  }

  Matrix grad_teacher_logits, grad_student_logits;
  rec.kl = logit_distill_loss(agg.logits, tt.logits, hyper.tau, &grad_teacher_logits,
                              &grad_student_logits);

  // Mixed batch through the adversarial path with the discriminator frozen.
  AdversarialTrace own_trace;
  DiscriminatorTrace dis_trace;
  const AdversarialOptions adv_opts = spec.adversarial_options();
  if (spec.adversarial) {
    if (adversarial == nullptr) {
      own_trace = adversarial_source_path(state.sources, target, mods.gating,
                                          mods.mapper, mixed_batch, adv_opts);
      adversarial = &own_trace;
    }
    dis_trace = discriminator_forward(mods.discriminator, adversarial->mapped);
    rec.adv2 = confusion_loss(dis_trace.prob, adversarial->indicator);
  }

  require_finite_loss(rec.ce, "ce");
  require_finite_loss(rec.adv2, "adv2");
  require_finite_loss(rec.mse, "mse");
  require_finite_loss(rec.kl, "kl");
  rec.step2_total = hyper.lambda * rec.ce + hyper.alpha * rec.adv2 +
                    hyper.beta1 * rec.mse + hyper.beta2 * rec.kl;
  require_finite_loss(rec.step2_total, "step-2 total");
  if (grads == nullptr) return rec;

  grads->target = target.zeros_like();
  grads->transfer = mods.zeros_like();

  Matrix grad_logits = Matrix::Zero(target_batch.size(), 2);
  if (hyper.lambda != 0.0) {
    grad_logits = hyper.lambda * prediction_logit_grad(tt.prediction, target_batch.label);
  }
  std::vector<Matrix> grad_hidden;
  auto inject = [&](std::size_t layer, const Matrix& g) {
    if (grad_hidden.empty()) grad_hidden.resize(target.trunk.size());
    add_into(grad_hidden[layer], g);
  };

  Matrix grad_gate;  // dL/dg on the target batch
  if (hyper.beta1 != 0.0 && spots > 0) {
    for (int i = 0; i < spots; ++i) {
      inject(target.trunk.size() - 1 - i, hyper.beta1 * spot_student_grad[i]);
      if (!mods.projections[i].identity) {
        grads->transfer.projections[i].weight += hyper.beta1 * proj_grads[i].weight;
      }
    }
    const Matrix grad_teacher = hyper.beta1 * spot_teacher_grad[0];
    const Matrix grad_agg = mapper_backward(mods.mapper, agg.representation,
                                            grad_teacher, &grads->transfer.mapper);
    add_into(grad_gate, aggregate_gate_grad(reprs, {}, grad_agg, Matrix()));
    for (int i = 1; i < spots; ++i) {
      add_into(grad_gate, aggregate_gate_grad(spot_reprs[i], {},
                                              hyper.beta1 * spot_teacher_grad[i],
                                              Matrix()));
    }
  }
  if (hyper.beta2 != 0.0) {
    grad_logits += hyper.beta2 * grad_student_logits;
    add_into(grad_gate, aggregate_gate_grad({}, logits, Matrix(),
                                            hyper.beta2 * grad_teacher_logits));
  }
  if (spec.use_gating && grad_gate.size() != 0) {
    inject(target.trunk.size() - 1,
           gate_backward(mods.gating, tt.representation(), gate, grad_gate,
                         &grads->transfer.gating));
  }
  backward(target, target_batch, tt, grad_logits, grad_hidden, grads->target);

  if (spec.adversarial && hyper.alpha != 0.0) {
    const Vector flipped = (1.0 - adversarial->indicator.array()).matrix();
    const Vector grad_logit =
        hyper.alpha * binary_cross_entropy_logit_grad(dis_trace.prob, flipped);
    const Matrix grad_mapped = discriminator_backward(
        mods.discriminator, adversarial->mapped, dis_trace, grad_logit, nullptr);
    adversarial_backward(state.sources, target, mods.gating, mods.mapper,
                         mixed_batch, *adversarial, grad_mapped, adv_opts,
                         &grads->transfer.mapper,
                         spec.use_gating ? &grads->transfer.gating : nullptr,
                         &grads->target);
  }
  return rec;
}

double step1_objective(const TrainerState& state, const Batch& mixed_batch,
                       const TransferSpec& spec, Discriminator* grad,
                       AdversarialTrace* trace_out) {
  if (!state.transfer) throw std::logic_error("step1_objective: transfer not plugged");
  if (mixed_batch.size() == 0) throw std::invalid_argument("step1_objective: empty batch");
  const TransferModules& mods = *state.transfer;
  AdversarialTrace trace =
      adversarial_source_path(state.sources, state.target, mods.gating, mods.mapper,
                              mixed_batch, spec.adversarial_options());
  const DiscriminatorTrace dis = discriminator_forward(mods.discriminator, trace.mapped);
  const double loss = discriminator_loss(dis.prob, trace.indicator);
  require_finite_loss(loss, "adv1");
  if (grad != nullptr) {
    *grad = mods.discriminator.zeros_like();
    discriminator_backward(mods.discriminator, trace.mapped, dis,
                           binary_cross_entropy_logit_grad(dis.prob, trace.indicator),
                           grad);
  }
  if (trace_out != nullptr) *trace_out = std::move(trace);
  return loss;
}

namespace {

void require_plugged(const TrainerState& state, const char* what) {
  if (!state.transfer) throw std::logic_error(std::string(what) + ": transfer not plugged");
  if (state.period < state.plug_period) {
    throw std::logic_error(std::string(what) + ": period " + std::to_string(state.period) +
                           " precedes plug period " + std::to_string(state.plug_period));
  }
}

}  // namespace

double diit_step1(TrainerState& state, const Batch& mixed_batch, const TransferSpec& spec,
                  AdversarialTrace* trace_out) {
  require_plugged(state, "diit_step1");
  Discriminator dis_grad;
  const double loss = step1_objective(state, mixed_batch, spec, &dis_grad, trace_out);
  ParamList grads;
  dis_grad.collect(grads);
  adam_step(state.transfer->discriminator_params(), grads, state.discriminator_opt);
  return loss;
}

LossRecord diit_step2(TrainerState& state, const Batch& target_batch,
                      const Batch& mixed_batch, const HyperParams& hyper,
                      const TransferSpec& spec, const AdversarialTrace* trace) {
  require_plugged(state, "diit_step2");
  TransferModules& mods = *state.transfer;
  Step2Grads grads;
  const LossRecord rec =
      step2_objective(state, target_batch, mixed_batch, hyper, spec, &grads, trace);
  adam_step(state.target.params(), grads.target.params(), state.target_opt);
  if (spec.use_gating) {
    adam_step(mods.gating_params(), grads.transfer.gating_params(), state.gating_opt);
  }
  adam_step(mods.mapper_params(), grads.transfer.mapper_params(), state.mapper_opt);
  const ParamList proj = mods.projection_params();
  if (!proj.empty()) {
    adam_step(proj, grads.transfer.projection_params(), state.projection_opt);
  }
  return rec;
}

LossRecord diit_step(TrainerState& state, const Batch& target_batch,
                     const Batch& mixed_batch, const HyperParams& hyper,
                     const TransferSpec& spec) {
  require_plugged(state, "diit_step");
  double adv1 = 0.0;
  AdversarialTrace trace;
  if (spec.adversarial) adv1 = diit_step1(state, mixed_batch, spec, &trace);
  // Only the discriminator moved, so the mixed-batch trace is still current.
  LossRecord rec = diit_step2(state, target_batch, mixed_batch, hyper, spec,
                              spec.adversarial ? &trace : nullptr);
  rec.adv1 = adv1;
  return rec;
}

PeriodArtifacts artifacts_of(const TrainerState& state) {
  return {state.target,         state.transfer,       state.target_opt,
          state.gating_opt,     state.mapper_opt,     state.discriminator_opt,
          state.projection_opt};
}

void warm_start(TrainerState& state, const PeriodArtifacts* previous,
                bool first_plug, const RunConfig& config) {
  if (previous == nullptr) {
    if (state.period != 0) {
      throw std::runtime_error("warm_start: missing prior checkpoint for period " +
                               std::to_string(state.period - 1));
    }
    state.target = build_backbone(
        config.target_model.kind, config.schema, config.target_model.trunk_widths,
        derive_seed({config.seed, tag(Stream::kTargetInit)}));
    state.target_opt = AdamState::like(state.target.params(), config.hyper.lr);
    state.transfer.reset();
  } else {
    state.target = previous->target;
    state.target_opt = previous->target_opt;
    state.transfer = previous->transfer;
    state.gating_opt = previous->gating_opt;
    state.mapper_opt = previous->mapper_opt;
    state.discriminator_opt = previous->discriminator_opt;
    state.projection_opt = previous->projection_opt;
  }
  if (first_plug) {
    if (state.sources.empty()) {
      throw std::logic_error("warm_start: plugging needs the source ensemble");
    }
    auto rng = make_rng({config.seed, tag(Stream::kTransferInit),
                         static_cast<std::uint64_t>(state.period)});
    state.transfer = init_transfer(state.sources.front(), state.target,
                                   static_cast<int>(state.sources.size()),
                                   config.transfer, config.hyper.num_spots, rng);
    const double lr = config.hyper.lr;
    state.gating_opt = AdamState::like(state.transfer->gating_params(), lr);
    state.mapper_opt = AdamState::like(state.transfer->mapper_params(), lr);
    state.discriminator_opt =
        AdamState::like(state.transfer->discriminator_params(), lr);
    state.projection_opt = AdamState::like(state.transfer->projection_params(), lr);
  }
}

std::vector<double> fine_tune(Backbone& model, AdamState& opt,
                              const PeriodDataset& data,
                              const HyperParams& hyper,
                              std::uint64_t shuffle_seed) {
  if (data.empty()) throw std::invalid_argument("fine_tune: empty dataset");
  std::vector<double> losses;
  for (int epoch = 0; epoch < hyper.epochs_per_period; ++epoch) {
    const auto order = epoch_order(data.size(), shuffle_seed, epoch);
    for (std::size_t begin = 0; begin < order.size(); begin += hyper.batch_size) {
      const Batch batch = make_batch(data, batch_rows(order, begin, hyper.batch_size));
      const BackboneTrace trace = forward_trace(model, batch);
      const double loss = ce_loss(trace.prediction, batch.label);
      require_finite_loss(loss, "ce");
      Backbone grads = model.zeros_like();
      backward(model, batch, trace, prediction_logit_grad(trace.prediction, batch.label),
               {}, grads);
      adam_step(model.params(), grads.params(), opt);
      losses.push_back(loss);
    }
  }
  return losses;
}

std::vector<double> train_source_period(Backbone& model, AdamState& opt,
                                        const PeriodDataset& data,
                                        const HyperParams& hyper,
                                        std::uint64_t seed, int source_index) {
  return fine_tune(model, opt, data, hyper,
                   derive_seed({seed, tag(Stream::kSourceShuffle),
                                static_cast<std::uint64_t>(source_index),
                                static_cast<std::uint64_t>(data.period)}));
}

SourceHistory train_all_sources(const RunConfig& config,
                                const DomainStreams& streams) {
  config.validate();
  const int num_sources = config.data.num_sources();
  SourceHistory history;
  history.models.resize(config.data.num_periods);
  for (int n = 0; n < num_sources; ++n) {
    Backbone model = build_backbone(
        config.source_model.kind, config.schema, config.source_model.trunk_widths,
        derive_seed({config.seed, tag(Stream::kSourceInit), static_cast<std::uint64_t>(n)}));
    AdamState opt = AdamState::like(model.params(), config.hyper.lr);
    for (int t = 0; t < config.data.num_periods; ++t) {
      train_source_period(model, opt, streams.at(n).at(t), config.hyper, config.seed, n);
      history.models[t].push_back(model);
    }
  }
  return history;
}

MetricsRecord evaluate_target(const Backbone& target, const PeriodDataset& next,
                              int period, const std::string& variant,
                              std::uint64_t seed) {
  const Batch batch = make_batch(next);
  const Vector scores = predict(target, batch);
  return {period, variant, seed, auc(scores, batch.label), logloss(scores, batch.label)};
}

RunResult run_target(const RunConfig& config, const DomainStreams& streams,
                     const SourceHistory& sources, const PeriodHook& hook,
                     const PeriodArtifacts* resume, int resume_period) {
  config.validate();
  const int periods = config.data.num_periods;
  const int target_domain = config.data.target_domain();
  const auto active = config.active_sources();

  RunResult result;
  TrainerState& state = result.final_state;
  state.seed = config.seed;
  state.plug_period = config.plug_period;

  std::optional<PeriodArtifacts> previous;
  if (resume != nullptr) previous = *resume;
  for (int t = resume_period; t < periods; ++t) {
    state.period = t;
    const PeriodDataset& target_data = streams.at(target_domain).at(t);
    const bool plugged = t >= config.plug_period;
    state.sources.clear();
    if (plugged) {
      for (int n : active) state.sources.push_back(sources.models.at(t).at(n));
    }
    const bool first_plug = plugged && !(previous && previous->transfer);
    warm_start(state, previous ? &*previous : nullptr, first_plug, config);

    PeriodLosses period_losses;
    period_losses.period = t;
    period_losses.transfer = plugged;
    if (!plugged) {
      const auto losses = fine_tune(state.target, state.target_opt, target_data,
                                    config.hyper, target_shuffle_seed(config.seed, t));
      period_losses.mean.ce =
          std::accumulate(losses.begin(), losses.end(), 0.0) / losses.size();
    } else {
      std::vector<const PeriodDataset*> source_data;
      for (int n : active) source_data.push_back(&streams.at(n).at(t));
      const PeriodDataset mixed = build_mixed(source_data, target_data, config.seed);
      const HyperParams& hyper = config.hyper;
      std::size_t steps = 0;
      for (int epoch = 0; epoch < hyper.epochs_per_period; ++epoch) {
        const auto target_order =
            epoch_order(target_data.size(), target_shuffle_seed(config.seed, t), epoch);
        const auto mixed_order =
            epoch_order(mixed.size(), mixed_shuffle_seed(config.seed, t), epoch);
        for (std::size_t begin = 0; begin < target_order.size();
             begin += hyper.batch_size) {
          const Batch tb =
              make_batch(target_data, batch_rows(target_order, begin, hyper.batch_size));
          const Batch mb =
              make_batch(mixed, batch_rows(mixed_order, begin, hyper.batch_size));
          const LossRecord rec = diit_step(state, tb, mb, hyper, config.transfer);
          LossRecord& m = period_losses.mean;
          m.ce += rec.ce;
          m.adv1 += rec.adv1;
          m.adv2 += rec.adv2;
          m.mse += rec.mse;
          m.kl += rec.kl;
          m.step2_total += rec.step2_total;
          ++steps;
        }
      }
      LossRecord& m = period_losses.mean;
      for (double* v : {&m.ce, &m.adv1, &m.adv2, &m.mse, &m.kl, &m.step2_total}) {
        *v /= static_cast<double>(steps);
      }
    }
    result.losses.push_back(period_losses);
    previous = artifacts_of(state);
    if (hook) hook(t, state);
    if (t + 1 < periods) {
      result.metrics.push_back(evaluate_target(state.target,
                                               streams.at(target_domain).at(t + 1), t,
                                               config.variant, config.seed));
    }
  }
  return result;
}

RunResult run_incremental(const RunConfig& config) {
  config.validate();
  GenConfig data = config.data;
  data.seed = config.seed;
  const SyntheticGenerator generator(data, config.schema);
  const DomainStreams streams = generate_all(generator);
  const SourceHistory sources = train_all_sources(config, streams);
  return run_target(config, streams, sources);
}

namespace {

Matrix column_of(const Vector& v) { return Matrix(v); }

void pack_dense(const DenseLayer& layer, const std::string& prefix,
                TensorArchive& archive) {
  archive.tensors.emplace_back(prefix + "/weight", layer.weight);
  archive.tensors.emplace_back(prefix + "/bias", column_of(layer.bias));
}

DenseLayer unpack_dense(const TensorArchive& archive, const std::string& prefix,
                        Activation activation) {
  DenseLayer layer;
  layer.weight = archive.get(prefix + "/weight");
  const Matrix& bias = archive.get(prefix + "/bias");
  if (bias.cols() != 1 || bias.rows() != layer.weight.rows()) {
    throw ParseError("checkpoint: tensor " + prefix + "/bias has shape " +
                     shape_string(bias) + ", expected " +
                     std::to_string(layer.weight.rows()) + "x1");
  }
  layer.bias = bias.col(0);
  layer.activation = activation;
  return layer;
}

}  // namespace

void pack_adam(const AdamState& state, const std::string& prefix,
               TensorArchive& archive) {
  archive.meta[prefix] = {{"step", state.step},
                          {"lr", state.lr},
                          {"beta1", state.beta1},
                          {"beta2", state.beta2},
                          {"eps", state.eps},
                          {"count", state.first_moment.size()}};
  for (std::size_t i = 0; i < state.first_moment.size(); ++i) {
    archive.tensors.emplace_back(prefix + "/m/" + std::to_string(i),
                                 column_of(state.first_moment[i]));
    archive.tensors.emplace_back(prefix + "/v/" + std::to_string(i),
                                 column_of(state.second_moment[i]));
  }
}

AdamState unpack_adam(const TensorArchive& archive, const std::string& prefix) {
  if (!archive.meta.contains(prefix)) {
    throw ParseError("checkpoint: no optimizer state under '" + prefix + "'");
  }
  AdamState state;
  std::size_t count = 0;
  try {
    const auto& meta = archive.meta.at(prefix);
    state.step = meta.at("step").get<std::int64_t>();
    state.lr = meta.at("lr").get<double>();
    state.beta1 = meta.at("beta1").get<double>();
    state.beta2 = meta.at("beta2").get<double>();
    state.eps = meta.at("eps").get<double>();
    count = meta.at("count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint: bad optimizer metadata: " + std::string(e.what()));
  }
  for (std::size_t i = 0; i < count; ++i) {
    state.first_moment.push_back(archive.get(prefix + "/m/" + std::to_string(i)).col(0));
    state.second_moment.push_back(archive.get(prefix + "/v/" + std::to_string(i)).col(0));
  }
  return state;
}

void pack_transfer(const TransferModules& modules, const std::string& prefix,
                   TensorArchive& archive) {
  nlohmann::json identity = nlohmann::json::array();
  for (const auto& p : modules.projections) identity.push_back(p.identity);
  archive.meta[prefix] = {{"projections", identity}};
  pack_dense(modules.gating.hidden, prefix + "/gating/hidden", archive);
  pack_dense(modules.gating.output, prefix + "/gating/output", archive);
  archive.tensors.emplace_back(prefix + "/mapper", modules.mapper.weight);
  pack_dense(modules.discriminator.hidden, prefix + "/discriminator/hidden", archive);
  pack_dense(modules.discriminator.output, prefix + "/discriminator/output", archive);
  for (std::size_t i = 0; i < modules.projections.size(); ++i) {
    if (!modules.projections[i].identity) {
      archive.tensors.emplace_back(prefix + "/projection/" + std::to_string(i),
                                   modules.projections[i].weight);
    }
  }
}

TransferModules unpack_transfer(const TensorArchive& archive,
                                const std::string& prefix) {
  if (!archive.meta.contains(prefix)) {
    throw ParseError("checkpoint: no transfer modules under '" + prefix + "'");
  }
  TransferModules modules;
  modules.gating.hidden = unpack_dense(archive, prefix + "/gating/hidden", Activation::kRelu);
  modules.gating.output =
      unpack_dense(archive, prefix + "/gating/output", Activation::kIdentity);
  modules.mapper.weight = archive.get(prefix + "/mapper");
  modules.discriminator.hidden =
      unpack_dense(archive, prefix + "/discriminator/hidden", Activation::kRelu);
  modules.discriminator.output =
      unpack_dense(archive, prefix + "/discriminator/output", Activation::kIdentity);
  const auto& flags = archive.meta.at(prefix).at("projections");
  for (std::size_t i = 0; i < flags.size(); ++i) {
    Projection p;
    p.identity = flags[i].get<bool>();
    if (!p.identity) p.weight = archive.get(prefix + "/projection/" + std::to_string(i));
    modules.projections.push_back(std::move(p));
  }
  return modules;
}

void save_artifacts(const std::string& path, const PeriodArtifacts& artifacts,
                    int period) {
  TensorArchive archive;
  archive.meta["period"] = period;
  archive.meta["has_transfer"] = artifacts.transfer.has_value();
  pack_backbone(artifacts.target, "target", archive);
  pack_adam(artifacts.target_opt, "target_opt", archive);
  if (artifacts.transfer) {
    pack_transfer(*artifacts.transfer, "transfer", archive);
    pack_adam(artifacts.gating_opt, "gating_opt", archive);
    pack_adam(artifacts.mapper_opt, "mapper_opt", archive);
    pack_adam(artifacts.discriminator_opt, "discriminator_opt", archive);
    pack_adam(artifacts.projection_opt, "projection_opt", archive);
  }
  save_archive(path, archive);
}

PeriodArtifacts load_artifacts(const std::string& path, int* period) {
  const TensorArchive archive = load_archive(path);
  PeriodArtifacts artifacts;
  try {
    if (period != nullptr) *period = archive.meta.at("period").get<int>();
    artifacts.target = unpack_backbone(archive, "target");
    artifacts.target_opt = unpack_adam(archive, "target_opt");
    if (archive.meta.at("has_transfer").get<bool>()) {
      artifacts.transfer = unpack_transfer(archive, "transfer");
      artifacts.gating_opt = unpack_adam(archive, "gating_opt");
      artifacts.mapper_opt = unpack_adam(archive, "mapper_opt");
      artifacts.discriminator_opt = unpack_adam(archive, "discriminator_opt");
      artifacts.projection_opt = unpack_adam(archive, "projection_opt");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": bad checkpoint metadata: " + e.what());
  }
  return artifacts;
}

}  // namespace xdt
