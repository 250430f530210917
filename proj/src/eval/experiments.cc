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

#include "xdt/eval/experiments.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "xdt/nn/activations.h"
#include "xdt/nn/errors.h"

namespace xdt {

namespace {

// Runs body(i) for i in [0, n) on up to `jobs` threads. Results are written to
// per-index slots, so the merge order is fixed.
template <typename Body>
void parallel_for(std::size_t n, int jobs, Body body) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> workers;
  const std::size_t count = std::min<std::size_t>(jobs, n);
  for (std::size_t w = 0; w < count; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += count) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::vector<std::string> default_ablation_variants(int num_sources) {
  std::vector<std::string> out = {"full", "no-gating", "no-adversarial", "no-middle",
                                  "no-logit"};
  for (int k = 1; k <= num_sources; ++k) out.push_back("only-src-" + std::to_string(k));
  out.push_back("base");
  return out;
}

RunConfig apply_variant(const RunConfig& base, const std::string& variant) {
  RunConfig c = base;
  c.variant = variant;
  if (variant == "full") {
  } else if (variant == "base") {
    c.plug_period = c.data.num_periods;
  } else if (variant == "no-gating") {
    c.transfer.use_gating = false;
  } else if (variant == "no-adversarial") {
    c.transfer.adversarial = false;
    c.hyper.alpha = 0.0;
  } else if (variant == "no-middle") {
    c.hyper.beta1 = 0.0;
  } else if (variant == "no-logit") {
    c.hyper.beta2 = 0.0;
  } else if (variant.rfind("only-src-", 0) == 0) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(variant.substr(9), &used);
      if (used != variant.size() - 9) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("unknown variant '" + variant + "'");
    }
    if (k < 1 || k > c.data.num_sources()) {
      throw std::invalid_argument("variant '" + variant + "': source index outside [1, " +
                                  std::to_string(c.data.num_sources()) + "]");
    }
    c.source_subset = {k - 1};
  } else {
    throw std::invalid_argument("unknown variant '" + variant + "'");
  }
  return c;
}

SeedContext prepare_seed(const RunConfig& config, std::uint64_t seed) {
  RunConfig c = config;
  c.seed = seed;
  c.validate();
  GenConfig data = c.data;
  data.seed = seed;
  SeedContext context;
  context.seed = seed;
  context.streams = generate_all(SyntheticGenerator(data, c.schema));
  context.sources = train_all_sources(c, context.streams);
  return context;
}

RunResult run_with_context(const RunConfig& config, const SeedContext& context) {
  RunConfig c = config;
  c.seed = context.seed;
  return run_target(c, context.streams, context.sources);
}

double mean_auc(const std::vector<MetricsRecord>& records) {
  if (records.empty()) throw std::invalid_argument("mean_auc: no records");
  double acc = 0.0;
  for (const auto& r : records) acc += r.auc;
  return acc / static_cast<double>(records.size());
}

double mean_logloss(const std::vector<MetricsRecord>& records) {
  if (records.empty()) throw std::invalid_argument("mean_logloss: no records");
  double acc = 0.0;
  for (const auto& r : records) acc += r.logloss;
  return acc / static_cast<double>(records.size());
}

AblationResult run_ablation(const RunConfig& base,
                            const std::vector<std::string>& variants,
                            const std::vector<std::uint64_t>& seeds, int jobs) {
  if (seeds.empty()) throw std::invalid_argument("run_ablation: no seeds");
  std::vector<RunConfig> configs;
  for (const auto& v : variants) {
    configs.push_back(apply_variant(base, v));
    configs.back().validate();
  }
  // runs[seed][variant]
  std::vector<std::vector<std::vector<MetricsRecord>>> runs(seeds.size());
  parallel_for(seeds.size(), jobs, [&](std::size_t s) {
    const SeedContext context = prepare_seed(base, seeds[s]);
    for (const auto& c : configs) runs[s].push_back(run_with_context(c, context).metrics);
  });

  AblationResult result;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    std::vector<double> aucs, losses;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& records = runs[s][v];
      result.records.insert(result.records.end(), records.begin(), records.end());
      aucs.push_back(mean_auc(records));
      losses.push_back(mean_logloss(records));
    }
    VariantSummary summary;
    summary.variant = variants[v];
    summary.runs = static_cast<int>(seeds.size());
    summary.auc_mean = std::accumulate(aucs.begin(), aucs.end(), 0.0) / aucs.size();
    summary.logloss_mean =
        std::accumulate(losses.begin(), losses.end(), 0.0) / losses.size();
    summary.auc_std = sample_std(aucs, summary.auc_mean);
    summary.logloss_std = sample_std(losses, summary.logloss_mean);
    result.summaries.push_back(summary);
  }
  return result;
}

std::string summary_csv(const std::vector<VariantSummary>& summaries) {
  std::string out = "variant,runs,auc_mean,auc_std,logloss_mean,logloss_std\n";
  for (const auto& s : summaries) {
    out += s.variant + "," + std::to_string(s.runs) + "," + fixed6(s.auc_mean) + "," +
           fixed6(s.auc_std) + "," + fixed6(s.logloss_mean) + "," +
           fixed6(s.logloss_std) + "\n";
  }
  return out;
}

RunConfig with_parameter(const RunConfig& base, const std::string& parameter,
                         double value) {
  RunConfig c = base;
  if (parameter == "tau") {
    c.hyper.tau = value;
  } else if (parameter == "alpha") {
    c.hyper.alpha = value;
  } else if (parameter == "beta1") {
    c.hyper.beta1 = value;
  } else if (parameter == "beta2") {
    c.hyper.beta2 = value;
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + parameter +
                                "' (expected tau, alpha, beta1 or beta2)");
  }
  c.validate();
  return c;
}

std::vector<SweepRow> sweep(const RunConfig& base, const std::string& parameter,
                            const std::vector<double>& grid,
                            const std::vector<std::uint64_t>& seeds, int jobs) {
  std::vector<RunConfig> configs;
  for (double v : grid) configs.push_back(with_parameter(base, parameter, v));
  std::vector<std::vector<SweepRow>> per_seed(seeds.size());
  parallel_for(seeds.size(), jobs, [&](std::size_t s) {
    const SeedContext context = prepare_seed(base, seeds[s]);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const RunResult r = run_with_context(configs[g], context);
      per_seed[s].push_back({parameter, grid[g], seeds[s], mean_auc(r.metrics),
                             mean_logloss(r.metrics)});
    }
  });
  std::vector<SweepRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t s = 0; s < seeds.size(); ++s) rows.push_back(per_seed[s][g]);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "parameter,value,seed,auc,logloss\n";
  for (const auto& r : rows) {
    char value[64];
    std::snprintf(value, sizeof(value), "%g", r.value);
    out += r.parameter + "," + value + "," + std::to_string(r.seed) + "," +
           fixed6(r.auc) + "," + fixed6(r.logloss) + "\n";
  }
  return out;
}

std::vector<MetricsRecord> plug_study(const RunConfig& base,
                                      const std::vector<int>& plug_periods,
                                      const std::vector<std::uint64_t>& seeds,
                                      int jobs) {
  std::vector<RunConfig> configs = {apply_variant(base, "base")};
  for (int p : plug_periods) {
    if (p < 0 || p >= base.data.num_periods) {
      throw std::invalid_argument("plug period " + std::to_string(p) + " outside [0, " +
                                  std::to_string(base.data.num_periods) + ")");
    }
    RunConfig c = base;
    c.plug_period = p;
    c.variant = "plug-" + std::to_string(p);
    configs.push_back(c);
  }
  std::vector<std::vector<std::vector<MetricsRecord>>> runs(seeds.size());
  parallel_for(seeds.size(), jobs, [&](std::size_t s) {
    const SeedContext context = prepare_seed(base, seeds[s]);
    for (const auto& c : configs) runs[s].push_back(run_with_context(c, context).metrics);
  });
  std::vector<MetricsRecord> out;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      out.insert(out.end(), runs[s][c].begin(), runs[s][c].end());
    }
  }
  return out;
}

ReprStage parse_repr_stage(const std::string& name) {
  if (name == "pre" || name == "pre-mapper") return ReprStage::kPreMapper;
  if (name == "post" || name == "post-mapper") return ReprStage::kPostMapper;
  throw std::invalid_argument("unknown representation stage '" + name +
                              "' (expected pre-mapper or post-mapper)");
}

Representations export_representations(const TrainerState& state,
                                       const Batch& mixed, ReprStage stage,
                                       const TransferSpec& spec) {
  if (!state.transfer) {
    throw std::logic_error("export_representations: transfer modules not plugged");
  }
  const AdversarialTrace trace =
      adversarial_source_path(state.sources, state.target, state.transfer->gating,
                              state.transfer->mapper, mixed, spec.adversarial_options());
  return {stage == ReprStage::kPreMapper ? trace.pre_mapper : trace.mapped,
          trace.indicator};
}

std::string representations_csv(const Representations& reps) {
  std::string out = "d";
  for (Eigen::Index j = 0; j < reps.values.cols(); ++j) out += ",dim" + std::to_string(j);
  out += "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < reps.values.rows(); ++i) {
    out += std::to_string(static_cast<int>(reps.indicator[i]));
    for (Eigen::Index j = 0; j < reps.values.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), ",%.17g", reps.values(i, j));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

double domain_probe_accuracy(const Representations& train,
                             const Representations& test, int iterations,
                             double lr) {
  if (train.values.rows() == 0 || test.values.rows() == 0) {
    throw std::invalid_argument("domain_probe_accuracy: empty split");
  }
  if (train.values.cols() != test.values.cols()) {
    throw DimensionError("domain_probe_accuracy: train width " +
                         std::to_string(train.values.cols()) + " vs test width " +
                         std::to_string(test.values.cols()));
  }
  const Eigen::RowVectorXd mean = train.values.colwise().mean();
  Eigen::RowVectorXd scale =
      ((train.values.rowwise() - mean).array().square().colwise().mean()).sqrt();
  scale = scale.unaryExpr([](double s) { return s > 1e-12 ? s : 1.0; });
  auto standardize = [&](const Matrix& m) -> Matrix {
    return ((m.rowwise() - mean).array().rowwise() / scale.array()).matrix();
  };
  const Matrix x = standardize(train.values);
  const Matrix xt = standardize(test.values);
  const double n = static_cast<double>(x.rows());
  Vector w = Vector::Zero(x.cols());
  double b = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Vector p = (x * w).array() + b;
    const Vector err = p.unaryExpr([](double z) { return sigmoid(z); }) - train.indicator;
    w -= lr * (x.transpose() * err) / n;
    b -= lr * err.sum() / n;
  }
  const Vector scores = (xt * w).array() + b;
  int correct = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    correct += (scores[i] > 0.0) == (test.indicator[i] > 0.5);
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

}  // namespace xdt
