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

#include "xdt/cli/commands.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "xdt/cli/config.h"
#include "xdt/data/csv.h"
#include "xdt/eval/experiments.h"

namespace xdt {

namespace {

namespace fs = std::filesystem;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> period;
  std::string stage = "both";
  int jobs = 1;
};

class CommandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Context {
  ExperimentConfig config;
  fs::path dir;
  Overrides flags;

  const RunConfig& run() const { return config.run; }
  fs::path data_file(int domain, int period) const {
    return dir / "data" / ("d" + std::to_string(domain) + "_p" + std::to_string(period) + ".csv");
  }
  fs::path source_file(int n, int period) const {
    return dir / "sources" / ("s" + std::to_string(n) + "_p" + std::to_string(period) + ".ckpt");
  }
  fs::path target_file(int period) const {
    return dir / "target" / ("p" + std::to_string(period) + ".ckpt");
  }
};

void require_file(const fs::path& path, const std::string& hint) {
  if (!fs::exists(path)) {
    throw CommandError("missing " + hint + " " + path.string());
  }
}

Context make_context(const Overrides& flags) {
  Context ctx;
  ctx.flags = flags;
  ctx.config = parse_config(flags.config_path);
  if (flags.seed) {
    ctx.config.run.seed = *flags.seed;
    ctx.config.run.data.seed = *flags.seed;
    ctx.config.seeds = {*flags.seed};
  }
  if (flags.out) {
    if (flags.out->empty()) throw ConfigError("--out: must be non-empty");
    ctx.config.output_dir = *flags.out;
  }
  if (flags.period && (*flags.period < 0 || *flags.period >= ctx.run().data.num_periods)) {
    throw ConfigError("--period: must be in [0, " +
                      std::to_string(ctx.run().data.num_periods) + "), got " +
                      std::to_string(*flags.period));
  }
  if (flags.jobs < 1) throw ConfigError("--jobs: must be >= 1");
  ctx.dir = fs::path(ctx.config.output_dir) / run_id(ctx.config, ctx.run().seed);
  fs::create_directories(ctx.dir);
  write_text((ctx.dir / "config.json").string(), config_to_json(ctx.config).dump(2) + "\n");
  return ctx;
}

DomainStreams load_streams(const Context& ctx) {
  const RunConfig& run = ctx.run();
  DomainStreams streams(run.data.num_domains);
  for (int d = 0; d < run.data.num_domains; ++d) {
    for (int t = 0; t < run.data.num_periods; ++t) {
      const fs::path path = ctx.data_file(d, t);
      require_file(path, "data file (run generate-data first)");
      streams[d].push_back(load_csv(path.string(), run.schema, run.data.target_domain()));
    }
  }
  return streams;
}

SourceHistory load_sources(const Context& ctx, int first_period) {
  const RunConfig& run = ctx.run();
  SourceHistory history;
  history.models.resize(run.data.num_periods);
  for (int t = first_period; t < run.data.num_periods; ++t) {
    for (int n = 0; n < run.data.num_sources(); ++n) {
      const fs::path path = ctx.source_file(n, t);
      require_file(path, "source checkpoint (run train-sources first)");
      history.models[t].push_back(load_backbone(path.string()));
    }
  }
  return history;
}

std::string losses_csv(const std::vector<PeriodLosses>& losses) {
  std::string out = "period,transfer,ce,adv1,adv2,mse,kl,step2_total\n";
  char buf[256];
  for (const auto& p : losses) {
    const LossRecord& m = p.mean;
    std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", p.period,
                  p.transfer ? 1 : 0, m.ce, m.adv1, m.adv2, m.mse, m.kl, m.step2_total);
    out += buf;
  }
  return out;
}

void cmd_generate_data(const Context& ctx) {
  const RunConfig& run = ctx.run();
  const SyntheticGenerator generator(run.data, run.schema);
  fs::create_directories(ctx.dir / "data");
  write_text((ctx.dir / "data" / "ground_truth.json").string(),
             generator.truth().to_json().dump() + "\n");
  for (int d = 0; d < run.data.num_domains; ++d) {
    for (int t = 0; t < run.data.num_periods; ++t) {
      write_csv(ctx.data_file(d, t).string(), generator.generate_period(d, t));
    }
  }
}

void cmd_train_sources(const Context& ctx) {
  const DomainStreams streams = load_streams(ctx);
  const SourceHistory history = train_all_sources(ctx.run(), streams);
  fs::create_directories(ctx.dir / "sources");
  for (int t = 0; t < ctx.run().data.num_periods; ++t) {
    for (int n = 0; n < ctx.run().data.num_sources(); ++n) {
      save_backbone(ctx.source_file(n, t).string(), history.models[t][n]);
    }
  }
}

void cmd_train_diit(const Context& ctx) {
  const RunConfig& run = ctx.run();
  const DomainStreams streams = load_streams(ctx);
  const int start = ctx.flags.period.value_or(0);
  const SourceHistory sources = load_sources(ctx, std::max(start, run.plug_period));
  std::optional<PeriodArtifacts> resume;
  if (start > 0) {
    const fs::path path = ctx.target_file(start - 1);
    require_file(path, "checkpoint");
    resume = load_artifacts(path.string());
  }
  fs::create_directories(ctx.dir / "target");
  const PeriodHook save = [&](int period, const TrainerState& state) {
    save_artifacts(ctx.target_file(period).string(), artifacts_of(state), period);
  };
  const RunResult result =
      run_target(run, streams, sources, save, resume ? &*resume : nullptr, start);
  const std::string suffix = start > 0 ? "_from_p" + std::to_string(start) : "";
  write_text((ctx.dir / ("train_losses" + suffix + ".csv")).string(),
             losses_csv(result.losses));
}

void cmd_evaluate(const Context& ctx) {
  const RunConfig& run = ctx.run();
  std::vector<int> periods;
  if (ctx.flags.period) {
    if (*ctx.flags.period + 1 >= run.data.num_periods) {
      throw ConfigError("--period: the last period has no next-period data");
    }
    periods = {*ctx.flags.period};
  } else {
    for (int t = 0; t + 1 < run.data.num_periods; ++t) periods.push_back(t);
  }
  for (int t : periods) require_file(ctx.target_file(t), "checkpoint");
  std::vector<MetricsRecord> records;
  for (int t : periods) {
    const fs::path next_path = ctx.data_file(run.data.target_domain(), t + 1);
    require_file(next_path, "data file (run generate-data first)");
    const PeriodDataset next =
        load_csv(next_path.string(), run.schema, run.data.target_domain());
    const PeriodArtifacts artifacts = load_artifacts(ctx.target_file(t).string());
    records.push_back(evaluate_target(artifacts.target, next, t, run.variant, run.seed));
  }
  const std::string name =
      ctx.flags.period ? "metrics_p" + std::to_string(*ctx.flags.period) + ".csv"
                       : "metrics.csv";
  write_metrics_csv((ctx.dir / name).string(), records);
}

void cmd_ablate(const Context& ctx) {
  std::vector<std::string> variants = ctx.config.ablation_variants;
  if (variants.empty()) variants = default_ablation_variants(ctx.run().data.num_sources());
  const AblationResult result =
      run_ablation(ctx.run(), variants, ctx.config.seeds, ctx.flags.jobs);
  write_metrics_csv((ctx.dir / "ablation_metrics.csv").string(), result.records);
  write_text((ctx.dir / "ablation_summary.csv").string(), summary_csv(result.summaries));
}

void cmd_sweep(const Context& ctx) {
  const auto rows = sweep(ctx.run(), ctx.config.sweep_parameter, ctx.config.sweep_grid,
                          ctx.config.seeds, ctx.flags.jobs);
  write_text((ctx.dir / ("sweep_" + ctx.config.sweep_parameter + ".csv")).string(),
             sweep_csv(rows));
}

void cmd_plug_study(const Context& ctx) {
  const auto records =
      plug_study(ctx.run(), ctx.config.plug_periods, ctx.config.seeds, ctx.flags.jobs);
  write_metrics_csv((ctx.dir / "plug_study.csv").string(), records);
}

void cmd_export_reprs(const Context& ctx) {
  const RunConfig& run = ctx.run();
  const int t = ctx.flags.period.value_or(run.data.num_periods - 1);
  if (t < run.plug_period) {
    throw ConfigError("--period: period " + std::to_string(t) +
                      " precedes plug_period " + std::to_string(run.plug_period));
  }
  std::vector<ReprStage> stages;
  if (ctx.flags.stage == "both") {
    stages = {ReprStage::kPreMapper, ReprStage::kPostMapper};
  } else {
    try {
      stages = {parse_repr_stage(ctx.flags.stage)};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--stage: ") + e.what());
    }
  }
  const fs::path ckpt = ctx.target_file(t);
  require_file(ckpt, "checkpoint");
  const PeriodArtifacts artifacts = load_artifacts(ckpt.string());
  if (!artifacts.transfer) throw CommandError(ckpt.string() + " holds no transfer modules");

  TrainerState state;
  state.target = artifacts.target;
  state.transfer = artifacts.transfer;
  state.period = t;
  const auto active = run.active_sources();
  std::vector<PeriodDataset> source_data;
  for (int n : active) {
    const fs::path path = ctx.source_file(n, t);
    require_file(path, "source checkpoint (run train-sources first)");
    state.sources.push_back(load_backbone(path.string()));
    require_file(ctx.data_file(n, t), "data file (run generate-data first)");
    source_data.push_back(
        load_csv(ctx.data_file(n, t).string(), run.schema, run.data.target_domain()));
  }
  const int target = run.data.target_domain();
  require_file(ctx.data_file(target, t), "data file (run generate-data first)");
  const PeriodDataset target_data =
      load_csv(ctx.data_file(target, t).string(), run.schema, target);
  std::vector<const PeriodDataset*> pointers;
  for (const auto& d : source_data) pointers.push_back(&d);
  const PeriodDataset mixed = build_mixed(pointers, target_data, run.seed);
  const Batch batch = make_batch(mixed);
  for (ReprStage stage : stages) {
    const std::string name = std::string(stage == ReprStage::kPreMapper ? "reprs_pre" : "reprs_post") +
                             "_p" + std::to_string(t) + ".csv";
    write_text((ctx.dir / name).string(),
               representations_csv(export_representations(state, batch, stage, run.transfer)));
  }
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-domain incremental CTR transfer laboratory", "xdt"};
  app.require_subcommand(1, 1);
  Overrides flags;

  struct Command {
    const char* name;
    const char* help;
    void (*fn)(const Context&);
  };
  const Command commands[] = {
      {"generate-data", "Write the synthetic per-domain period streams as CSV",
       cmd_generate_data},
      {"train-sources", "Train every source model incrementally over all periods",
       cmd_train_sources},
      {"train-diit", "Train the target model over all periods, with transfer from plug_period",
       cmd_train_diit},
      {"evaluate", "Evaluate saved target checkpoints on next-period target data", cmd_evaluate},
      {"ablate", "Run the ablation variants over all seeds", cmd_ablate},
      {"sweep", "Sweep one loss hyper-parameter over a grid", cmd_sweep},
      {"plug-study", "Compare the base run with transfer plugged at later periods",
       cmd_plug_study},
      {"export-reprs", "Export pre- and post-mapper representations of a mixed batch",
       cmd_export_reprs},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("config", flags.config_path, "Experiment config (JSON)")->required();
    sub->add_option("--seed", flags.seed, "Override the run seed (and the seed list)");
    sub->add_option("--out", flags.out, "Override the output directory");
    sub->add_option("--period", flags.period, "Period to resume from / evaluate / export");
    sub->add_option("--jobs", flags.jobs, "Worker threads for multi-seed commands");
    if (std::string(c.name) == "export-reprs") {
      sub->add_option("--stage", flags.stage, "pre-mapper, post-mapper or both");
    }
    subs.emplace_back(sub, &c);
  }

  if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
    const bool known = std::any_of(std::begin(commands), std::end(commands),
                                   [&](const Command& c) { return args[0] == c.name; });
    if (!known) {
      err << "error: usage: unknown subcommand '" << one_line(args[0]) << "'\n";
      return 2;
    }
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return 2;
  }

  std::string name = "xdt";
  try {
    for (const auto& [sub, command] : subs) {
      if (!sub->parsed()) continue;
      name = command->name;
      const Context ctx = make_context(flags);
      command->fn(ctx);
      out << "ok " << name << " " << ctx.dir.string() << "\n";
      return 0;
    }
    err << "error: usage: no subcommand\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << name << ": config: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << name << ": " << one_line(e.what()) << "\n";
    return 1;
  }
}

}  // namespace xdt
