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

#include "xdt/cli/config.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "xdt/model/checkpoint.h"

namespace xdt {

namespace {

using nlohmann::json;

std::string show(const json& v) { return v.dump(); }

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "config" : path_, "must be an object");
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[noreturn]] static void fail(const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void read_int(const std::string& key, int& out, long long lo, long long hi) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key_path(key), "expected an integer, got " + show(*v));
      const long long x = v->get<long long>();
      if (x < lo || x > hi) {
        fail(key_path(key), "must be in [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "], got " + show(*v));
      }
      out = static_cast<int>(x);
    }
  }

  void read_seed(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) out = as_seed(*v, key_path(key));
  }

  static std::uint64_t as_seed(const json& v, const std::string& path) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<long long>() < 0)) {
      fail(path, "expected a non-negative integer, got " + show(v));
    }
    return v.get<std::uint64_t>();
  }

  void read_double(const std::string& key, double& out, double lo, bool lo_open) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key_path(key), "expected a number, got " + show(*v));
      const double x = v->get<double>();
      if (!std::isfinite(x) || x < lo || (lo_open && x == lo)) {
        fail(key_path(key), std::string("must be ") + (lo_open ? "> " : ">= ") +
                                show(lo) + ", got " + show(*v));
      }
      out = x;
    }
  }

  void read_bool(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key_path(key), "expected a boolean, got " + show(*v));
      out = v->get<bool>();
    }
  }

  void read_string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key_path(key), "expected a string, got " + show(*v));
      out = v->get<std::string>();
    }
  }

  void read_int_list(const std::string& key, std::vector<int>& out, int lo,
                     bool allow_empty) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key_path(key), "expected an array, got " + show(*v));
      if (!allow_empty && v->empty()) fail(key_path(key), "must be non-empty");
      std::vector<int> values;
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& e = (*v)[i];
        const std::string p = key_path(key) + "[" + std::to_string(i) + "]";
        if (!e.is_number_integer()) fail(p, "expected an integer, got " + show(e));
        if (e.get<long long>() < lo || e.get<long long>() > (1LL << 30)) {
          fail(p, "must be >= " + std::to_string(lo) + ", got " + show(e));
        }
        values.push_back(e.get<int>());
      }
      out = values;
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(key_path(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

BackboneKind read_kind(ObjectReader& r, const std::string& key, BackboneKind fallback) {
  std::string name = backbone_kind_name(fallback);
  r.read_string(key, name);
  try {
    return parse_backbone_kind(name);
  } catch (const std::invalid_argument&) {
    ObjectReader::fail(r.key_path(key),
                       "expected one of \"dnn\", \"dcn\", \"wd\", got \"" + name + "\"");
  }
}

FeatureSchema read_schema(const json& j) {
  ObjectReader r(j, "schema");
  FeatureSchema schema = FeatureSchema::standard();
  if (const json* cats = r.find("categorical")) {
    if (!cats->is_array() || cats->empty()) {
      ObjectReader::fail("schema.categorical", "expected a non-empty array");
    }
    schema.categorical.clear();
    for (std::size_t i = 0; i < cats->size(); ++i) {
      ObjectReader f((*cats)[i], "schema.categorical[" + std::to_string(i) + "]");
      CategoricalField field;
      f.read_string("name", field.name);
      f.read_int("cardinality", field.cardinality, 1, 1 << 24);
      if (field.name.empty()) ObjectReader::fail(f.key_path("name"), "must be non-empty");
      f.finish();
      schema.categorical.push_back(field);
    }
  }
  if (const json* dense = r.find("dense")) {
    if (!dense->is_array()) ObjectReader::fail("schema.dense", "expected an array");
    schema.dense.clear();
    for (const auto& name : *dense) {
      if (!name.is_string()) {
        ObjectReader::fail("schema.dense", "expected strings, got " + show(name));
      }
      schema.dense.push_back(name.get<std::string>());
    }
  }
  r.read_int("embedding_dim", schema.embedding_dim, 1, 4096);
  r.finish();
  try {
    schema.validate();
  } catch (const std::invalid_argument& e) {
    ObjectReader::fail("schema", e.what());
  }
  return schema;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  RunConfig& run = c.run;
  ObjectReader top(j, "");

  if (const json* d = top.find("data")) {
    ObjectReader r(*d, "data");
    r.read_int("num_domains", run.data.num_domains, 2, 64);
    r.read_int("num_periods", run.data.num_periods, 1, 10000);
    r.read_int("samples_per_domain", run.data.samples_per_domain, 1, 1 << 28);
    r.read_int("target_samples", run.data.target_samples, 1, 1 << 28);
    r.read_double("invariant_strength", run.data.invariant_strength, 0.0, false);
    r.read_double("specific_strength", run.data.specific_strength, 0.0, false);
    r.read_double("drift", run.data.drift, 0.0, false);
    r.finish();
  }
  if (const json* s = top.find("schema")) run.schema = read_schema(*s);
  if (const json* m = top.find("model")) {
    ObjectReader r(*m, "model");
    run.target_model.kind = read_kind(r, "kind", run.target_model.kind);
    r.read_int_list("trunk_widths", run.target_model.trunk_widths, 1, false);
    run.source_model.kind = read_kind(r, "source_kind", run.target_model.kind);
    run.source_model.trunk_widths = run.target_model.trunk_widths;
    r.read_int_list("source_trunk_widths", run.source_model.trunk_widths, 1, false);
    r.finish();
  }
  if (const json* t = top.find("transfer")) {
    ObjectReader r(*t, "transfer");
    r.read_int("gate_hidden", run.transfer.gate_hidden, 1, 1 << 16);
    r.read_int("dis_hidden", run.transfer.dis_hidden, 1, 1 << 16);
    r.read_bool("use_gating", run.transfer.use_gating);
    r.read_bool("adversarial", run.transfer.adversarial);
    r.read_bool("target_rows_from_target_model", run.transfer.target_rows_from_target_model);
    r.read_int_list("source_subset", run.source_subset, 0, true);
    r.finish();
  }
  if (const json* h = top.find("hyper")) {
    ObjectReader r(*h, "hyper");
    r.read_double("lambda", run.hyper.lambda, 0.0, false);
    r.read_double("alpha", run.hyper.alpha, 0.0, false);
    r.read_double("beta1", run.hyper.beta1, 0.0, false);
    r.read_double("beta2", run.hyper.beta2, 0.0, false);
    r.read_double("tau", run.hyper.tau, 0.0, true);
    r.read_double("lr", run.hyper.lr, 0.0, true);
    r.read_int("batch_size", run.hyper.batch_size, 1, 1 << 24);
    r.read_int("epochs_per_period", run.hyper.epochs_per_period, 1, 100000);
    r.read_int("num_spots", run.hyper.num_spots, 0, 64);
    r.finish();
  }
  top.read_int("plug_period", run.plug_period, 0, 1 << 30);
  top.read_string("variant", run.variant);
  top.read_seed("seed", run.seed);
  if (const json* s = top.find("seeds")) {
    if (!s->is_array() || s->empty()) ObjectReader::fail("seeds", "expected a non-empty array");
    c.seeds.clear();
    for (std::size_t i = 0; i < s->size(); ++i) {
      c.seeds.push_back(ObjectReader::as_seed((*s)[i], "seeds[" + std::to_string(i) + "]"));
    }
  }
  top.read_string("output_dir", c.output_dir);
  if (c.output_dir.empty()) ObjectReader::fail("output_dir", "must be non-empty");
  if (const json* a = top.find("ablation")) {
    ObjectReader r(*a, "ablation");
    if (const json* v = r.find("variants")) {
      if (!v->is_array()) ObjectReader::fail("ablation.variants", "expected an array");
      c.ablation_variants.clear();
      for (const auto& name : *v) {
        if (!name.is_string()) {
          ObjectReader::fail("ablation.variants", "expected strings, got " + show(name));
        }
        c.ablation_variants.push_back(name.get<std::string>());
      }
    }
    r.finish();
  }
  if (const json* s = top.find("sweep")) {
    ObjectReader r(*s, "sweep");
    r.read_string("parameter", c.sweep_parameter);
    if (const json* g = r.find("grid")) {
      if (!g->is_array() || g->empty()) {
        ObjectReader::fail("sweep.grid", "expected a non-empty array");
      }
      c.sweep_grid.clear();
      for (const auto& v : *g) {
        if (!v.is_number()) ObjectReader::fail("sweep.grid", "expected numbers, got " + show(v));
        c.sweep_grid.push_back(v.get<double>());
      }
    }
    r.finish();
  }
  if (const json* p = top.find("plug_study")) {
    ObjectReader r(*p, "plug_study");
    r.read_int_list("periods", c.plug_periods, 0, false);
    r.finish();
  }
  top.finish();

  // Cross-field checks, reported against the key that has to change.
  if (run.hyper.num_spots >
      static_cast<int>(std::min(run.target_model.trunk_widths.size(),
                                run.source_model.trunk_widths.size()))) {
    ObjectReader::fail("hyper.num_spots", "exceeds the trunk depth, got " +
                                              std::to_string(run.hyper.num_spots));
  }
  for (std::size_t i = 0; i < run.source_subset.size(); ++i) {
    if (run.source_subset[i] >= run.data.num_sources()) {
      ObjectReader::fail("transfer.source_subset[" + std::to_string(i) + "]",
                         "must be < " + std::to_string(run.data.num_sources()) + ", got " +
                             std::to_string(run.source_subset[i]));
    }
  }
  if (run.transfer.target_rows_from_target_model &&
      run.target_model.trunk_widths.back() != run.source_model.trunk_widths.back()) {
    ObjectReader::fail("transfer.target_rows_from_target_model",
                       "needs equal target and source representation widths");
  }
  if (c.sweep_parameter != "tau" && c.sweep_parameter != "alpha" &&
      c.sweep_parameter != "beta1" && c.sweep_parameter != "beta2") {
    ObjectReader::fail("sweep.parameter", "expected one of tau, alpha, beta1, beta2, got \"" +
                                              c.sweep_parameter + "\"");
  }
  for (double v : c.sweep_grid) {
    const bool ok = c.sweep_parameter == "tau" ? v > 0 : v >= 0;
    if (!ok || !std::isfinite(v)) {
      ObjectReader::fail("sweep.grid", "value " + show(v) + " invalid for " + c.sweep_parameter);
    }
  }
  for (int p : c.plug_periods) {
    if (p >= run.data.num_periods) {
      ObjectReader::fail("plug_study.periods", "period " + std::to_string(p) +
                                                   " outside [0, " +
                                                   std::to_string(run.data.num_periods) + ")");
    }
  }
  run.data.seed = run.seed;
  try {
    run.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": malformed JSON: " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  const RunConfig& run = c.run;
  json j;
  j["data"] = {{"num_domains", run.data.num_domains},
               {"num_periods", run.data.num_periods},
               {"samples_per_domain", run.data.samples_per_domain},
               {"target_samples", run.data.target_samples},
               {"invariant_strength", run.data.invariant_strength},
               {"specific_strength", run.data.specific_strength},
               {"drift", run.data.drift}};
  j["schema"] = schema_to_json(run.schema);
  j["model"] = {{"kind", backbone_kind_name(run.target_model.kind)},
                {"trunk_widths", run.target_model.trunk_widths},
                {"source_kind", backbone_kind_name(run.source_model.kind)},
                {"source_trunk_widths", run.source_model.trunk_widths}};
  j["transfer"] = {{"gate_hidden", run.transfer.gate_hidden},
                   {"dis_hidden", run.transfer.dis_hidden},
                   {"use_gating", run.transfer.use_gating},
                   {"adversarial", run.transfer.adversarial},
                   {"target_rows_from_target_model",
                    run.transfer.target_rows_from_target_model},
                   {"source_subset", run.source_subset}};
  j["hyper"] = {{"lambda", run.hyper.lambda},
                {"alpha", run.hyper.alpha},
                {"beta1", run.hyper.beta1},
                {"beta2", run.hyper.beta2},
                {"tau", run.hyper.tau},
                {"lr", run.hyper.lr},
                {"batch_size", run.hyper.batch_size},
                {"epochs_per_period", run.hyper.epochs_per_period},
                {"num_spots", run.hyper.num_spots}};
  j["plug_period"] = run.plug_period;
  j["variant"] = run.variant;
  j["seed"] = run.seed;
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir;
  j["ablation"] = {{"variants", c.ablation_variants}};
  j["sweep"] = {{"parameter", c.sweep_parameter}, {"grid", c.sweep_grid}};
  j["plug_study"] = {{"periods", c.plug_periods}};
  return j;
}

std::string run_id(const ExperimentConfig& config, std::uint64_t seed) {
  json j = config_to_json(config);
  j.erase("output_dir");
  const std::string text = j.dump() + "#seed=" + std::to_string(seed);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace xdt
