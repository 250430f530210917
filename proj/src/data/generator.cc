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

#include "xdt/data/generator.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "xdt/nn/activations.h"
#include "xdt/nn/random.h"

namespace xdt {

void GenConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (num_domains < 2) fail("data: num_domains must be >= 2 (at least one source)");
  if (num_periods < 1) fail("data: num_periods must be >= 1");
  if (samples_per_domain < 1) fail("data: samples_per_domain must be >= 1");
  if (target_samples < 1) fail("data: target_samples must be >= 1");
  if (!(invariant_strength >= 0)) fail("data: invariant_strength must be >= 0");
  if (!(specific_strength >= 0)) fail("data: specific_strength must be >= 0");
  if (!(drift >= 0)) fail("data: drift must be >= 0");
}

nlohmann::json GroundTruth::to_json() const {
  auto vec = [](const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  nlohmann::json j;
  j["invariant_weight"] = vec(invariant_weight);
  j["drift_weight"] = vec(drift_weight);
  j["domain_weight"] = nlohmann::json::array();
  for (const auto& w : domain_weight) j["domain_weight"].push_back(vec(w));
  j["dense_shift"] = nlohmann::json::array();
  for (const auto& m : dense_shift) j["dense_shift"].push_back(vec(m));
  j["tables"] = nlohmann::json::array();
  for (const auto& t : tables) {
    j["tables"].push_back(
        std::vector<double>(t.data(), t.data() + t.size()));
  }
  return j;
}

namespace {

GroundTruth make_truth(const GenConfig& config, const FeatureSchema& schema) {
  auto rng = make_rng({config.seed, tag(Stream::kGroundTruth)});
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Eigen::Index n, double scale) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * normal(rng);
    return v;
  };
  GroundTruth truth;
  for (const auto& field : schema.categorical) {
    Matrix t(field.cardinality, GroundTruth::kTruthDim);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = normal(rng);
    truth.tables.push_back(std::move(t));
  }
  const int width = schema.num_categorical() * GroundTruth::kTruthDim +
                    schema.num_dense() + 1;
  const double scale = 1.0 / std::sqrt(static_cast<double>(width));
  truth.invariant_weight = draw(width, scale);
  for (int d = 0; d < config.num_domains; ++d) {
    truth.domain_weight.push_back(draw(width, scale));
  }
  truth.drift_weight = draw(width, scale);
  for (int d = 0; d < config.num_domains; ++d) {
    truth.dense_shift.push_back(draw(schema.num_dense(), 1.0));
  }
  return truth;
}

}  // namespace

SyntheticGenerator::SyntheticGenerator(GenConfig config, FeatureSchema schema)
    : config_(config), schema_(std::move(schema)) {
  config_.validate();
  schema_.validate();
  truth_ = make_truth(config_, schema_);
}

double SyntheticGenerator::logit(const Sample& sample) const {
  const int k = GroundTruth::kTruthDim;
  Vector phi(truth_.phi_width());
  for (int f = 0; f < schema_.num_categorical(); ++f) {
    phi.segment(f * k, k) = truth_.tables[f].row(sample.categorical[f]).transpose();
  }
  const int offset = schema_.num_categorical() * k;
  for (int f = 0; f < schema_.num_dense(); ++f) phi[offset + f] = sample.dense[f];
  phi[phi.size() - 1] = 1.0;
  return config_.invariant_strength * truth_.invariant_weight.dot(phi) +
         config_.specific_strength *
             truth_.domain_weight[sample.domain_id].dot(phi) +
         config_.drift * sample.period * truth_.drift_weight.dot(phi);
}

PeriodDataset SyntheticGenerator::generate_period(int domain, int period) const {
  if (domain < 0 || domain >= config_.num_domains) {
    throw std::out_of_range("generate_period: domain " + std::to_string(domain) +
                            " outside [0, " + std::to_string(config_.num_domains) +
                            ")");
  }
  if (period < 0 || period >= config_.num_periods) {
    throw std::out_of_range("generate_period: period " + std::to_string(period) +
                            " outside [0, " + std::to_string(config_.num_periods) +
                            ")");
  }
  auto rng = make_rng({config_.seed, tag(Stream::kSamples),
                       static_cast<std::uint64_t>(domain),
                       static_cast<std::uint64_t>(period)});
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  PeriodDataset data;
  data.domain_id = domain;
  data.period = period;
  data.schema = schema_;
  const int n = config_.samples_for(domain);
  const int indicator = domain == config_.target_domain() ? 1 : 0;
  data.samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    Sample s;
    s.domain_id = domain;
    s.period = period;
    s.indicator = indicator;
    for (const auto& field : schema_.categorical) {
      // Popularity skew: low indices are drawn far more often.
      const double u = uniform(rng);
      const int idx = static_cast<int>(u * u * field.cardinality);
      s.categorical.push_back(std::min(idx, field.cardinality - 1));
    }
    for (int f = 0; f < schema_.num_dense(); ++f) {
      s.dense.push_back(config_.specific_strength * truth_.dense_shift[domain][f] +
                        normal(rng));
    }
    const double p = sigmoid(logit(s));
    s.label = uniform(rng) < p ? 1 : 0;
    data.samples.push_back(std::move(s));
  }
  return data;
}

PeriodDataset generate_period(const GenConfig& config,
                              const FeatureSchema& schema, int domain,
                              int period) {
  return SyntheticGenerator(config, schema).generate_period(domain, period);
}

DomainStreams generate_all(const SyntheticGenerator& generator) {
  const auto& config = generator.config();
  DomainStreams streams(config.num_domains);
  for (int d = 0; d < config.num_domains; ++d) {
    for (int t = 0; t < config.num_periods; ++t) {
      streams[d].push_back(generator.generate_period(d, t));
    }
  }
  return streams;
}

}  // namespace xdt
