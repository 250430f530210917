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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "xdt/data/csv.h"
#include "xdt/data/dataset.h"
#include "xdt/data/generator.h"
#include "xdt/eval/metrics.h"
#include "xdt/nn/errors.h"
#include "test_util.h"

namespace xdt {
namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("xdt_" + name)).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

TEST(Generator, SameConfigIsBitIdentical) {
  GenConfig c;
  c.samples_per_domain = 300;
  const auto a = generate_period(c, FeatureSchema::standard(), 1, 4);
  const auto b = generate_period(c, FeatureSchema::standard(), 1, 4);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 300u);
  const SyntheticGenerator gen(c, FeatureSchema::standard());
  EXPECT_EQ(gen.generate_period(1, 4), a);
  EXPECT_NE(gen.generate_period(1, 5).samples, a.samples);
}

TEST(Generator, SamplesSatisfyInvariants) {
  GenConfig c;
  c.samples_per_domain = 500;
  c.target_samples = 120;
  const FeatureSchema schema = FeatureSchema::standard();
  const SyntheticGenerator gen(c, schema);
  for (int d = 0; d < c.num_domains; ++d) {
    const PeriodDataset data = gen.generate_period(d, 2);
    EXPECT_EQ(static_cast<int>(data.size()), c.samples_for(d));
    for (const Sample& s : data.samples) {
      EXPECT_TRUE(s.label == 0 || s.label == 1);
      EXPECT_EQ(s.indicator, d == c.target_domain() ? 1 : 0);
      EXPECT_EQ(s.domain_id, d);
      EXPECT_EQ(s.period, 2);
      for (int f = 0; f < schema.num_categorical(); ++f) {
        EXPECT_GE(s.categorical[f], 0);
        EXPECT_LT(s.categorical[f], schema.categorical[f].cardinality);
      }
    }
  }
  EXPECT_LT(c.target_samples, c.samples_per_domain);
}

TEST(Generator, InvalidIdsThrow) {
  const SyntheticGenerator gen(GenConfig{}, FeatureSchema::standard());
  EXPECT_THROW(gen.generate_period(3, 0), std::out_of_range);
  EXPECT_THROW(gen.generate_period(0, 8), std::out_of_range);
  EXPECT_THROW(gen.generate_period(-1, 0), std::out_of_range);
  GenConfig bad;
  bad.drift = -1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = GenConfig{};
  bad.num_domains = 1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

std::vector<double> domain_ctrs(const GenConfig& c, int period) {
  const SyntheticGenerator gen(c, FeatureSchema::standard());
  std::vector<double> ctr;
  for (int d = 0; d < c.num_domains; ++d) ctr.push_back(click_rate(gen.generate_period(d, period)));
  return ctr;
}

double max_gap(const std::vector<double>& ctr) {
  return *std::max_element(ctr.begin(), ctr.end()) - *std::min_element(ctr.begin(), ctr.end());
}

TEST(Generator, NoSpecificSignalMeansNoCtrGap) {
  GenConfig c;
  c.specific_strength = 0.0;
  c.drift = 0.0;
  c.samples_per_domain = 50000;
  c.target_samples = 50000;
  EXPECT_LT(max_gap(domain_ctrs(c, 0)), 0.02);
}

TEST(Generator, CtrGapGrowsWithSpecificStrength) {
  std::vector<double> gaps;
  for (double strength : {0.0, 0.75, 2.0}) {
    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GenConfig c;
      c.seed = seed;
      c.specific_strength = strength;
      c.drift = 0.0;
      c.samples_per_domain = 20000;
      c.target_samples = 20000;
      acc += max_gap(domain_ctrs(c, 0));
    }
    gaps.push_back(acc / 5);
  }
  EXPECT_LT(gaps[0], gaps[1]);
  EXPECT_LT(gaps[1], gaps[2]);
}

TEST(Generator, NoSignalGivesCoinFlipLabelsAndChanceAuc) {
  RunConfig c = testing::tiny_config(3);
  c.data.invariant_strength = 0.0;
  c.data.specific_strength = 0.0;
  c.data.drift = 0.0;
  c.data.samples_per_domain = 4000;
  c.data.num_periods = 2;
  const SyntheticGenerator gen(c.data, c.schema);
  const PeriodDataset train = gen.generate_period(0, 0);
  const PeriodDataset test = gen.generate_period(0, 1);
  EXPECT_NEAR(click_rate(train), 0.5, 0.03);
  Backbone model = build_backbone(BackboneKind::kDnn, c.schema, {8, 6}, 1);
  AdamState opt = AdamState::like(model.params(), 1e-2);
  HyperParams h;
  h.batch_size = 64;
  h.epochs_per_period = 3;
  fine_tune(model, opt, train, h, 5);
  const Batch b = make_batch(test);
  EXPECT_NEAR(auc(predict(model, b), b.label), 0.5, 0.03);
}

double spearman(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return y[a] < y[b]; });
  std::vector<double> rank(n);
  for (int r = 0; r < n; ++r) rank[order[r]] = r;
  double d2 = 0.0;
  for (int i = 0; i < n; ++i) d2 += (rank[i] - i) * (rank[i] - i);
  return 1.0 - 6.0 * d2 / (n * (static_cast<double>(n) * n - 1));
}

TEST(Generator, DriftDegradesAStaleModel) {
  std::vector<double> mean_auc(8, 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GenConfig c;
    c.seed = seed;
    c.drift = 0.3;
    c.samples_per_domain = 6000;
    const FeatureSchema schema = FeatureSchema::standard();
    const SyntheticGenerator gen(c, schema);
    PeriodDataset first = gen.generate_period(0, 0);
    PeriodDataset holdout = first;
    holdout.samples.assign(first.samples.begin() + 4000, first.samples.end());
    first.samples.resize(4000);
    Backbone model = build_backbone(BackboneKind::kDnn, schema, {64, 32}, seed);
    AdamState opt = AdamState::like(model.params(), 1e-3);
    HyperParams h;
    h.epochs_per_period = 3;
    fine_tune(model, opt, first, h, seed);
    for (int k = 0; k < 8; ++k) {
      const Batch b = make_batch(k == 0 ? holdout : gen.generate_period(0, k));
      mean_auc[k] += auc(predict(model, b), b.label) / 5;
    }
  }
  EXPECT_LT(spearman(mean_auc), 0.0);
}

PeriodDataset cell(int domain, int n, int indicator) {
  PeriodDataset d;
  d.domain_id = domain;
  d.schema = FeatureSchema::standard();
  for (int i = 0; i < n; ++i) {
    Sample s;
    s.categorical = {i % 1000, 0, 0, 0};
    s.dense = {static_cast<double>(i), 0.0};
    s.domain_id = domain;
    s.indicator = indicator;
    d.samples.push_back(s);
  }
  return d;
}

TEST(BuildMixed, HalfSourceHalfTarget) {
  const PeriodDataset s0 = cell(0, 300, 0), s1 = cell(1, 300, 0), t = cell(2, 100, 1);
  const PeriodDataset* sources[] = {&s0, &s1};
  const PeriodDataset mixed = build_mixed(sources, t, 1);
  EXPECT_EQ(mixed.size(), 100u);
  const int target_rows = std::count_if(mixed.samples.begin(), mixed.samples.end(),
                                        [](const Sample& s) { return s.indicator == 1; });
  EXPECT_EQ(target_rows, 50);
  EXPECT_EQ(mixed.domain_id, kMixedDomain);

  const PeriodDataset odd = cell(2, 101, 1);
  const PeriodDataset m2 = build_mixed(sources, odd, 1);
  EXPECT_EQ(m2.size(), 101u);
  const int d1 = std::count_if(m2.samples.begin(), m2.samples.end(),
                               [](const Sample& s) { return s.indicator == 1; });
  EXPECT_EQ(d1, 50);
  EXPECT_EQ(build_mixed(sources, t, 1), mixed);
}

TEST(BuildMixed, SingleSourceSuppliesEverySourceRow) {
  const PeriodDataset s0 = cell(0, 30, 0), t = cell(2, 40, 1);
  const PeriodDataset* sources[] = {&s0};
  for (const Sample& s : build_mixed(sources, t, 4).samples) {
    EXPECT_TRUE(s.domain_id == 0 || s.domain_id == 2);
    EXPECT_EQ(s.indicator, s.domain_id == 2 ? 1 : 0);
  }
}

TEST(BuildMixed, SourceCountsAreUniformWithinThreeSigma) {
  const PeriodDataset s0 = cell(0, 500, 0), s1 = cell(1, 500, 0), t = cell(2, 1000, 1);
  const PeriodDataset* sources[] = {&s0, &s1};
  const double n = 500, sigma = std::sqrt(n * 0.25);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const PeriodDataset mixed = build_mixed(sources, t, seed);
    const int from0 = std::count_if(mixed.samples.begin(), mixed.samples.end(),
                                    [](const Sample& s) { return s.domain_id == 0; });
    EXPECT_LE(std::abs(from0 - n / 2), 3 * sigma) << "seed " << seed;
  }
}

TEST(BuildMixed, ErrorsOnEmptyInputs) {
  const PeriodDataset s0 = cell(0, 10, 0), empty_target = cell(2, 0, 1), t = cell(2, 10, 1);
  const PeriodDataset empty_source = cell(0, 0, 0);
  const PeriodDataset* sources[] = {&s0};
  const PeriodDataset* no_data[] = {&empty_source};
  EXPECT_THROW(build_mixed(sources, empty_target, 1), std::invalid_argument);
  EXPECT_THROW(build_mixed(no_data, t, 1), std::invalid_argument);
}

const char* kHeader = "c0,c1,c2,c3,x0,x1,y,domain,period\n";

TEST(Csv, WellFormedFileLoads) {
  const std::string path = temp_path("three_rows.csv");
  write_file(path, std::string(kHeader) +
                       "1,2,3,4,0.5,-1,1,2,0\n"
                       "0,0,0,0,0,0,0,2,0\n"
                       "999,499,99,9,1e-3,2.5,1,2,0\n");
  const PeriodDataset d = load_csv(path, FeatureSchema::standard(), 2);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.samples[2].categorical[0], 999);
  EXPECT_EQ(d.samples[0].indicator, 1);
  EXPECT_DOUBLE_EQ(d.samples[2].dense[0], 1e-3);
  std::filesystem::remove(path);
}

void expect_parse_error(const std::string& body, const std::string& needle) {
  const std::string path = temp_path("bad.csv");
  write_file(path, body);
  try {
    load_csv(path, FeatureSchema::standard(), 2);
    ADD_FAILURE() << "expected ParseError for " << body;
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
  std::filesystem::remove(path);
}

TEST(Csv, MalformedRowsCiteLineNumbers) {
  expect_parse_error(std::string(kHeader) + "1,2,3,4,0.5,-1,2,2,0\n", "line 2");
  expect_parse_error(std::string(kHeader) + "1,2,3,4,0,0,0,2,0\n1.5,2,3,4,0,0,0,2,0\n",
                     "line 3");
  expect_parse_error(std::string(kHeader) + "1000,2,3,4,0,0,0,2,0\n", "line 2");
  expect_parse_error("c0,c1,c2,x0,x1,y,domain,period\n", "c3");
  expect_parse_error(std::string(kHeader) + "1,2,3,4,0,0\n", "line 2");
}

TEST(Csv, MissingFileThrows) {
  EXPECT_THROW(load_csv(temp_path("nope.csv"), FeatureSchema::standard(), 2), ParseError);
}

TEST(Csv, RoundTripIsIdentity) {
  GenConfig c;
  c.samples_per_domain = 200;
  for (int d : {0, 2}) {
    const PeriodDataset data = generate_period(c, FeatureSchema::standard(), d, 3);
    const std::string path = temp_path("roundtrip.csv");
    write_csv(path, data);
    EXPECT_EQ(load_csv(path, FeatureSchema::standard(), c.target_domain()), data);
    std::filesystem::remove(path);
  }
}

}  // namespace
}  // namespace xdt
