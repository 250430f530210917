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

#include "xdt/eval/metrics.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "xdt/nn/losses.h"

namespace xdt {

double auc(const Vector& scores, const Vector& labels) {
  if (scores.size() != labels.size()) {
    throw DimensionError("auc: " + std::to_string(scores.size()) + " scores vs " +
                         std::to_string(labels.size()) + " labels");
  }
  const Eigen::Index n = scores.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });
  double positives = 0.0;
  double rank_sum = 0.0;
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j share their mean.
    const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (Eigen::Index k = i; k < j; ++k) {
      if (labels[order[k]] == 1.0) {
        positives += 1.0;
        rank_sum += mean_rank;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw std::invalid_argument("auc: undefined with a single class");
  }
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double logloss(const Vector& predictions, const Vector& labels) {
  return binary_cross_entropy(predictions, labels);
}

std::string metrics_csv(const std::vector<MetricsRecord>& records) {
  std::string out = "period,variant,seed,auc,logloss\n";
  char buf[128];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), ",%llu,%.6f,%.6f\n",
                  static_cast<unsigned long long>(r.seed), r.auc, r.logloss);
    out += std::to_string(r.period) + "," + r.variant + buf;
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRecord>& records) {
  write_text(path, metrics_csv(records));
}

std::vector<MetricsRecord> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": file not found");
  std::string line;
  if (!std::getline(in, line) || line != "period,variant,seed,auc,logloss") {
    throw ParseError(path + ":1: unexpected metrics header");
  }
  std::vector<MetricsRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string period, variant, seed, auc_cell, loss_cell;
    if (!std::getline(row, period, ',') || !std::getline(row, variant, ',') ||
        !std::getline(row, seed, ',') || !std::getline(row, auc_cell, ',') ||
        !std::getline(row, loss_cell)) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 5 columns");
    }
    try {
      records.push_back({std::stoi(period), variant, std::stoull(seed),
                         std::stod(auc_cell), std::stod(loss_cell)});
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": malformed row");
    }
  }
  return records;
}

}  // namespace xdt
