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

#include "xdt/data/csv.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xdt/nn/errors.h"

namespace xdt {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> header_for(const FeatureSchema& schema) {
  std::vector<std::string> names;
  for (const auto& field : schema.categorical) names.push_back(field.name);
  for (const auto& name : schema.dense) names.push_back(name);
  names.insert(names.end(), {"y", "domain", "period"});
  return names;
}

[[noreturn]] void fail(const std::string& path, std::size_t line,
                       const std::string& what) {
  throw ParseError(path + ": line " + std::to_string(line) + ": " + what);
}

long parse_int(const std::string& cell, const std::string& path, std::size_t line,
               const std::string& column) {
  long value = 0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc() || ptr != end || cell.empty()) {
    fail(path, line, "column '" + column + "': '" + cell + "' is not an integer");
  }
  return value;
}

double parse_double(const std::string& cell, const std::string& path,
                    std::size_t line, const std::string& column) {
  try {
    std::size_t used = 0;
    const double value = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return value;
  } catch (const std::exception&) {
    fail(path, line, "column '" + column + "': '" + cell + "' is not a number");
  }
}

}  // namespace

void write_csv(const std::string& path, const PeriodDataset& data) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParseError(path + ": cannot open for writing");
  const auto header = header_for(data.schema);
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << (i ? "," : "") << header[i];
  }
  out << '\n';
  char buf[32];
  for (const Sample& s : data.samples) {
    for (std::size_t f = 0; f < s.categorical.size(); ++f) {
      out << s.categorical[f] << ',';
    }
    for (double v : s.dense) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    out << s.label << ',' << s.domain_id << ',' << s.period << '\n';
  }
  if (!out) throw ParseError(path + ": write failed");
}

PeriodDataset load_csv(const std::string& path, const FeatureSchema& schema,
                       int target_domain) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": file not found");
  std::string line;
  if (!std::getline(in, line)) fail(path, 1, "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  const auto expected = header_for(schema);
  for (const auto& name : expected) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      fail(path, 1, "missing column '" + name + "'");
    }
  }
  if (header != expected) {
    fail(path, 1, "header does not match schema order");
  }

  PeriodDataset data;
  data.schema = schema;
  const int num_cat = schema.num_categorical();
  const int num_dense = schema.num_dense();
  std::size_t line_no = 1;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != expected.size()) {
      fail(path, line_no, "expected " + std::to_string(expected.size()) +
                              " columns, got " + std::to_string(cells.size()));
    }
    Sample s;
    for (int f = 0; f < num_cat; ++f) {
      const long idx = parse_int(cells[f], path, line_no, expected[f]);
      if (idx < 0 || idx >= schema.categorical[f].cardinality) {
        fail(path, line_no, "column '" + expected[f] + "': index " +
                                std::to_string(idx) + " outside [0, " +
                                std::to_string(schema.categorical[f].cardinality) +
                                ")");
      }
      s.categorical.push_back(static_cast<std::int32_t>(idx));
    }
    for (int f = 0; f < num_dense; ++f) {
      s.dense.push_back(
          parse_double(cells[num_cat + f], path, line_no, expected[num_cat + f]));
    }
    const std::size_t base = num_cat + num_dense;
    const long y = parse_int(cells[base], path, line_no, "y");
    if (y != 0 && y != 1) {
      fail(path, line_no, "label y=" + std::to_string(y) + " outside {0,1}");
    }
    s.label = static_cast<int>(y);
    s.domain_id = static_cast<int>(parse_int(cells[base + 1], path, line_no, "domain"));
    s.period = static_cast<int>(parse_int(cells[base + 2], path, line_no, "period"));
    if (s.period < 0) fail(path, line_no, "negative period");
    s.indicator = s.domain_id == target_domain ? 1 : 0;
    if (first) {
      data.domain_id = s.domain_id;
      data.period = s.period;
      first = false;
    } else if (s.domain_id != data.domain_id || s.period != data.period) {
      fail(path, line_no, "row belongs to domain " + std::to_string(s.domain_id) +
                              " period " + std::to_string(s.period) +
                              ", file holds domain " +
                              std::to_string(data.domain_id) + " period " +
                              std::to_string(data.period));
    }
    data.samples.push_back(std::move(s));
  }
  return data;
}

}  // namespace xdt
