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

#include "xdt/model/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

namespace xdt {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'X', 'D', 'T', 'C', 'K', 'P', 'T', '\n'};

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& path) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ParseError("checkpoint " + path + ": truncated");
  return value;
}

// Tensors of a backbone, named in collect() order.
std::string tensor_name(const std::string& prefix, std::size_t i) {
  return prefix + "/" + std::to_string(i);
}

}  // namespace

const Matrix& TensorArchive::get(const std::string& name) const {
  for (const auto& [key, value] : tensors) {
    if (key == name) return value;
  }
  throw ParseError("checkpoint: missing tensor '" + name + "'");
}

void save_archive(const std::string& path, const TensorArchive& archive) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("checkpoint " + path + ": cannot open for writing");
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kCheckpointVersion);
  const std::string meta = archive.meta.dump();
  write_pod(out, static_cast<std::uint64_t>(meta.size()));
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  write_pod(out, static_cast<std::uint64_t>(archive.tensors.size()));
  for (const auto& [name, m] : archive.tensors) {
    write_pod(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod(out, static_cast<std::int64_t>(m.rows()));
    write_pod(out, static_cast<std::int64_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
  }
  if (!out) throw ParseError("checkpoint " + path + ": write failed");
}

TensorArchive load_archive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("checkpoint " + path + ": file not found");
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("checkpoint " + path + ": bad magic");
  }
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint " + path + ": unsupported version " +
                     std::to_string(version));
  }
  TensorArchive archive;
  const auto meta_len = read_pod<std::uint64_t>(in, path);
  std::string meta(meta_len, '\0');
  in.read(meta.data(), static_cast<std::streamsize>(meta_len));
  if (!in) throw ParseError("checkpoint " + path + ": truncated metadata");
  try {
    archive.meta = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint " + path + ": bad metadata: " + e.what());
  }
  const auto count = read_pod<std::uint64_t>(in, path);
  for (std::uint64_t t = 0; t < count; ++t) {
    const auto name_len = read_pod<std::uint32_t>(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const auto rows = read_pod<std::int64_t>(in, path);
    const auto cols = read_pod<std::int64_t>(in, path);
    if (rows < 0 || cols < 0) throw ParseError("checkpoint " + path + ": bad shape");
    Matrix m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!in) throw ParseError("checkpoint " + path + ": truncated tensor " + name);
    archive.tensors.emplace_back(std::move(name), std::move(m));
  }
  return archive;
}

nlohmann::json schema_to_json(const FeatureSchema& schema) {
  nlohmann::json j;
  j["categorical"] = nlohmann::json::array();
  for (const auto& field : schema.categorical) {
    j["categorical"].push_back(
        {{"name", field.name}, {"cardinality", field.cardinality}});
  }
  j["dense"] = schema.dense;
  j["embedding_dim"] = schema.embedding_dim;
  return j;
}

FeatureSchema schema_from_json(const nlohmann::json& j) {
  FeatureSchema schema;
  for (const auto& field : j.at("categorical")) {
    schema.categorical.push_back(
        {field.at("name").get<std::string>(), field.at("cardinality").get<int>()});
  }
  schema.dense = j.at("dense").get<std::vector<std::string>>();
  schema.embedding_dim = j.at("embedding_dim").get<int>();
  return schema;
}

void pack_backbone(const Backbone& model, const std::string& prefix,
                   TensorArchive& archive) {
  archive.meta[prefix] = {{"kind", backbone_kind_name(model.kind)},
                          {"schema", schema_to_json(model.schema)},
                          {"trunk_widths", model.trunk_widths()}};
  Backbone copy = model;
  const ParamList params = copy.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const ParamList one{params[i]};
    Matrix m(static_cast<Eigen::Index>(params[i].size()), 1);
    m.reshaped() = flatten(one);
    archive.tensors.emplace_back(tensor_name(prefix, i), std::move(m));
  }
}

Backbone unpack_backbone(const TensorArchive& archive, const std::string& prefix) {
  if (!archive.meta.contains(prefix)) {
    throw ParseError("checkpoint: no model under '" + prefix + "'");
  }
  Backbone model;
  try {
    const auto& meta = archive.meta.at(prefix);
    model = build_backbone(parse_backbone_kind(meta.at("kind").get<std::string>()),
                           schema_from_json(meta.at("schema")),
                           meta.at("trunk_widths").get<std::vector<int>>(), 0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint: bad model metadata: " + std::string(e.what()));
  }
  const ParamList params = model.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& stored = archive.get(tensor_name(prefix, i));
    if (static_cast<std::size_t>(stored.size()) != params[i].size()) {
      throw ParseError("checkpoint: tensor " + tensor_name(prefix, i) + " has " +
                       std::to_string(stored.size()) + " values, expected " +
                       std::to_string(params[i].size()));
    }
    std::memcpy(params[i].data(), stored.data(), sizeof(double) * stored.size());
  }
  return model;
}

void save_backbone(const std::string& path, const Backbone& model) {
  TensorArchive archive;
  pack_backbone(model, "model", archive);
  save_archive(path, archive);
}

Backbone load_backbone(const std::string& path) {
  return unpack_backbone(load_archive(path), "model");
}

}  // namespace xdt
