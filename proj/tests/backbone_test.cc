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

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "xdt/model/backbone.h"
#include "xdt/model/checkpoint.h"
#include "xdt/nn/activations.h"
#include "xdt/nn/errors.h"
#include "xdt/nn/grad_check.h"
#include "xdt/nn/losses.h"
#include "test_util.h"

namespace xdt {
namespace {

using testing::random_batch;
using testing::random_matrix;
using testing::tiny_schema;

constexpr BackboneKind kAllKinds[] = {BackboneKind::kDnn, BackboneKind::kDcn,
                                      BackboneKind::kWideDeep};

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("xdt_" + name)).string();
}

TEST(BuildBackbone, SameSeedIsBitIdentical) {
  for (BackboneKind kind : kAllKinds) {
    const Backbone a = build_backbone(kind, tiny_schema(), {8, 6}, 42);
    const Backbone b = build_backbone(kind, tiny_schema(), {8, 6}, 42);
    const Backbone c = build_backbone(kind, tiny_schema(), {8, 6}, 43);
    EXPECT_TRUE(bit_equal(testing::params_of(a), testing::params_of(b)));
    EXPECT_FALSE(bit_equal(testing::params_of(a), testing::params_of(c)));
  }
}

TEST(BuildBackbone, StructureFollowsKind) {
  const FeatureSchema schema = FeatureSchema::standard();
  const Backbone dnn = build_backbone(BackboneKind::kDnn, schema, {64, 32}, 1);
  EXPECT_EQ(dnn.representation_width(), 32);
  EXPECT_EQ(dnn.head.in_width(), 32);
  EXPECT_EQ(dnn.head.out_width(), 2);
  EXPECT_FALSE(dnn.cross.has_value());
  EXPECT_FALSE(dnn.wide.has_value());
  const Backbone dcn = build_backbone(BackboneKind::kDcn, schema, {64, 32}, 1);
  ASSERT_TRUE(dcn.cross.has_value());
  EXPECT_EQ(dcn.cross->weight.size(), schema.input_width());
  const Backbone wd = build_backbone(BackboneKind::kWideDeep, schema, {64, 32}, 1);
  ASSERT_TRUE(wd.wide.has_value());
  EXPECT_EQ(wd.wide->tables.size(), schema.categorical.size());
}

TEST(BuildBackbone, GlorotRangeAndZeroBias) {
  const FeatureSchema schema = tiny_schema();
  const Backbone m = build_backbone(BackboneKind::kDnn, schema, {8, 6}, 5);
  const double s = std::sqrt(6.0 / (schema.input_width() + 8));
  EXPECT_LE(m.trunk[0].weight.cwiseAbs().maxCoeff(), s);
  EXPECT_EQ(m.trunk[0].bias.cwiseAbs().maxCoeff(), 0.0);
}

TEST(BuildBackbone, RejectsBadArguments) {
  EXPECT_THROW(build_backbone(BackboneKind::kDnn, tiny_schema(), {}, 1),
               std::invalid_argument);
  EXPECT_THROW(parse_backbone_kind("resnet"), std::invalid_argument);
  EXPECT_EQ(parse_backbone_kind("wd"), BackboneKind::kWideDeep);
}

TEST(Forward, ZeroHeadPredictsHalf) {
  for (BackboneKind kind : kAllKinds) {
    Backbone m = build_backbone(kind, tiny_schema(), {8, 6}, 3);
    m.head.weight.setZero();
    if (m.wide) {
      for (auto& t : m.wide->tables) t.setZero();
      m.wide->dense_weight.setZero();
    }
    std::mt19937_64 rng(1);
    const Vector p = predict(m, random_batch(m.schema, 10, rng));
    EXPECT_LT((p.array() - 0.5).abs().maxCoeff(), 1e-15);
  }
}

TEST(Forward, OutputsAreConsistent) {
  std::mt19937_64 rng(2);
  for (BackboneKind kind : kAllKinds) {
    const Backbone m = build_backbone(kind, tiny_schema(), {8, 6}, 3);
    const Batch b = random_batch(m.schema, 12, rng);
    const ForwardOutput out = forward(m, b);
    const ForwardOutput again = forward(m, b);
    EXPECT_EQ(out.prediction, again.prediction);
    EXPECT_EQ(out.representation.cols(), 6);
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const Vector sm = softmax(out.logits.row(i).transpose().eval());
      EXPECT_EQ(out.prediction[i], sm[1]);
      EXPECT_GT(out.prediction[i], 0.0);
      EXPECT_LT(out.prediction[i], 1.0);
    }
    EXPECT_EQ(predict(m, b), out.prediction);
  }
}

// Independent replay: build the input vector by hand, then run every layer as
// explicit loops.
Matrix replay_representation(const Backbone& m, const Batch& b) {
  const FeatureSchema& s = m.schema;
  Matrix h(b.size(), s.input_width());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    int col = 0;
    for (int f = 0; f < s.num_categorical(); ++f) {
      for (int k = 0; k < s.embedding_dim; ++k) {
        h(i, col++) = m.embeddings[f](b.categorical(i, f), k);
      }
    }
    for (int f = 0; f < s.num_dense(); ++f) h(i, col++) = b.dense(i, f);
  }
  if (m.cross) {
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      double dot = 0.0;
      for (Eigen::Index k = 0; k < h.cols(); ++k) dot += h(i, k) * m.cross->weight[k];
      for (Eigen::Index k = 0; k < h.cols(); ++k) {
        h(i, k) = h(i, k) * dot + m.cross->bias[k] + h(i, k);
      }
    }
  }
  for (const auto& layer : m.trunk) {
    Matrix next(h.rows(), layer.weight.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      for (Eigen::Index o = 0; o < layer.weight.rows(); ++o) {
        double acc = layer.bias[o];
        for (Eigen::Index k = 0; k < h.cols(); ++k) acc += layer.weight(o, k) * h(i, k);
        next(i, o) = std::max(acc, 0.0);
      }
    }
    h = next;
  }
  return h;
}

TEST(Forward, RepresentationMatchesLayerwiseReplay) {
  std::mt19937_64 rng(4);
  for (BackboneKind kind : kAllKinds) {
    const Backbone m = build_backbone(kind, tiny_schema(), {8, 6}, 9);
    const Batch b = random_batch(m.schema, 7, rng);
    EXPECT_LT((forward(m, b).representation - replay_representation(m, b))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
  }
}

TEST(Forward, OutOfRangeIndexNamesFieldAndIndex) {
  const Backbone m = build_backbone(BackboneKind::kDnn, tiny_schema(), {8, 6}, 1);
  std::mt19937_64 rng(1);
  Batch b = random_batch(m.schema, 3, rng);
  b.categorical(1, 1) = 7;
  try {
    forward(m, b);
    FAIL() << "expected out_of_range";
  } catch (const std::out_of_range& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("c1"), std::string::npos) << what;
    EXPECT_NE(what.find("7"), std::string::npos) << what;
  }
  b.categorical(1, 1) = -1;
  EXPECT_THROW(forward(m, b), std::out_of_range);
}

TEST(Forward, WrongDenseWidthThrows) {
  const Backbone m = build_backbone(BackboneKind::kDnn, tiny_schema(), {8, 6}, 1);
  std::mt19937_64 rng(1);
  Batch b = random_batch(m.schema, 3, rng);
  b.dense = Matrix::Zero(3, 5);
  EXPECT_THROW(forward(m, b), DimensionError);
}

TEST(Backward, EveryKindPassesGradCheck) {
  std::mt19937_64 rng(21);
  for (BackboneKind kind : kAllKinds) {
    Backbone m = build_backbone(kind, tiny_schema(), {8, 6}, 17);
    for (auto& layer : m.trunk) layer.bias = random_matrix(layer.bias.size(), 1, rng, 0.1).col(0);
    const Batch b = random_batch(m.schema, 16, rng);
    const Matrix probe_hidden = random_matrix(16, 8, rng);
    const double err = grad_check_params(
        m.params(),
        [&](Vector* grad) {
          const BackboneTrace t = forward_trace(m, b);
          const double loss = binary_cross_entropy(t.prediction, b.label) +
                              (t.hidden[0].array() * probe_hidden.array()).sum() / 16.0;
          if (grad != nullptr) {
            Backbone g = m.zeros_like();
            backward(m, b, t, prediction_logit_grad(t.prediction, b.label),
                     {probe_hidden / 16.0, Matrix()}, g);
            *grad = flatten(g.params());
          }
          return loss;
        },
        1e-5);
    EXPECT_LT(err, 1e-4) << backbone_kind_name(kind);
  }
}

TEST(Predict, TouchesOnlyTheModelAndCountsFlops) {
  const FeatureSchema schema = FeatureSchema::standard();
  std::mt19937_64 rng(8);
  for (BackboneKind kind : kAllKinds) {
    const Backbone m = build_backbone(kind, schema, {64, 32}, 1);
    const Batch b = random_batch(schema, 1000, rng);
    OpCounter ops;
    predict(m, b, &ops);
    EXPECT_EQ(ops.flops, forward_flops(m, 1000)) << backbone_kind_name(kind);
  }
}

TEST(Checkpoint, RoundTripIsBitExact) {
  for (BackboneKind kind : kAllKinds) {
    const Backbone m = build_backbone(kind, tiny_schema(), {8, 6}, 31);
    const std::string path = temp_path("ckpt_roundtrip.bin");
    save_backbone(path, m);
    const Backbone back = load_backbone(path);
    EXPECT_EQ(back.kind, kind);
    EXPECT_EQ(back.schema, m.schema);
    EXPECT_TRUE(bit_equal(testing::params_of(m), testing::params_of(back)));
    std::filesystem::remove(path);
  }
}

TEST(Checkpoint, CorruptFilesAreRejected) {
  EXPECT_THROW(load_backbone(temp_path("definitely_missing.bin")), ParseError);
  const std::string path = temp_path("ckpt_bad.bin");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTACKPT";
  }
  EXPECT_THROW(load_backbone(path), ParseError);
  const Backbone m = build_backbone(BackboneKind::kDnn, tiny_schema(), {8, 6}, 31);
  save_backbone(path, m);
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 9);
  EXPECT_THROW(load_backbone(path), ParseError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace xdt
