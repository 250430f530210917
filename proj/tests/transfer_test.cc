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

#include <cmath>
#include <numeric>

#include "xdt/nn/errors.h"
#include "xdt/nn/grad_check.h"
#include "xdt/nn/losses.h"
#include "xdt/transfer/extractors.h"
#include "xdt/transfer/migrator.h"
#include "test_util.h"

namespace xdt {
namespace {

using testing::random_batch;
using testing::random_matrix;
using testing::tiny_schema;

template <typename Module>
ParamList params_of(Module& m) {
  ParamList out;
  m.collect(out);
  return out;
}

TEST(Gate, ZeroParametersGiveUniformWeights) {
  std::mt19937_64 rng(1);
  GatingNetwork g = make_gating(6, 5, 3, rng);
  zero(params_of(g));
  const Matrix w = gate_weights(g, random_matrix(4, 6, rng));
  EXPECT_LT((w.array() - 1.0 / 3.0).abs().maxCoeff(), 1e-15);
  EXPECT_EQ(uniform_gate(4, 3), Matrix::Constant(4, 3, 1.0 / 3.0));
}

TEST(Gate, SingleSourceHasWeightOne) {
  std::mt19937_64 rng(2);
  const GatingNetwork g = make_gating(6, 5, 1, rng);
  EXPECT_EQ(gate_weights(g, random_matrix(4, 6, rng)), Matrix::Ones(4, 1));
}

TEST(Gate, RowsAreOnTheSimplex) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const GatingNetwork g = make_gating(6, 5, 1 + trial % 4, rng);
    const Matrix w = gate_weights(g, random_matrix(8, 6, rng, 10.0));
    EXPECT_TRUE((w.array() >= 0).all());
    EXPECT_LT((w.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-9);
  }
}

TEST(Gate, WidthMismatchThrows) {
  std::mt19937_64 rng(4);
  const GatingNetwork g = make_gating(6, 5, 2, rng);
  EXPECT_THROW(gate_weights(g, Matrix::Zero(3, 7)), DimensionError);
}

TEST(Gate, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  GatingNetwork g = make_gating(6, 5, 3, rng);
  const Matrix x = random_matrix(7, 6, rng);
  const Matrix probe = random_matrix(7, 3, rng);
  const double err = grad_check_params(
      params_of(g),
      [&](Vector* grad) {
        const GateTrace t = gate_forward(g, x);
        if (grad) {
          GatingNetwork acc = g.zeros_like();
          gate_backward(g, x, t, probe, &acc);
          *grad = flatten(params_of(acc));
        }
        return (t.weights.array() * probe.array()).sum();
      },
      1e-5);
  EXPECT_LT(err, 1e-7);
  const double input_err = grad_check(
      [&](const Vector& p, Vector* grad) {
        const Matrix xi = p.reshaped<Eigen::RowMajor>(7, 6);
        const GateTrace t = gate_forward(g, xi);
        if (grad) *grad = gate_backward(g, xi, t, probe, nullptr).reshaped<Eigen::RowMajor>();
        return (t.weights.array() * probe.array()).sum();
      },
      x.reshaped<Eigen::RowMajor>(), 1e-5);
  EXPECT_LT(input_err, 1e-7);
}

TEST(Aggregate, OneHotGateSelectsExactly) {
  std::mt19937_64 rng(6);
  const std::vector<Matrix> e = {random_matrix(3, 4, rng), random_matrix(3, 4, rng)};
  const std::vector<Matrix> z = {random_matrix(3, 2, rng), random_matrix(3, 2, rng)};
  Matrix g(3, 2);
  g << 1, 0, 1, 0, 1, 0;
  const Aggregate a = aggregate_sources(e, z, g);
  EXPECT_EQ(a.representation, e[0]);
  EXPECT_EQ(a.logits, z[0]);
}

TEST(Aggregate, SymmetricHalfGate) {
  std::vector<Matrix> e(2, Matrix(1, 2));
  e[0] << 2, 0;
  e[1] << 0, 2;
  const Aggregate a = aggregate_sources(e, {}, Matrix::Constant(1, 2, 0.5));
  EXPECT_EQ(a.representation, Matrix::Ones(1, 2));
  EXPECT_EQ(a.logits.size(), 0);
}

TEST(Aggregate, MatchesWeightedSumLoopOracle) {
  std::mt19937_64 rng(7);
  const int n = 3, b = 5, w = 4;
  std::vector<Matrix> e, z;
  for (int i = 0; i < n; ++i) {
    e.push_back(random_matrix(b, w, rng));
    z.push_back(random_matrix(b, 2, rng));
  }
  const Matrix g = softmax_rows(random_matrix(b, n, rng));
  const Aggregate a = aggregate_sources(e, z, g);
  for (int r = 0; r < b; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += g(r, i) * e[i](r, c);
      EXPECT_NEAR(a.representation(r, c), acc, 1e-12);
    }
    for (int c = 0; c < 2; ++c) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += g(r, i) * z[i](r, c);
      EXPECT_NEAR(a.logits(r, c), acc, 1e-12);
    }
  }
}

TEST(Aggregate, InconsistentSourceCountThrows) {
  std::mt19937_64 rng(8);
  const std::vector<Matrix> e = {random_matrix(3, 4, rng), random_matrix(3, 4, rng)};
  EXPECT_THROW(aggregate_sources(e, {}, Matrix::Constant(3, 3, 1.0 / 3)), DimensionError);
  const std::vector<Matrix> z = {random_matrix(3, 2, rng)};
  EXPECT_THROW(aggregate_sources(e, z, Matrix::Constant(3, 2, 0.5)), DimensionError);
}

TEST(Aggregate, GateGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  const std::vector<Matrix> e = {random_matrix(4, 3, rng), random_matrix(4, 3, rng)};
  const std::vector<Matrix> z = {random_matrix(4, 2, rng), random_matrix(4, 2, rng)};
  const Matrix pe = random_matrix(4, 3, rng), pz = random_matrix(4, 2, rng);
  const Matrix g0 = random_matrix(4, 2, rng);
  const double err = grad_check(
      [&](const Vector& p, Vector* grad) {
        const Matrix g = p.reshaped<Eigen::RowMajor>(4, 2);
        const Aggregate a = aggregate_sources(e, z, g);
        if (grad) *grad = aggregate_gate_grad(e, z, pe, pz).reshaped<Eigen::RowMajor>();
        return (a.representation.array() * pe.array()).sum() +
               (a.logits.array() * pz.array()).sum();
      },
      g0.reshaped<Eigen::RowMajor>(), 1e-5);
  EXPECT_LT(err, 1e-9);
}

TEST(Mapper, IdentityZeroAndMatmul) {
  std::mt19937_64 rng(10);
  const Matrix e = random_matrix(5, 4, rng);
  Mapper m = make_identity_mapper(4);
  EXPECT_EQ(map_representation(m, e), e);
  m.weight.setZero();
  EXPECT_EQ(map_representation(m, e), Matrix::Zero(5, 4));
  m.weight = random_matrix(4, 4, rng);
  Matrix oracle(5, 4);
  for (int r = 0; r < 5; ++r) {
    for (int o = 0; o < 4; ++o) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += m.weight(o, k) * e(r, k);
      oracle(r, o) = acc;
    }
  }
  EXPECT_LT((map_representation(m, e) - oracle).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(map_representation(m, Matrix::Zero(2, 3)), DimensionError);
}

TEST(Discriminator, ZeroParametersGiveHalf) {
  std::mt19937_64 rng(11);
  Discriminator d = make_discriminator(4, 5, rng);
  zero(params_of(d));
  const Vector p = discriminate(d, random_matrix(6, 4, rng));
  EXPECT_EQ(p, Vector::Constant(6, 0.5));
  EXPECT_THROW(discriminate(d, Matrix::Zero(2, 3)), DimensionError);
}

TEST(Discriminator, MatchesTwoLayerReplay) {
  std::mt19937_64 rng(12);
  Discriminator d = make_discriminator(4, 5, rng);
  d.hidden.bias = random_matrix(5, 1, rng).col(0);
  d.output.bias = random_matrix(1, 1, rng).col(0);
  const Matrix x = random_matrix(6, 4, rng);
  const Vector p = discriminate(d, x);
  EXPECT_EQ(p, discriminate(d, x));
  for (int r = 0; r < 6; ++r) {
    double z = d.output.bias[0];
    for (int h = 0; h < 5; ++h) {
      double a = d.hidden.bias[h];
      for (int k = 0; k < 4; ++k) a += d.hidden.weight(h, k) * x(r, k);
      z += d.output.weight(0, h) * std::max(a, 0.0);
    }
    EXPECT_NEAR(p[r], 1.0 / (1.0 + std::exp(-z)), 1e-12);
  }
}

TEST(Discriminator, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(13);
  Discriminator d = make_discriminator(4, 5, rng);
  const Matrix x = random_matrix(8, 4, rng);
  const Vector y = (Vector(8) << 1, 0, 1, 1, 0, 0, 1, 0).finished();
  const double err = grad_check_params(
      params_of(d),
      [&](Vector* grad) {
        const DiscriminatorTrace t = discriminator_forward(d, x);
        if (grad) {
          Discriminator acc = d.zeros_like();
          discriminator_backward(d, x, t, binary_cross_entropy_logit_grad(t.prob, y), &acc);
          *grad = flatten(params_of(acc));
        }
        return discriminator_loss(t.prob, y);
      },
      1e-5);
  EXPECT_LT(err, 1e-7);
}

TEST(AdversarialLosses, KnownValuesAndIdentity) {
  const Vector d = (Vector(4) << 1, 0, 0, 1).finished();
  EXPECT_LT(discriminator_loss(d, d), 1e-10);
  EXPECT_NEAR(discriminator_loss(Vector::Constant(4, 0.5), d), 0.693147, 1e-6);
  EXPECT_NEAR(confusion_loss(Vector::Constant(4, 0.5), d), std::log(2.0), 1e-15);
  const Vector flipped = (1.0 - d.array()).matrix();
  EXPECT_LT(confusion_loss(flipped, d), 1e-10);
  EXPECT_THROW(discriminator_loss(Vector(), Vector()), std::invalid_argument);
  EXPECT_THROW(confusion_loss(Vector(), Vector()), std::invalid_argument);

  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int trial = 0; trial < 20; ++trial) {
    Vector p(10), y(10);
    double oracle = 0.0;
    for (int i = 0; i < 10; ++i) {
      p[i] = u(rng);
      y[i] = u(rng) < 0.5;
      oracle -= y[i] * std::log(p[i]) + (1 - y[i]) * std::log(1 - p[i]);
    }
    EXPECT_NEAR(discriminator_loss(p, y), oracle / 10, 1e-12);
    EXPECT_EQ(confusion_loss(p, y), discriminator_loss(p, (1.0 - y.array()).matrix()));
  }
}

struct AdversarialSetup {
  std::vector<Backbone> sources;
  Backbone target;
  GatingNetwork gating;
  Mapper mapper;
  Discriminator dis;
  Batch mixed;
};

AdversarialSetup make_setup(int num_sources, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AdversarialSetup s;
  for (int n = 0; n < num_sources; ++n) {
    s.sources.push_back(build_backbone(BackboneKind::kDnn, tiny_schema(), {8, 6}, seed + n));
  }
  s.target = build_backbone(BackboneKind::kDcn, tiny_schema(), {7, 6}, seed + 100);
  s.gating = make_gating(6, 5, num_sources, rng);
  s.mapper = make_identity_mapper(6);
  s.mapper.weight += random_matrix(6, 6, rng, 0.2);
  s.dis = make_discriminator(6, 5, rng);
  s.mixed = random_batch(tiny_schema(), 12, rng);
  return s;
}

TEST(AdversarialPath, SingleSourceWithIdentityMapper) {
  AdversarialSetup s = make_setup(1, 20);
  s.mapper = make_identity_mapper(6);
  const AdversarialTrace t =
      adversarial_source_path(s.sources, s.target, s.gating, s.mapper, s.mixed);
  EXPECT_LT((t.mapped - forward(s.sources[0], s.mixed).representation).cwiseAbs().maxCoeff(),
            1e-15);
  EXPECT_EQ(t.indicator, s.mixed.domain);
}

TEST(AdversarialPath, MatchesScriptedComposition) {
  const AdversarialSetup s = make_setup(3, 21);
  const AdversarialTrace t =
      adversarial_source_path(s.sources, s.target, s.gating, s.mapper, s.mixed);
  std::vector<Matrix> reprs;
  for (const auto& src : s.sources) reprs.push_back(forward(src, s.mixed).representation);
  const Matrix g = gate_weights(s.gating, forward(s.target, s.mixed).representation);
  const Matrix agg = aggregate_sources(reprs, {}, g).representation;
  EXPECT_LT((t.pre_mapper - agg).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((t.mapped - map_representation(s.mapper, agg)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AdversarialPath, PermutationEquivariant) {
  const AdversarialSetup s = make_setup(2, 22);
  const AdversarialTrace t =
      adversarial_source_path(s.sources, s.target, s.gating, s.mapper, s.mixed);
  std::vector<int> perm(s.mixed.size());
  std::iota(perm.rbegin(), perm.rend(), 0);
  Batch shuffled = s.mixed;
  for (Eigen::Index i = 0; i < s.mixed.size(); ++i) {
    shuffled.categorical.row(i) = s.mixed.categorical.row(perm[i]);
    shuffled.dense.row(i) = s.mixed.dense.row(perm[i]);
    shuffled.label[i] = s.mixed.label[perm[i]];
    shuffled.domain[i] = s.mixed.domain[perm[i]];
  }
  const AdversarialTrace u =
      adversarial_source_path(s.sources, s.target, s.gating, s.mapper, shuffled);
  for (Eigen::Index i = 0; i < s.mixed.size(); ++i) {
    EXPECT_LT((u.mapped.row(i) - t.mapped.row(perm[i])).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(AdversarialPath, UniformGateOptionIgnoresGatingNetwork) {
  const AdversarialSetup s = make_setup(2, 23);
  s.gating.reads.reset();
  const AdversarialTrace t = adversarial_source_path(
      s.sources, s.target, s.gating, s.mapper, s.mixed, {.use_gating = false});
  EXPECT_EQ(s.gating.reads.value(), 0u);
  EXPECT_EQ(t.gate.weights, uniform_gate(s.mixed.size(), 2));
}

TEST(AdversarialPath, TargetRowsFromTargetModelOption) {
  const AdversarialSetup s = make_setup(2, 24);
  const AdversarialTrace t = adversarial_source_path(
      s.sources, s.target, s.gating, s.mapper, s.mixed,
      {.use_gating = true, .target_rows_from_target_model = true});
  const Matrix own = forward(s.target, s.mixed).representation;
  for (Eigen::Index i = 0; i < s.mixed.size(); ++i) {
    if (s.mixed.domain[i] == 1) {
      EXPECT_LT((t.pre_mapper.row(i) - own.row(i)).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

// Confusion loss through the discriminator, which stays constant.
double confusion_objective(AdversarialSetup& s, const AdversarialOptions& opts,
                           Mapper* gm, GatingNetwork* gg, Backbone* gt) {
  const AdversarialTrace t =
      adversarial_source_path(s.sources, s.target, s.gating, s.mapper, s.mixed, opts);
  const DiscriminatorTrace dt = discriminator_forward(s.dis, t.mapped);
  const double loss = confusion_loss(dt.prob, t.indicator);
  if (gm || gg || gt) {
    const Vector flipped = (1.0 - t.indicator.array()).matrix();
    const Matrix grad = discriminator_backward(
        s.dis, t.mapped, dt, binary_cross_entropy_logit_grad(dt.prob, flipped), nullptr);
    adversarial_backward(s.sources, s.target, s.gating, s.mapper, s.mixed, t, grad, opts, gm,
                         gg, gt);
  }
  return loss;
}

TEST(AdversarialBackward, ConfusionGradientMatchesFiniteDifferences) {
  for (bool target_rows : {false, true}) {
    AdversarialSetup s = make_setup(2, 25);
    // Off the relu kink: zero biases meet all-zero representation rows.
    std::mt19937_64 rng(5);
    s.gating.hidden.bias = random_matrix(5, 1, rng, 0.3).col(0);
    const AdversarialOptions opts{true, target_rows};
    ParamList params = params_of(s.mapper);
    s.gating.collect(params);
    s.target.collect(params);
    const Vector dis_before = flatten(params_of(s.dis));
    const double err = grad_check_params(
        params,
        [&](Vector* grad) {
          if (!grad) return confusion_objective(s, opts, nullptr, nullptr, nullptr);
          Mapper gm = s.mapper.zeros_like();
          GatingNetwork gg = s.gating.zeros_like();
          Backbone gt = s.target.zeros_like();
          const double loss = confusion_objective(s, opts, &gm, &gg, &gt);
          ParamList g = params_of(gm);
          gg.collect(g);
          gt.collect(g);
          *grad = flatten(g);
          return loss;
        },
        1e-5);
    EXPECT_LT(err, 1e-4) << "target_rows=" << target_rows;
    EXPECT_TRUE(bit_equal(flatten(params_of(s.dis)), dis_before));
  }
}

TEST(MiddleDistill, KnownValues) {
  Projection id{Matrix(), true};
  std::mt19937_64 rng(30);
  const Matrix e = random_matrix(3, 4, rng);
  EXPECT_EQ(middle_distill_loss(e, e, id, nullptr, nullptr, nullptr), 0.0);
  Matrix es(1, 2), et = Matrix::Zero(1, 2);
  es << 1, 0;
  EXPECT_DOUBLE_EQ(middle_distill_loss(es, et, id, nullptr, nullptr, nullptr), 0.5);
  EXPECT_THROW(middle_distill_loss(e, Matrix::Zero(3, 5), id, nullptr, nullptr, nullptr),
               DimensionError);
}

TEST(MiddleDistill, MatchesLoopOracleAndGradients) {
  std::mt19937_64 rng(31);
  Projection proj = make_projection(5, 3, rng);
  ASSERT_FALSE(proj.identity);
  EXPECT_TRUE(make_projection(4, 4, rng).identity);
  const Matrix teacher = random_matrix(6, 5, rng), student = random_matrix(6, 3, rng);
  double oracle = 0.0;
  for (int r = 0; r < 6; ++r) {
    for (int o = 0; o < 3; ++o) {
      double t = 0.0;
      for (int k = 0; k < 5; ++k) t += proj.weight(o, k) * teacher(r, k);
      oracle += (t - student(r, o)) * (t - student(r, o));
    }
  }
  EXPECT_NEAR(middle_distill_loss(teacher, student, proj, nullptr, nullptr, nullptr),
              oracle / 18, 1e-12);

  Vector point(teacher.size() + student.size() + proj.weight.size());
  point << teacher.reshaped<Eigen::RowMajor>(), student.reshaped<Eigen::RowMajor>(),
      proj.weight.reshaped<Eigen::RowMajor>();
  const double err = grad_check(
      [&](const Vector& p, Vector* grad) {
        const Matrix t = p.head(30).reshaped<Eigen::RowMajor>(6, 5);
        const Matrix s = p.segment(30, 18).reshaped<Eigen::RowMajor>(6, 3);
        Projection w{p.tail(15).reshaped<Eigen::RowMajor>(3, 5), false};
        Matrix gt, gs;
        Projection gw = w.zeros_like();
        const double loss = middle_distill_loss(t, s, w, &gt, &gs, &gw);
        if (grad) {
          grad->resize(p.size());
          *grad << gt.reshaped<Eigen::RowMajor>(), gs.reshaped<Eigen::RowMajor>(),
              gw.weight.reshaped<Eigen::RowMajor>();
        }
        return loss;
      },
      point, 1e-5);
  EXPECT_LT(err, 1e-8);
}

TEST(LogitDistill, KnownValues) {
  Matrix zs(1, 2), zt = Matrix::Zero(1, 2);
  zs << std::log(2.0), 0.0;
  const double expected = (2.0 / 3) * std::log(4.0 / 3) + (1.0 / 3) * std::log(2.0 / 3);
  EXPECT_NEAR(logit_distill_loss(zs, zt, 1.0, nullptr, nullptr), expected, 1e-15);
  EXPECT_NEAR(expected, 0.056633, 1e-6);
  EXPECT_EQ(logit_distill_loss(zs, zs, 3.0, nullptr, nullptr), 0.0);
  EXPECT_THROW(logit_distill_loss(zs, zt, 0.0, nullptr, nullptr), std::invalid_argument);
  EXPECT_THROW(logit_distill_loss(zs, zt, -1.0, nullptr, nullptr), std::invalid_argument);
}

TEST(LogitDistill, NonNegativeLoopOracleAndHighTemperature) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix zs(4, 2), zt(4, 2);
    for (Eigen::Index i = 0; i < 8; ++i) {
      zs.data()[i] = u(rng);
      zt.data()[i] = u(rng);
    }
    const double tau = 1.0 + trial % 5;
    const double kl = logit_distill_loss(zs, zt, tau, nullptr, nullptr);
    EXPECT_GE(kl, -1e-12);
    double oracle = 0.0;
    for (int r = 0; r < 4; ++r) {
      const double ps1 = 1 / (1 + std::exp((zs(r, 0) - zs(r, 1)) / tau));
      const double pt1 = 1 / (1 + std::exp((zt(r, 0) - zt(r, 1)) / tau));
      oracle += (1 - ps1) * std::log((1 - ps1) / (1 - pt1)) + ps1 * std::log(ps1 / pt1);
    }
    EXPECT_NEAR(kl, oracle / 4, 1e-10 * std::max(1.0, kl));
    EXPECT_LT(logit_distill_loss(zs, zt, 1000.0, nullptr, nullptr), 1e-4);
  }
}

TEST(LogitDistill, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(33);
  for (double tau : {1.0, 10.0}) {
    const Matrix zs = random_matrix(5, 2, rng, 3.0), zt = random_matrix(5, 2, rng, 3.0);
    Vector point(20);
    point << zs.reshaped<Eigen::RowMajor>(), zt.reshaped<Eigen::RowMajor>();
    const double err = grad_check(
        [&](const Vector& p, Vector* grad) {
          const Matrix a = p.head(10).reshaped<Eigen::RowMajor>(5, 2);
          const Matrix b = p.tail(10).reshaped<Eigen::RowMajor>(5, 2);
          Matrix ga, gb;
          const double loss = logit_distill_loss(a, b, tau, &ga, &gb);
          if (grad) {
            grad->resize(20);
            *grad << ga.reshaped<Eigen::RowMajor>(), gb.reshaped<Eigen::RowMajor>();
          }
          return loss;
        },
        point, 1e-5);
    EXPECT_LT(err, 1e-9) << "tau " << tau;
  }
}

TEST(KdTotal, ArithmeticAndLinearity) {
  const double mid[] = {0.5};
  EXPECT_DOUBLE_EQ(kd_total(mid, 0.1, 1.0, 10.0), 1.5);
  EXPECT_EQ(kd_total(mid, 0.1, 0.0, 0.0), 0.0);
  const double two[] = {0.25, 0.75};
  EXPECT_DOUBLE_EQ(kd_total(two, 0.2, 2.0, 0.0), 2 * kd_total(two, 0.2, 1.0, 0.0));
  EXPECT_DOUBLE_EQ(kd_total(two, 0.2, 0.0, 3.0), 3 * kd_total(two, 0.2, 0.0, 1.0));
}

}  // namespace
}  // namespace xdt
