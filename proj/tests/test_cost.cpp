// Copyright 2026 The Stance Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stance/cost.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "stance/rng.hpp"

namespace stance {
namespace {

// A test model whose reference pose has the CoM exactly over the centroid
// of the foot points: straight legs, symmetric foot, no foot CoM offset.
ModelSpec centered_model() {
  ModelSpec spec = default_model();
  spec.foot.com_x = 0.0;
  spec.foot.heel_x = -0.13;
  spec.foot.toe_x = 0.13;
  spec.reference_pose.setZero();
  spec.reference_pose[kBaseZ] = standing_base_height(spec, 0.0, 0.0);
  return spec;
}

double initial_height_of(const ModelSpec& spec, const BodyState& state) {
  const Kinematics k = forward_kinematics(spec, state.q);
  return k.head.z -
         0.25 * (k.heel[0].z + k.toe[0].z + k.heel[1].z + k.toe[1].z);
}

TEST(Cost, AllTermsVanishAtTheTarget) {
  const ModelSpec spec = centered_model();
  BodyState state;
  state.q = spec.reference_pose;
  const CostWeights weights;
  const CostBreakdown c =
      cost_components(spec, state, spec.reference_pose.segment<kNumJoints>(3),
                      initial_height_of(spec, state), weights);
  EXPECT_NEAR(c.height, 0.0, 1e-12);
  EXPECT_NEAR(c.rotation, 0.0, 1e-12);
  EXPECT_NEAR(c.com_position, 0.0, 1e-12);
  EXPECT_NEAR(c.com_velocity, 0.0, 1e-12);
  EXPECT_NEAR(c.posture, 0.0, 1e-12);
  EXPECT_NEAR(c.total, 0.0, 1e-9);
}

TEST(Cost, HorizontalTrunkScoresFullRotation) {
  const ModelSpec spec = default_model();
  BodyState state;
  state.q = spec.reference_pose;
  state.q[kBasePitch] = M_PI / 2.0;
  const CostBreakdown c =
      cost_components(spec, state, spec.reference_pose.segment<kNumJoints>(3),
                      1.5, CostWeights{});
  EXPECT_NEAR(c.rotation, 1.0, 1e-12);
}

TEST(Cost, WeightedTotalArithmetic) {
  const CostWeights weights{300.0, 300.0, 300.0, 10.0, 1.0};
  CostBreakdown c;
  c.height = 0.1;
  c.rotation = 0.2;
  c.com_position = 0.05;
  c.com_velocity = 0.3;
  c.posture = 2.0;
  EXPECT_NEAR(weighted_total(weights, c), 110.0, 1e-12);
}

TEST(Cost, TotalIsLinearInEachComponent) {
  Rng rng(31);
  const ModelSpec spec = default_model();
  const Vector6 ref = spec.reference_pose.segment<kNumJoints>(3);
  const CostWeights weights;
  for (int trial = 0; trial < 20; ++trial) {
    BodyState state;
    state.q = spec.reference_pose;
    state.q[kBaseX] = rng.uniform(-0.5, 0.5);
    state.q[kBasePitch] = rng.uniform(-1.0, 1.0);
    for (int j = 0; j < kNumJoints; ++j) {
      state.q[3 + j] += rng.uniform(-0.3, 0.3);
    }
    for (int i = 0; i < kNumDof; ++i) state.qd[i] = rng.uniform(-1.0, 1.0);
    const CostBreakdown c = cost_components(spec, state, ref, 1.6, weights);
    EXPECT_NEAR(c.total, weighted_total(weights, c), 1e-12 * (1.0 + c.total));
    EXPECT_GE(c.rotation, 0.0);
    EXPECT_LE(c.rotation, 2.0);
    EXPECT_GE(c.height, 0.0);
    EXPECT_GE(c.com_position, 0.0);
    EXPECT_GE(c.com_velocity, 0.0);
    EXPECT_GE(c.posture, 0.0);
  }
}

TEST(Cost, InvariantToHorizontalTranslation) {
  const ModelSpec spec = default_model();
  const Vector6 ref = spec.reference_pose.segment<kNumJoints>(3);
  Rng rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    BodyState state;
    state.q = spec.reference_pose;
    state.q[kBasePitch] = rng.uniform(-0.3, 0.3);
    for (int j = 0; j < kNumJoints; ++j) {
      state.q[3 + j] += rng.uniform(-0.2, 0.2);
    }
    BodyState shifted = state;
    shifted.q[kBaseX] += rng.uniform(-3.0, 3.0);
    const CostBreakdown a = cost_components(spec, state, ref, 1.6, {});
    const CostBreakdown b = cost_components(spec, shifted, ref, 1.6, {});
    EXPECT_NEAR(a.total, b.total, 1e-9 * (1.0 + a.total));
  }
}

}  // namespace
}  // namespace stance
