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

#include "stance/lowctl.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "stance/rng.hpp"

namespace stance {
namespace {

Vector6 reference_joints(const ModelSpec& spec) {
  return spec.reference_pose.segment<kNumJoints>(3);
}

TEST(TargetLengths, UnityAtReferenceJoints) {
  const ModelSpec spec = default_model();
  const Vector18 targets = target_muscle_lengths(spec, reference_joints(spec));
  for (int m = 0; m < kNumMuscles; ++m) {
    EXPECT_DOUBLE_EQ(targets[m], 1.0);
  }
}

TEST(TargetLengths, MatchesLengthMapRegardlessOfBasePlacement) {
  const ModelSpec spec = default_model();
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Vector6 joints;
    for (int j = 0; j < kNumJoints; ++j) {
      joints[j] = rng.uniform(spec.joint_min[j], spec.joint_max[j]);
    }
    Vector9 pose = Vector9::Zero();
    pose[kBaseX] = rng.uniform(-2.0, 2.0);
    pose[kBaseZ] = rng.uniform(0.0, 2.0);
    pose[kBasePitch] = rng.uniform(-1.0, 1.0);
    pose.segment<kNumJoints>(3) = joints;
    const Vector18 ours = target_muscle_lengths(spec, joints);
    const Vector18 direct = muscle_lengths(spec, pose);
    for (int m = 0; m < kNumMuscles; ++m) {
      EXPECT_DOUBLE_EQ(ours[m], direct[m]);
    }
  }
}

TEST(TargetLengths, PerturbingOneJointOnlyMovesSpanningMuscles) {
  const ModelSpec spec = default_model();
  const Vector18 base = target_muscle_lengths(spec, reference_joints(spec));
  for (int j = 0; j < kNumJoints; ++j) {
    Vector6 joints = reference_joints(spec);
    joints[j] += 0.05;
    const Vector18 moved = target_muscle_lengths(spec, joints);
    for (int m = 0; m < kNumMuscles; ++m) {
      if (spec.moment_arms(m, j) == 0.0) {
        EXPECT_DOUBLE_EQ(moved[m], base[m]) << muscle_name(m);
      } else {
        EXPECT_NE(moved[m], base[m]) << muscle_name(m);
      }
    }
  }
}

TEST(MusclePd, RestAtTargetIsZero) {
  const PdGains gains{200.0, 10.0};
  EXPECT_DOUBLE_EQ(muscle_pd(1.0, 1.0, 0.0, gains, 1.0), 0.0);
}

TEST(MusclePd, ShortMuscleClampsToZero) {
  // Muscle shorter than target: the PD asks for pushing, which a muscle
  // cannot do.
  const PdGains gains{200.0, 10.0};
  EXPECT_DOUBLE_EQ(muscle_pd(1.0, 0.9, 0.0, gains, 1.0), 0.0);
}

TEST(MusclePd, HandEvaluatedFormula) {
  const PdGains gains{200.0, 0.0};
  const double l_range = 1.0;
  const double f = muscle_pd(1.0, 1.0 + 0.1 * l_range, 0.0, gains, l_range);
  EXPECT_NEAR(f, -20.0, 1e-12);
}

TEST(MusclePd, NeverPositive) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const PdGains gains{rng.uniform(0.0, 5000.0), rng.uniform(0.0, 500.0)};
    const double f = muscle_pd(rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5),
                               rng.uniform(-5.0, 5.0), gains,
                               rng.uniform(0.5, 2.0));
    ASSERT_LE(f, 0.0);
  }
}

TEST(MusclePd, DoublingRangeHalvesProportionalTerm) {
  const PdGains gains{300.0, 0.0};
  const double narrow = muscle_pd(1.0, 1.2, 0.0, gains, 1.0);
  const double wide = muscle_pd(1.0, 1.2, 0.0, gains, 2.0);
  EXPECT_DOUBLE_EQ(wide, 0.5 * narrow);
}

TEST(LowLevelControls, DeterministicAndBounded) {
  const ModelSpec spec = default_model();
  const PdGains gains;
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    BodyState state;
    state.q = spec.reference_pose;
    for (int j = 0; j < kNumJoints; ++j) {
      state.q[3 + j] = rng.uniform(spec.joint_min[j], spec.joint_max[j]);
    }
    for (int i = 0; i < kNumDof; ++i) state.qd[i] = rng.uniform(-2.0, 2.0);
    for (int m = 0; m < kNumMuscles; ++m) state.activation[m] = rng.uniform();
    Vector6 targets;
    for (int j = 0; j < kNumJoints; ++j) {
      targets[j] = rng.uniform(spec.joint_min[j], spec.joint_max[j]);
    }
    const ControlDecision a =
        low_level_controls(spec, state, targets, gains, 0.01);
    const ControlDecision b =
        low_level_controls(spec, state, targets, gains, 0.01);
    for (int m = 0; m < kNumMuscles; ++m) {
      ASSERT_GE(a.controls[m], 0.0);
      ASSERT_LE(a.controls[m], 1.0);
      ASSERT_DOUBLE_EQ(a.controls[m], b.controls[m]);
    }
  }
}

TEST(LowLevelControls, ZeroDemandDrivesActivationDown) {
  const ModelSpec spec = default_model();
  const PdGains gains;
  // At the target pose and at rest every desired force is zero, so each
  // control must pull its activation toward zero.
  BodyState state;
  state.q = spec.reference_pose;
  Rng rng(11);
  for (int m = 0; m < kNumMuscles; ++m) {
    state.activation[m] = rng.uniform(0.2, 1.0);
  }
  const ControlDecision decision =
      low_level_controls(spec, state, reference_joints(spec), gains, 0.01);
  for (int m = 0; m < kNumMuscles; ++m) {
    EXPECT_LE(decision.controls[m], state.activation[m]);
  }
}

TEST(LowLevelControls, RepeatedStepsReduceOverstretch) {
  ModelSpec spec = default_model();
  spec.gravity = 0.0;
  const PdGains gains;
  // Crouched pose commanded back to the reference: several muscles sit
  // beyond their target lengths.
  BodyState state;
  state.q = spec.reference_pose;
  state.q[kBaseZ] += 1.0;  // airborne, isolate the muscle action
  for (int s = 0; s < 2; ++s) {
    state.q[3 + 3 * s + kKnee] = -0.8;
    state.q[3 + 3 * s + kHip] = 0.5;
  }
  const Vector6 targets = reference_joints(spec);

  const auto overstretch = [&](const BodyState& st) {
    const Vector18 lengths = muscle_lengths(spec, st.q);
    const Vector18 want = target_muscle_lengths(spec, targets);
    double total = 0.0;
    for (int m = 0; m < kNumMuscles; ++m) {
      total += std::pow(std::max(0.0, lengths[m] - want[m]), 2);
    }
    return total;
  };

  const double before = overstretch(state);
  ASSERT_GT(before, 1e-4);
  BodyState s = state;
  for (int i = 0; i < 100; ++i) {
    const ControlDecision d = low_level_controls(spec, s, targets, gains, 0.01);
    for (int sub = 0; sub < 10; ++sub) {
      s = step(spec, s, d.controls, {0.0, 0.0}, {}, 1e-3);
    }
    if (i == 0) {
      // Already after a single control step the pull must have begun.
      EXPECT_LT(overstretch(s), before);
    }
  }
  EXPECT_LT(overstretch(s), before);
}

TEST(LowLevelControls, SaturationFlagPropagates) {
  ModelSpec spec = default_model();
  const PdGains gains{5000.0, 0.0};
  for (int m = 0; m < kNumMuscles; ++m) {
    spec.muscles[m].l_opt = 0.01;  // tiny optimal length: huge excursions
  }
  // Far from the reference pose the force-length gain underflows while the
  // PD still demands tension.
  BodyState state;
  state.q = spec.reference_pose;
  for (int s = 0; s < 2; ++s) {
    state.q[3 + 3 * s + kAnkle] = spec.joint_max[kAnkle];
    state.q[3 + 3 * s + kKnee] = spec.joint_min[kKnee];
  }
  const ControlDecision decision =
      low_level_controls(spec, state, reference_joints(spec), gains, 0.01);
  EXPECT_TRUE(decision.any_saturated);
}

}  // namespace
}  // namespace stance
