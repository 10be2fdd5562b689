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

#include "stance/exo.hpp"

#include <gtest/gtest.h>

#include "stance/rng.hpp"

namespace stance {
namespace {

ExoParams random_params(Rng& rng) {
  ExoParams p;
  p.k_p_joint = rng.uniform(0.0, 400.0);
  p.k_d_joint = rng.uniform(0.0, 40.0);
  p.k_p_tilt = rng.uniform(0.0, 400.0);
  p.k_d_tilt = rng.uniform(0.0, 40.0);
  p.weight = rng.uniform();
  p.torque_max = 80.0;
  return p;
}

TEST(ExoTorque, PureJointMixtureEndpoint) {
  ExoParams p;
  p.weight = 0.0;
  p.k_p_joint = 100.0;
  p.k_d_joint = 10.0;
  p.k_p_tilt = 999.0;  // must not matter
  p.k_d_tilt = 99.0;
  const auto torque =
      exo_torque(p, {0.1, -0.2}, {0.0, 0.0}, 0.5, 1.0, {0.2, 0.0}, 0.0);
  EXPECT_NEAR(torque[0], 100.0 * 0.1, 1e-12);
  EXPECT_NEAR(torque[1], 100.0 * 0.2, 1e-12);
}

TEST(ExoTorque, PurePosturalMixtureEndpoint) {
  ExoParams p;
  p.weight = 1.0;
  p.k_p_joint = 999.0;  // must not matter
  p.k_p_tilt = 50.0;
  p.k_d_tilt = 5.0;
  const auto torque =
      exo_torque(p, {0.3, -0.4}, {1.0, -1.0}, 0.1, 0.2, {0.0, 0.0}, 0.25);
  const double postural = 50.0 * (0.25 - 0.1) + 5.0 * (0.0 - 0.2);
  EXPECT_NEAR(torque[0], postural, 1e-12);
  EXPECT_NEAR(torque[1], postural, 1e-12);
}

TEST(ExoTorque, ZeroAtTargetsAndRest) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const ExoParams p = random_params(rng);
    const double hip_l = rng.uniform(-0.5, 0.5);
    const double hip_r = rng.uniform(-0.5, 0.5);
    const double tilt = rng.uniform(-0.3, 0.3);
    const auto torque = exo_torque(p, {hip_l, hip_r}, {0.0, 0.0}, tilt, 0.0,
                                   {hip_l, hip_r}, tilt);
    EXPECT_DOUBLE_EQ(torque[0], 0.0);
    EXPECT_DOUBLE_EQ(torque[1], 0.0);
  }
}

// Symbolic re-evaluation of the mixture law on random inputs.
TEST(ExoTorque, MatchesSymbolicFormula) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    ExoParams p = random_params(rng);
    p.torque_max = 1e9;  // keep the clamp out of the comparison
    const std::array<double, 2> hip{rng.uniform(-1.0, 1.0),
                                    rng.uniform(-1.0, 1.0)};
    const std::array<double, 2> hip_rate{rng.uniform(-3.0, 3.0),
                                         rng.uniform(-3.0, 3.0)};
    const double tilt = rng.uniform(-0.5, 0.5);
    const double tilt_rate = rng.uniform(-2.0, 2.0);
    const std::array<double, 2> target{rng.uniform(-1.0, 1.0),
                                       rng.uniform(-1.0, 1.0)};
    const double tilt_target = rng.uniform(-0.4, 0.4);

    const auto torque =
        exo_torque(p, hip, hip_rate, tilt, tilt_rate, target, tilt_target);
    for (int side = 0; side < 2; ++side) {
      const double expected =
          (1.0 - p.weight) * (p.k_p_joint * (target[side] - hip[side]) +
                              p.k_d_joint * (0.0 - hip_rate[side])) +
          p.weight * (p.k_p_tilt * (tilt_target - tilt) +
                      p.k_d_tilt * (0.0 - tilt_rate));
      ASSERT_NEAR(torque[side], expected, 1e-9 * (1.0 + std::abs(expected)));
    }
  }
}

TEST(ExoTorque, BoundedByTorqueLimit) {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const ExoParams p = random_params(rng);
    const auto torque = exo_torque(
        p, {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)},
        {rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)},
        rng.uniform(-2.0, 2.0), rng.uniform(-20.0, 20.0),
        {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)},
        rng.uniform(-2.0, 2.0));
    ASSERT_LE(std::abs(torque[0]), p.torque_max);
    ASSERT_LE(std::abs(torque[1]), p.torque_max);
  }
}

TEST(ExoTorque, SidesDifferOnlyThroughJointTerm) {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    ExoParams p = random_params(rng);
    p.torque_max = 1e9;
    const std::array<double, 2> hip{rng.uniform(-1.0, 1.0),
                                    rng.uniform(-1.0, 1.0)};
    const std::array<double, 2> hip_rate{rng.uniform(-3.0, 3.0),
                                         rng.uniform(-3.0, 3.0)};
    const std::array<double, 2> target{rng.uniform(-1.0, 1.0),
                                       rng.uniform(-1.0, 1.0)};
    const auto torque = exo_torque(p, hip, hip_rate, rng.uniform(-0.5, 0.5),
                                   rng.uniform(-2.0, 2.0), target,
                                   rng.uniform(-0.4, 0.4));
    const auto joint = [&](int side) {
      return (1.0 - p.weight) * (p.k_p_joint * (target[side] - hip[side]) +
                                 p.k_d_joint * (0.0 - hip_rate[side]));
    };
    ASSERT_NEAR(torque[0] - torque[1], joint(0) - joint(1), 1e-9);
  }
}

}  // namespace
}  // namespace stance
