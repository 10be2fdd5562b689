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

#pragma once

#include <cmath>

#include "stance/biped.hpp"
#include "stance/types.hpp"

namespace stance {

// Standing cost: five weighted terms scoring body height, upper-body
// rotation, CoM placement over the feet, CoM velocity and closeness to a
// natural posture.

struct CostWeights {
  double w_height = 300.0;
  double w_rotation = 300.0;
  double w_com_position = 300.0;
  double w_com_velocity = 10.0;
  double w_posture = 1.0;
};

struct CostBreakdown {
  double height = 0.0;        // |(z_head - z_feet) - initial_height|
  double rotation = 0.0;      // 1 - (pelvis-to-head unit vector) . z
  double com_position = 0.0;  // |x_com - x centroid of heels and toes|
  double com_velocity = 0.0;  // |xdot_com|
  double posture = 0.0;       // L1 distance of joints from the natural pose
  double total = 0.0;
};

inline double weighted_total(const CostWeights& w, const CostBreakdown& c) {
  return w.w_height * c.height + w.w_rotation * c.rotation +
         w.w_com_position * c.com_position + w.w_com_velocity * c.com_velocity +
         w.w_posture * c.posture;
}

// `reference_joints` is the natural standing posture and `initial_height`
// the head-to-feet height at the start of the trial.
inline CostBreakdown cost_components(const ModelSpec& spec,
                                     const BodyState& state,
                                     const Vector6& reference_joints,
                                     double initial_height,
                                     const CostWeights& weights) {
  const Kinematics k = forward_kinematics(spec, state.q);

  CostBreakdown c;

  const double z_feet =
      0.25 * (k.heel[0].z + k.toe[0].z + k.heel[1].z + k.toe[1].z);
  c.height = std::abs((k.head.z - z_feet) - initial_height);

  const Vec2 trunk = k.head - k.pelvis;
  const double trunk_norm = trunk.norm();
  c.rotation = trunk_norm > 0.0 ? 1.0 - trunk.z / trunk_norm : 1.0;

  const double feet_centroid =
      0.25 * (k.heel[0].x + k.toe[0].x + k.heel[1].x + k.toe[1].x);
  c.com_position = std::abs(com(spec, state).x - feet_centroid);

  c.com_velocity = std::abs(com_velocity(spec, state).x);

  for (int j = 0; j < kNumJoints; ++j) {
    c.posture += std::abs(state.q[3 + j] - reference_joints[j]);
  }

  c.total = weighted_total(weights, c);
  return c;
}

}  // namespace stance
