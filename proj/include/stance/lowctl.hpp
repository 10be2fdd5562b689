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

#include <algorithm>
#include <array>

#include "stance/biped.hpp"
#include "stance/muscle.hpp"
#include "stance/types.hpp"

namespace stance {

// Low-level controller: converts target joint angles into muscle controls
// through a PD law on normalized muscle lengths followed by the closed-form
// muscle inverses. Muscles only pull, so the desired PD force is clamped to
// be non-positive and its magnitude is the tension demand.

struct PdGains {
  double k_p = 8000.0;  // [N] per unit normalized length error
  double k_d = 250.0;   // [N s] per unit normalized length rate
};

// Normalized muscle lengths at a pose with the given joint angles. The base
// placement is irrelevant: the length map depends only on joints.
inline Vector18 target_muscle_lengths(const ModelSpec& spec,
                                      const Vector6& target_joints) {
  Vector9 pose = spec.reference_pose;
  pose.segment<kNumJoints>(3) = target_joints;
  return muscle_lengths(spec, pose);
}

// Desired muscle force [N, <= 0] from the normalized-length PD law.
inline double muscle_pd(double target_length, double length, double velocity,
                        const PdGains& gains, double length_range) {
  return std::min(0.0, gains.k_p * (target_length - length) / length_range +
                           gains.k_d * (0.0 - velocity));
}

struct ControlDecision {
  std::array<double, kNumMuscles> controls{};
  // Some muscle could not realize its tension demand (degenerate
  // force-length/velocity gain); the control is still valid.
  bool any_saturated = false;
};

// Full low-level policy: target lengths -> PD forces -> activation targets
// -> controls. `dt` is the interval after which the activation target should
// be reached, i.e. the control period of the caller.
inline ControlDecision low_level_controls(const ModelSpec& spec,
                                          const BodyState& state,
                                          const Vector6& target_joints,
                                          const PdGains& gains, double dt) {
  const Vector18 targets = target_muscle_lengths(spec, target_joints);
  const Vector18 lengths = muscle_lengths(spec, state.q);
  const Vector18 velocities = muscle_velocities(spec, state.qd);

  ControlDecision decision;
  for (int m = 0; m < kNumMuscles; ++m) {
    const MuscleParams& p = spec.muscles[m];
    const double desired = muscle_pd(targets[m], lengths[m], velocities[m],
                                     gains, p.length_range());
    const ActivationDemand demand =
        activation_for_force(p, lengths[m], velocities[m], -desired);
    decision.any_saturated |= demand.saturated;
    decision.controls[m] =
        control_for_activation(state.activation[m], demand.activation, dt);
  }
  return decision;
}

}  // namespace stance
