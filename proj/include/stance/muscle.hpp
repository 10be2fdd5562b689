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
#include <cmath>

namespace stance {

// Hill-type muscle-tendon unit with a rigid tendon. Fiber lengths and
// velocities are normalized by the optimal fiber length; tension is the
// product of the active/passive gains and the maximum isometric force.

struct MuscleParams {
  double f_max = 1000.0;       // maximum isometric force [N]
  double l_opt = 0.1;          // optimal fiber length [m]
  double l_min = 0.5;          // normalized operating range
  double l_max = 1.5;
  double v_max = 10.0;         // maximum shortening rate [l_opt / s]
  double injury_factor = 1.0;  // force capacity scale in [0, 1]

  double length_range() const { return l_max - l_min; }
};

struct MuscleState {
  double activation = 0.0;
  double norm_length = 1.0;    // fiber length / l_opt
  double norm_velocity = 0.0;  // d(norm_length)/dt, shortening negative
};

inline constexpr double kForceLengthWidth = 0.45;
inline constexpr double kPassiveScale = 0.5;
inline constexpr double kActivationTimeConstant = 0.010;    // [s]
inline constexpr double kDeactivationTimeConstant = 0.040;  // [s]
inline constexpr double kInverseGainEpsilon = 1e-6;

// Active force-length gain: Gaussian bump peaking at the optimal length.
inline double active_force_length(double norm_length) {
  const double d = (norm_length - 1.0) / kForceLengthWidth;
  return std::exp(-d * d);
}

// Force-velocity gain. The argument is fiber velocity over v_max:
// zero force at maximal shortening, one isometric, 1.4 asymptote eccentric.
inline double force_velocity(double velocity_ratio) {
  if (velocity_ratio <= -1.0) return 0.0;
  if (velocity_ratio <= 0.0) {
    return (1.0 + velocity_ratio) / (1.0 - 4.0 * velocity_ratio);
  }
  return (1.0 + 5.6 * velocity_ratio) / (1.0 + 4.0 * velocity_ratio);
}

// Passive elastic gain; zero at or below the optimal length.
inline double passive_force(double norm_length) {
  const double s = std::max(0.0, (norm_length - 1.0) / kPassiveScale);
  return s * s;
}

// Tension produced by the unit [N]. Always >= 0: muscles only pull.
inline double muscle_force(const MuscleParams& p, const MuscleState& s) {
  const double gain = active_force_length(s.norm_length) *
                      force_velocity(s.norm_velocity / p.v_max);
  return p.injury_factor * p.f_max *
         (gain * s.activation + passive_force(s.norm_length));
}

// Millard-style asymmetric time constant: activation quickens and
// deactivation slows as activation rises.
inline double activation_time_constant(double u, double activation) {
  const double shape = 0.5 + 1.5 * activation;
  return u > activation ? kActivationTimeConstant * shape
                        : kDeactivationTimeConstant / shape;
}

// One explicit Euler step of the first-order activation dynamics,
// clamped to the physical range.
inline double step_activation(double activation, double u, double dt) {
  const double tau = activation_time_constant(u, activation);
  const double next = activation + dt * (u - activation) / tau;
  return std::clamp(next, 0.0, 1.0);
}

struct ActivationDemand {
  double activation = 0.0;
  // The force-length/velocity gain was too small to invert through; the
  // demanded tension cannot be produced at this fiber state.
  bool saturated = false;
};

// Closed-form inverse of muscle_force in the activation argument:
// the activation that reproduces `tension` at the given fiber state,
// clamped to [0, 1].
inline ActivationDemand activation_for_force(const MuscleParams& p,
                                             double norm_length,
                                             double norm_velocity,
                                             double tension) {
  const double gain = active_force_length(norm_length) *
                      force_velocity(norm_velocity / p.v_max);
  const double capacity = p.injury_factor * p.f_max;
  if (gain <= kInverseGainEpsilon || capacity <= 0.0) {
    return {0.0, true};
  }
  const double active = tension / capacity - passive_force(norm_length);
  return {std::clamp(active / gain, 0.0, 1.0), false};
}

// Closed-form inverse of step_activation in the control argument: the
// control that lands on `target` after one Euler step of length dt.
// Unreachable targets clamp to the [0, 1] control bounds.
inline double control_for_activation(double activation, double target,
                                     double dt) {
  if (target == activation) return activation;
  // Same branch step_activation will take: u > activation iff the
  // activation must rise.
  const double shape = 0.5 + 1.5 * activation;
  const double tau = target > activation ? kActivationTimeConstant * shape
                                         : kDeactivationTimeConstant / shape;
  const double u = activation + tau * (target - activation) / dt;
  return std::clamp(u, 0.0, 1.0);
}

}  // namespace stance
