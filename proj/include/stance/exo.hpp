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

namespace stance {

// Hip exoskeleton torque law: per-side mixture of a hip joint-angle PD and a
// shared pelvis-posture PD, saturated at the actuator torque limit.

struct ExoParams {
  double k_p_joint = 100.0;  // [N m/rad]
  double k_d_joint = 10.0;   // [N m s/rad]
  double k_p_tilt = 300.0;
  double k_d_tilt = 30.0;
  double weight = 0.8;       // mixture in [0, 1]; 1 = pure postural control
  double torque_max = 80.0;  // [N m]
};

// `hip` / `hip_rate` are per-side joint angles and rates; `tilt` is the
// pelvis pitch. Targets come from the high-level planner.
inline std::array<double, 2> exo_torque(const ExoParams& p,
                                        const std::array<double, 2>& hip,
                                        const std::array<double, 2>& hip_rate,
                                        double tilt, double tilt_rate,
                                        const std::array<double, 2>& hip_target,
                                        double tilt_target) {
  const double postural = p.k_p_tilt * (tilt_target - tilt) +
                          p.k_d_tilt * (0.0 - tilt_rate);
  std::array<double, 2> torque{};
  for (int side = 0; side < 2; ++side) {
    const double joint = p.k_p_joint * (hip_target[side] - hip[side]) +
                         p.k_d_joint * (0.0 - hip_rate[side]);
    const double mixed = (1.0 - p.weight) * joint + p.weight * postural;
    torque[side] = std::clamp(mixed, -p.torque_max, p.torque_max);
  }
  return torque;
}

}  // namespace stance
