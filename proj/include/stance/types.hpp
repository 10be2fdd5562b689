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
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace stance {

// Sagittal-plane biped: planar floating base (x, z, pitch) plus
// hip/knee/ankle revolute joints on each leg.
inline constexpr int kNumDof = 9;
inline constexpr int kNumJoints = 6;
inline constexpr int kMusclesPerLeg = 9;
inline constexpr int kNumMuscles = 2 * kMusclesPerLeg;
inline constexpr int kNumBodies = 7;

using Vector6 = Eigen::Matrix<double, kNumJoints, 1>;
using Vector9 = Eigen::Matrix<double, kNumDof, 1>;
using Vector18 = Eigen::Matrix<double, kNumMuscles, 1>;
using Matrix9 = Eigen::Matrix<double, kNumDof, kNumDof>;
using MomentArmMatrix = Eigen::Matrix<double, kNumMuscles, kNumJoints>;

enum Dof {
  kBaseX = 0,
  kBaseZ,
  kBasePitch,
  kHipL,
  kKneeL,
  kAnkleL,
  kHipR,
  kKneeR,
  kAnkleR,
};

enum Body {
  kTorso = 0,
  kThighL,
  kShankL,
  kFootL,
  kThighR,
  kShankR,
  kFootR,
};

enum Side { kLeft = 0, kRight = 1 };

// Joint index within one leg; global joint index is 3 * side + leg joint.
enum LegJoint { kHip = 0, kKnee = 1, kAnkle = 2 };

// 2D vector in the sagittal plane, x anterior, z up.
struct Vec2 {
  double x = 0.0;
  double z = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, z + o.z}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, z - o.z}; }
  Vec2 operator*(double s) const { return {x * s, z * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    z += o.z;
    return *this;
  }
  double dot(const Vec2& o) const { return x * o.x + z * o.z; }
  double norm() const { return std::sqrt(x * x + z * z); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Derivative of a CCW rotation: rotates a vector by +90 degrees.
inline Vec2 perp(const Vec2& v) { return {-v.z, v.x}; }

// Rotates a point expressed in a body frame by the body's absolute angle.
inline Vec2 rotate(double angle, const Vec2& p) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {p.x * c - p.z * s, p.x * s + p.z * c};
}

// Simulation produced a non-finite or runaway state; the trial is aborted
// and recorded as a numerical fault.
struct NumericalFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every rollout of a planning iteration failed; no update is possible.
struct PlanningFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace stance
