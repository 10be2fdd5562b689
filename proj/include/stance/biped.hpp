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

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "stance/muscle.hpp"
#include "stance/types.hpp"

namespace stance {

// Reduced sagittal-plane musculoskeletal biped: a lumped torso (head and
// arms included) on two three-segment legs, actuated by nine muscles per
// leg through constant moment arms. Ground contact is a spring-damper
// penalty at the heels and toes, with extra fall-landmark points on the
// knees, pelvis and torso that only matter when the model goes down.

struct SegmentParams {
  double mass = 0.0;        // [kg]
  double length = 0.0;      // proximal joint to distal joint [m]
  double com_offset = 0.0;  // CoM distance from the proximal joint [m]
  double inertia = 0.0;     // about the segment CoM [kg m^2]
};

struct FootGeometry {
  double mass = 0.0;
  double inertia = 0.0;
  double heel_x = 0.0;     // sole extent relative to the ankle [m]
  double toe_x = 0.0;
  double sole_drop = 0.0;  // ankle height above the sole [m]
  double com_x = 0.0;      // CoM offset from the ankle, foot frame
  double com_drop = 0.0;
};

struct ContactParams {
  double stiffness = 5.0e4;       // [N/m] per point
  double damping = 500.0;         // [N s/m] per point
  double friction_mu = 0.9;
  double friction_ref_vel = 0.02;  // tanh regularization scale [m/s]
};

enum MuscleRole {
  kHipFlexor = 0,
  kHipExtensor,
  kKneeExtensor,
  kKneeFlexor,
  kDorsiflexor,
  kSoleus,
  kRectusFemoris,
  kGastrocnemius,
  kHamstrings,
};

inline const char* muscle_role_name(int role) {
  static const char* kNames[kMusclesPerLeg] = {
      "hip_flexor",   "hip_extensor", "knee_extensor",
      "knee_flexor",  "dorsiflexor",  "soleus",
      "rectus_femoris", "gastrocnemius", "hamstrings"};
  return kNames[role];
}

inline std::string muscle_name(int index) {
  const char* side = index < kMusclesPerLeg ? "left_" : "right_";
  return std::string(side) + muscle_role_name(index % kMusclesPerLeg);
}

// Returns -1 when the name is unknown.
inline int muscle_index(const std::string& name) {
  for (int m = 0; m < kNumMuscles; ++m) {
    if (muscle_name(m) == name) return m;
  }
  return -1;
}

struct ModelSpec {
  SegmentParams torso;
  SegmentParams thigh;  // legs are left/right symmetric
  SegmentParams shank;
  FootGeometry foot;

  std::array<MuscleParams, kNumMuscles> muscles{};
  // moment_arms(m, j) [m]: tension in muscle m produces joint torque
  // moment_arms(m, j) * tension at joint j, and a positive entry means the
  // muscle shortens as the joint angle increases.
  MomentArmMatrix moment_arms = MomentArmMatrix::Zero();

  Vector6 joint_min = Vector6::Zero();
  Vector6 joint_max = Vector6::Zero();
  double joint_damping = 1.5;       // [N m s/rad]
  double limit_stiffness = 300.0;   // [N m/rad] one-sided beyond the limits
  double limit_damping = 10.0;

  ContactParams contact;
  double gravity = 9.81;

  // Natural standing pose; the joint part is the origin of the muscle
  // length map (all normalized lengths are 1 here).
  Vector9 reference_pose = Vector9::Zero();

  double total_mass() const {
    return torso.mass + 2.0 * (thigh.mass + shank.mass + foot.mass);
  }
};

struct BodyState {
  Vector9 q = Vector9::Zero();
  Vector9 qd = Vector9::Zero();
  std::array<double, kNumMuscles> activation{};
  double t = 0.0;
};

// ---------------------------------------------------------------------------
// Muscle path geometry: linear in the joint angles with constant moment arms.

inline Vector18 muscle_lengths(const ModelSpec& spec, const Vector9& q) {
  const Vector6 dq =
      q.segment<kNumJoints>(3) - spec.reference_pose.segment<kNumJoints>(3);
  const Vector18 excursion = spec.moment_arms * dq;
  Vector18 lengths;
  for (int m = 0; m < kNumMuscles; ++m) {
    lengths[m] = 1.0 - excursion[m] / spec.muscles[m].l_opt;
  }
  return lengths;
}

inline Vector18 muscle_velocities(const ModelSpec& spec, const Vector9& qd) {
  const Vector18 rate = spec.moment_arms * qd.segment<kNumJoints>(3);
  Vector18 velocities;
  for (int m = 0; m < kNumMuscles; ++m) {
    velocities[m] = -rate[m] / spec.muscles[m].l_opt;
  }
  return velocities;
}

inline MuscleState muscle_state(const ModelSpec& spec, const BodyState& state,
                                int m) {
  const Vector18 l = muscle_lengths(spec, state.q);
  const Vector18 v = muscle_velocities(spec, state.qd);
  return {state.activation[m], l[m], v[m]};
}

// Tensions of all muscle-tendon units at the given state [N].
inline Vector18 muscle_forces(const ModelSpec& spec, const BodyState& state) {
  const Vector18 l = muscle_lengths(spec, state.q);
  const Vector18 v = muscle_velocities(spec, state.qd);
  Vector18 f;
  for (int m = 0; m < kNumMuscles; ++m) {
    f[m] = muscle_force(spec.muscles[m], {state.activation[m], l[m], v[m]});
  }
  return f;
}

// Generalized torques on the six joints produced by the given tensions.
inline Vector6 muscle_joint_torques(const ModelSpec& spec,
                                    const Vector18& tensions) {
  return spec.moment_arms.transpose() * tensions;
}

// ---------------------------------------------------------------------------
// Forward kinematics. Absolute angles are CCW in the x-z plane; at zero
// angles the torso points up, the legs point down and the feet lie flat.

struct Kinematics {
  Vec2 pelvis;
  double pitch = 0.0;
  std::array<Vec2, 2> knee, ankle, heel, toe;
  Vec2 head, torso_mid;
  std::array<Vec2, kNumBodies> com;
  std::array<double, kNumBodies> angle{};
};

inline Kinematics forward_kinematics(const ModelSpec& spec, const Vector9& q) {
  Kinematics k;
  k.pelvis = {q[kBaseX], q[kBaseZ]};
  k.pitch = q[kBasePitch];

  k.angle[kTorso] = k.pitch;
  k.com[kTorso] = k.pelvis + rotate(k.pitch, {0.0, spec.torso.com_offset});
  k.head = k.pelvis + rotate(k.pitch, {0.0, spec.torso.length});
  k.torso_mid = k.pelvis + rotate(k.pitch, {0.0, 0.5 * spec.torso.length});

  for (int s = 0; s < 2; ++s) {
    const int hip = 3 + 3 * s;
    const int thigh_body = s == 0 ? kThighL : kThighR;
    const double phi_thigh = k.pitch + q[hip];
    const double phi_shank = phi_thigh + q[hip + 1];
    const double phi_foot = phi_shank + q[hip + 2];

    k.angle[thigh_body] = phi_thigh;
    k.angle[thigh_body + 1] = phi_shank;
    k.angle[thigh_body + 2] = phi_foot;

    k.knee[s] = k.pelvis + rotate(phi_thigh, {0.0, -spec.thigh.length});
    k.com[thigh_body] =
        k.pelvis + rotate(phi_thigh, {0.0, -spec.thigh.com_offset});
    k.ankle[s] = k.knee[s] + rotate(phi_shank, {0.0, -spec.shank.length});
    k.com[thigh_body + 1] =
        k.knee[s] + rotate(phi_shank, {0.0, -spec.shank.com_offset});
    k.heel[s] = k.ankle[s] +
                rotate(phi_foot, {spec.foot.heel_x, -spec.foot.sole_drop});
    k.toe[s] = k.ankle[s] +
               rotate(phi_foot, {spec.foot.toe_x, -spec.foot.sole_drop});
    k.com[thigh_body + 2] =
        k.ankle[s] + rotate(phi_foot, {spec.foot.com_x, -spec.foot.com_drop});
  }
  return k;
}

// Revolute chains: which angle dofs move a point on each body, and the
// pivot each one rotates about.
enum Anchor {
  kAnchorPelvis = 0,
  kAnchorKneeL,
  kAnchorAnkleL,
  kAnchorKneeR,
  kAnchorAnkleR,
};

struct BodyDof {
  int dof;
  int anchor;
};

struct BodyChain {
  int count;
  BodyDof dofs[4];
};

inline constexpr BodyChain kChains[kNumBodies] = {
    {1, {{kBasePitch, kAnchorPelvis}}},
    {2, {{kBasePitch, kAnchorPelvis}, {kHipL, kAnchorPelvis}}},
    {3,
     {{kBasePitch, kAnchorPelvis},
      {kHipL, kAnchorPelvis},
      {kKneeL, kAnchorKneeL}}},
    {4,
     {{kBasePitch, kAnchorPelvis},
      {kHipL, kAnchorPelvis},
      {kKneeL, kAnchorKneeL},
      {kAnkleL, kAnchorAnkleL}}},
    {2, {{kBasePitch, kAnchorPelvis}, {kHipR, kAnchorPelvis}}},
    {3,
     {{kBasePitch, kAnchorPelvis},
      {kHipR, kAnchorPelvis},
      {kKneeR, kAnchorKneeR}}},
    {4,
     {{kBasePitch, kAnchorPelvis},
      {kHipR, kAnchorPelvis},
      {kKneeR, kAnchorKneeR},
      {kAnkleR, kAnchorAnkleR}}},
};

inline Vec2 anchor_position(const Kinematics& k, int anchor) {
  switch (anchor) {
    case kAnchorPelvis: return k.pelvis;
    case kAnchorKneeL: return k.knee[0];
    case kAnchorAnkleL: return k.ankle[0];
    case kAnchorKneeR: return k.knee[1];
    default: return k.ankle[1];
  }
}

struct AnchorVelocities {
  std::array<Vec2, 5> v;
};

inline AnchorVelocities anchor_velocities(const Kinematics& k,
                                          const Vector9& qd) {
  AnchorVelocities av;
  const Vec2 base_vel{qd[kBaseX], qd[kBaseZ]};
  av.v[kAnchorPelvis] = base_vel;
  for (int s = 0; s < 2; ++s) {
    const int hip = 3 + 3 * s;
    const Vec2 knee = s == 0 ? k.knee[0] : k.knee[1];
    const Vec2 ankle = s == 0 ? k.ankle[0] : k.ankle[1];
    const double w_thigh = qd[kBasePitch] + qd[hip];
    const Vec2 v_knee = base_vel + w_thigh * perp(knee - k.pelvis);
    const Vec2 v_ankle = base_vel + w_thigh * perp(ankle - k.pelvis) +
                         qd[hip + 1] * perp(ankle - knee);
    av.v[s == 0 ? kAnchorKneeL : kAnchorKneeR] = v_knee;
    av.v[s == 0 ? kAnchorAnkleL : kAnchorAnkleR] = v_ankle;
  }
  return av;
}

// World velocity of a point carried by `body`.
inline Vec2 point_velocity(const Kinematics& k, const Vector9& qd, int body,
                           const Vec2& p) {
  Vec2 v{qd[kBaseX], qd[kBaseZ]};
  const BodyChain& chain = kChains[body];
  for (int i = 0; i < chain.count; ++i) {
    v += qd[chain.dofs[i].dof] *
         perp(p - anchor_position(k, chain.dofs[i].anchor));
  }
  return v;
}

// Acceleration of a point moving with velocity `p_vel` on `body`, with all
// generalized accelerations frozen at zero (the velocity-product term of
// the equations of motion).
inline Vec2 point_bias_acceleration(const AnchorVelocities& av,
                                    const Vector9& qd, int body,
                                    const Vec2& p_vel) {
  Vec2 a{0.0, 0.0};
  const BodyChain& chain = kChains[body];
  for (int i = 0; i < chain.count; ++i) {
    a += qd[chain.dofs[i].dof] * perp(p_vel - av.v[chain.dofs[i].anchor]);
  }
  return a;
}

inline double body_angular_velocity(const Vector9& qd, int body) {
  double w = 0.0;
  const BodyChain& chain = kChains[body];
  for (int i = 0; i < chain.count; ++i) w += qd[chain.dofs[i].dof];
  return w;
}

inline double body_mass(const ModelSpec& spec, int body) {
  switch (body) {
    case kTorso: return spec.torso.mass;
    case kThighL:
    case kThighR: return spec.thigh.mass;
    case kShankL:
    case kShankR: return spec.shank.mass;
    default: return spec.foot.mass;
  }
}

inline double body_inertia(const ModelSpec& spec, int body) {
  switch (body) {
    case kTorso: return spec.torso.inertia;
    case kThighL:
    case kThighR: return spec.thigh.inertia;
    case kShankL:
    case kShankR: return spec.shank.inertia;
    default: return spec.foot.inertia;
  }
}

// ---------------------------------------------------------------------------
// Whole-body center of mass.

inline Vec2 com(const ModelSpec& spec, const BodyState& state) {
  const Kinematics k = forward_kinematics(spec, state.q);
  Vec2 weighted{0.0, 0.0};
  for (int b = 0; b < kNumBodies; ++b) {
    weighted += body_mass(spec, b) * k.com[b];
  }
  return weighted * (1.0 / spec.total_mass());
}

inline Vec2 com_velocity(const ModelSpec& spec, const BodyState& state) {
  const Kinematics k = forward_kinematics(spec, state.q);
  Vec2 weighted{0.0, 0.0};
  for (int b = 0; b < kNumBodies; ++b) {
    weighted +=
        body_mass(spec, b) * point_velocity(k, state.qd, b, k.com[b]);
  }
  return weighted * (1.0 / spec.total_mass());
}

// Kinetic plus gravitational potential energy.
inline double mechanical_energy(const ModelSpec& spec, const BodyState& state) {
  const Kinematics k = forward_kinematics(spec, state.q);
  double e = 0.0;
  for (int b = 0; b < kNumBodies; ++b) {
    const Vec2 v = point_velocity(k, state.qd, b, k.com[b]);
    const double w = body_angular_velocity(state.qd, b);
    e += 0.5 * body_mass(spec, b) * v.dot(v) +
         0.5 * body_inertia(spec, b) * w * w +
         body_mass(spec, b) * spec.gravity * k.com[b].z;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Ground contact. The ground is the plane z = 0.

enum ContactPointId {
  kHeelLPoint = 0,
  kToeLPoint,
  kHeelRPoint,
  kToeRPoint,
  kKneeLPoint,
  kKneeRPoint,
  kPelvisPoint,
  kTorsoMidPoint,
  kHeadPoint,
  kNumContactPoints,
};

inline bool is_foot_point(int id) { return id < 4; }

inline const char* contact_point_name(int id) {
  static const char* kNames[kNumContactPoints] = {
      "heel_l", "toe_l", "heel_r", "toe_r",    "knee_l",
      "knee_r", "pelvis", "torso_mid", "head"};
  return kNames[id];
}

inline int contact_point_body(int id) {
  switch (id) {
    case kHeelLPoint:
    case kToeLPoint: return kFootL;
    case kHeelRPoint:
    case kToeRPoint: return kFootR;
    case kKneeLPoint: return kShankL;
    case kKneeRPoint: return kShankR;
    default: return kTorso;
  }
}

inline Vec2 contact_point_position(const Kinematics& k, int id) {
  switch (id) {
    case kHeelLPoint: return k.heel[0];
    case kToeLPoint: return k.toe[0];
    case kHeelRPoint: return k.heel[1];
    case kToeRPoint: return k.toe[1];
    case kKneeLPoint: return k.knee[0];
    case kKneeRPoint: return k.knee[1];
    case kPelvisPoint: return k.pelvis;
    case kTorsoMidPoint: return k.torso_mid;
    default: return k.head;
  }
}

struct ContactPointState {
  int id = 0;
  Vec2 pos;
  Vec2 vel;
  double penetration = 0.0;   // [m], positive below the ground
  double normal_force = 0.0;  // [N], >= 0
  double tangent_force = 0.0;
};

inline ContactPointState contact_point_state(const ModelSpec& spec,
                                             const Kinematics& k,
                                             const Vector9& qd, int id) {
  ContactPointState c;
  c.id = id;
  c.pos = contact_point_position(k, id);
  c.vel = point_velocity(k, qd, contact_point_body(id), c.pos);
  c.penetration = -c.pos.z;
  if (c.penetration > 0.0) {
    const ContactParams& p = spec.contact;
    c.normal_force =
        std::max(0.0, p.stiffness * c.penetration - p.damping * c.vel.z);
    c.tangent_force = -p.friction_mu * c.normal_force *
                      std::tanh(c.vel.x / p.friction_ref_vel);
  }
  return c;
}

inline std::array<ContactPointState, kNumContactPoints> contact_points(
    const ModelSpec& spec, const BodyState& state) {
  const Kinematics k = forward_kinematics(spec, state.q);
  std::array<ContactPointState, kNumContactPoints> points;
  for (int id = 0; id < kNumContactPoints; ++id) {
    points[id] = contact_point_state(spec, k, state.qd, id);
  }
  return points;
}

// Support interval: hull of the x coordinates of the heel/toe points
// currently touching the ground. Empty (nullopt) when airborne.
inline std::optional<std::pair<double, double>> support_interval(
    const ModelSpec& spec, const BodyState& state) {
  const Kinematics k = forward_kinematics(spec, state.q);
  bool any = false;
  double lo = 0.0, hi = 0.0;
  for (int id = 0; id < 4; ++id) {
    const Vec2 p = contact_point_position(k, id);
    if (-p.z > 0.0) {
      if (!any) {
        lo = hi = p.x;
        any = true;
      } else {
        lo = std::min(lo, p.x);
        hi = std::max(hi, p.x);
      }
    }
  }
  if (!any) return std::nullopt;
  return std::make_pair(lo, hi);
}

// ---------------------------------------------------------------------------
// Dynamics step.

namespace detail {

// Accumulates the generalized effect of a force applied at a world point.
inline void add_point_force(const Kinematics& k, int body, const Vec2& p,
                            const Vec2& force, Vector9& rhs) {
  rhs[kBaseX] += force.x;
  rhs[kBaseZ] += force.z;
  const BodyChain& chain = kChains[body];
  for (int i = 0; i < chain.count; ++i) {
    const Vec2 col = perp(p - anchor_position(k, chain.dofs[i].anchor));
    rhs[chain.dofs[i].dof] += col.dot(force);
  }
}

}  // namespace detail

// Advances the state by one physics step of length dt under the given muscle
// controls, exoskeleton hip torques [N m] and external force at the torso CoM
// [N]. Throws NumericalFault if the state stops being finite.
inline BodyState step(const ModelSpec& spec, const BodyState& state,
                      const std::array<double, kNumMuscles>& controls,
                      const std::array<double, 2>& exo_torque,
                      const Vec2& external_force, double dt) {
  // Activation dynamics, then tensions at the current configuration.
  const Vector18 lengths = muscle_lengths(spec, state.q);
  const Vector18 velocities = muscle_velocities(spec, state.qd);
  std::array<double, kNumMuscles> activation = state.activation;
  Vector18 tensions;
  for (int m = 0; m < kNumMuscles; ++m) {
    const double u = std::clamp(controls[m], 0.0, 1.0);
    activation[m] = step_activation(activation[m], u, dt);
    tensions[m] = muscle_force(spec.muscles[m],
                               {activation[m], lengths[m], velocities[m]});
  }

  const Kinematics kin = forward_kinematics(spec, state.q);
  const AnchorVelocities av = anchor_velocities(kin, state.qd);

  Matrix9 mass = Matrix9::Zero();
  Vector9 rhs = Vector9::Zero();

  for (int b = 0; b < kNumBodies; ++b) {
    const double m = body_mass(spec, b);
    const double inertia = body_inertia(spec, b);
    const BodyChain& chain = kChains[b];

    // Jacobian columns of the body CoM: identity for the base translations
    // plus one lever arm per revolute dof in the chain.
    Vec2 cols[6];
    int dof_index[6];
    cols[0] = {1.0, 0.0};
    dof_index[0] = kBaseX;
    cols[1] = {0.0, 1.0};
    dof_index[1] = kBaseZ;
    int n = 2;
    for (int i = 0; i < chain.count; ++i) {
      cols[n] = perp(kin.com[b] - anchor_position(kin, chain.dofs[i].anchor));
      dof_index[n] = chain.dofs[i].dof;
      ++n;
    }

    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        mass(dof_index[i], dof_index[j]) += m * cols[i].dot(cols[j]);
      }
    }
    // Rotational inertia: the angular velocity is the plain sum of the
    // chain's angle rates, so the weight vector is 0/1.
    for (int i = 0; i < chain.count; ++i) {
      for (int j = 0; j < chain.count; ++j) {
        mass(chain.dofs[i].dof, chain.dofs[j].dof) += inertia;
      }
    }

    // Gravity and the velocity-product bias.
    const Vec2 v_com = point_velocity(kin, state.qd, b, kin.com[b]);
    const Vec2 bias = point_bias_acceleration(av, state.qd, b, v_com);
    const Vec2 gravity{0.0, -m * spec.gravity};
    for (int i = 0; i < n; ++i) {
      rhs[dof_index[i]] += cols[i].dot(gravity) - m * cols[i].dot(bias);
    }
  }

  // Muscle tensions act on the joints through the constant moment arms.
  rhs.segment<kNumJoints>(3) += muscle_joint_torques(spec, tensions);

  // Exoskeleton hip torques and the external perturbation at the torso CoM.
  rhs[kHipL] += exo_torque[0];
  rhs[kHipR] += exo_torque[1];
  if (external_force.x != 0.0 || external_force.z != 0.0) {
    detail::add_point_force(kin, kTorso, kin.com[kTorso], external_force, rhs);
  }

  // Ground contact.
  for (int id = 0; id < kNumContactPoints; ++id) {
    const ContactPointState c = contact_point_state(spec, kin, state.qd, id);
    if (c.normal_force > 0.0 || c.tangent_force != 0.0) {
      detail::add_point_force(kin, contact_point_body(id), c.pos,
                              {c.tangent_force, c.normal_force}, rhs);
    }
  }

  // Joint limit springs; the damping terms are handled implicitly below so
  // stiff damping on light segments cannot destabilize the integration.
  Vector9 damping = Vector9::Zero();
  for (int j = 0; j < kNumJoints; ++j) {
    const int dof = 3 + j;
    damping[dof] = spec.joint_damping;
    if (state.q[dof] < spec.joint_min[j]) {
      rhs[dof] += spec.limit_stiffness * (spec.joint_min[j] - state.q[dof]);
      damping[dof] += spec.limit_damping;
    } else if (state.q[dof] > spec.joint_max[j]) {
      rhs[dof] += spec.limit_stiffness * (spec.joint_max[j] - state.q[dof]);
      damping[dof] += spec.limit_damping;
    }
  }

  // Semi-implicit Euler with implicit joint damping:
  // (M + dt D) qd' = M qd + dt (Q - c).
  Matrix9 lhs = mass;
  lhs.diagonal() += dt * damping;
  const Vector9 momentum = mass * state.qd + dt * rhs;

  BodyState next;
  next.qd = lhs.llt().solve(momentum);
  next.q = state.q + dt * next.qd;
  next.activation = activation;
  next.t = state.t + dt;

  if (!next.q.allFinite() || !next.qd.allFinite() ||
      next.q.cwiseAbs().maxCoeff() > 1.0e4 ||
      next.qd.cwiseAbs().maxCoeff() > 1.0e5) {
    throw NumericalFault("non-finite or runaway state at t=" +
                         std::to_string(next.t));
  }
  return next;
}

// Restricts the force-generating capacity of one muscle; all other
// parameters are untouched. Throws on unknown names or factors outside
// [0, 1].
inline ModelSpec apply_injury(const ModelSpec& spec, const std::string& muscle,
                              double factor) {
  if (factor < 0.0 || factor > 1.0) {
    throw std::invalid_argument("injury factor must be in [0, 1]");
  }
  const int m = muscle_index(muscle);
  if (m < 0) {
    throw std::invalid_argument("unknown muscle: " + muscle);
  }
  ModelSpec injured = spec;
  injured.muscles[m].injury_factor = factor;
  return injured;
}

// ---------------------------------------------------------------------------
// Canonical model: 75 kg / 1.75 m anthropometric defaults.

struct MuscleDefaults {
  double f_max;
  double l_opt;
  // Moment arms on this leg's joints; zero means the muscle does not span
  // the joint.
  double arm_hip;
  double arm_knee;
  double arm_ankle;
};

// Hip actuation sits at the weak end of the physiological range, matching a
// balance-impaired profile: quiet stance is unaffected (ankle-dominated) but
// assistive hip torques are a meaningful fraction of capacity.
inline const std::array<MuscleDefaults, kMusclesPerLeg>& muscle_defaults() {
  static const std::array<MuscleDefaults, kMusclesPerLeg> kTable = {{
      {700.0, 0.12, 0.05, 0.0, 0.0},      // hip_flexor
      {800.0, 0.13, -0.06, 0.0, 0.0},     // hip_extensor
      {5000.0, 0.10, 0.0, 0.04, 0.0},     // knee_extensor
      {1500.0, 0.11, 0.0, -0.035, 0.0},   // knee_flexor
      {1500.0, 0.09, 0.0, 0.0, 0.035},    // dorsiflexor
      {4000.0, 0.06, 0.0, 0.0, -0.05},    // soleus
      {1200.0, 0.11, 0.04, 0.04, 0.0},    // rectus_femoris
      {2500.0, 0.07, 0.0, -0.02, -0.05},  // gastrocnemius
      {800.0, 0.12, -0.055, -0.03, 0.0},  // hamstrings
  }};
  return kTable;
}

// Base height that puts the soles exactly on the ground for a flat-footed
// pose with the given hip and knee angles (pitch zero).
inline double standing_base_height(const ModelSpec& spec, double hip,
                                   double knee) {
  return spec.foot.sole_drop + spec.thigh.length * std::cos(hip) +
         spec.shank.length * std::cos(hip + knee);
}

// Natural standing pose builder: a slight crouch with flat feet and a small
// anterior-posterior stance stagger (left foot forward). The stagger breaks
// the planar model's load-split degeneracy: with coincident feet the
// division of weight between the legs is unobservable to the CoM costs.
inline void set_reference_stance(ModelSpec& spec, double hip, double knee,
                                 double stagger) {
  spec.reference_pose.setZero();
  spec.reference_pose[kBaseZ] = standing_base_height(spec, hip, knee);
  const double reach = spec.thigh.length * std::cos(hip) +
                       spec.shank.length * std::cos(hip + knee);
  const double swing = stagger / std::max(reach, 1e-6);
  for (int s = 0; s < 2; ++s) {
    const double side = s == kLeft ? 1.0 : -1.0;
    const double hip_s = hip + side * swing;
    // The swung leg must keep the same vertical reach so both soles stay on
    // the ground; a short Newton iteration adjusts the knee.
    double knee_s = knee;
    for (int it = 0; it < 4; ++it) {
      const double reach_s = spec.thigh.length * std::cos(hip_s) +
                             spec.shank.length * std::cos(hip_s + knee_s);
      const double slope = -spec.shank.length * std::sin(hip_s + knee_s);
      if (std::abs(slope) < 1e-9) break;
      knee_s -= (reach_s - reach) / slope;
    }
    spec.reference_pose[3 + 3 * s + kHip] = hip_s;
    spec.reference_pose[3 + 3 * s + kKnee] = knee_s;
    // Feet stay flat: the foot angle absorbs the whole-leg rotation.
    spec.reference_pose[3 + 3 * s + kAnkle] = -(hip_s + knee_s);
  }
}

inline ModelSpec default_model() {
  ModelSpec spec;
  spec.torso = {50.85, 0.82, 0.35, 4.0};
  spec.thigh = {7.5, 0.43, 0.186, 0.145};
  spec.shank = {3.49, 0.43, 0.186, 0.059};
  spec.foot = {1.09, 0.015, -0.07, 0.19, 0.068, 0.06, 0.035};

  for (int s = 0; s < 2; ++s) {
    for (int r = 0; r < kMusclesPerLeg; ++r) {
      const MuscleDefaults& d = muscle_defaults()[r];
      const int m = s * kMusclesPerLeg + r;
      spec.muscles[m] = {d.f_max, d.l_opt, 0.5, 1.5, 10.0, 1.0};
      spec.moment_arms(m, 3 * s + kHip) = d.arm_hip;
      spec.moment_arms(m, 3 * s + kKnee) = d.arm_knee;
      spec.moment_arms(m, 3 * s + kAnkle) = d.arm_ankle;
    }
    spec.joint_min[3 * s + kHip] = -0.6;
    spec.joint_max[3 * s + kHip] = 1.9;
    spec.joint_min[3 * s + kKnee] = -2.3;
    spec.joint_max[3 * s + kKnee] = 0.05;
    spec.joint_min[3 * s + kAnkle] = -0.9;
    spec.joint_max[3 * s + kAnkle] = 0.7;
  }

  set_reference_stance(spec, 0.05, -0.30, 0.03);
  return spec;
}

// Structural invariants of a model; throws std::invalid_argument on the
// first violation.
inline void validate_model(const ModelSpec& spec) {
  if (spec.total_mass() <= 0.0) {
    throw std::invalid_argument("total mass must be positive");
  }
  for (int m = 0; m < kNumMuscles; ++m) {
    const MuscleParams& p = spec.muscles[m];
    if (p.f_max <= 0.0) {
      throw std::invalid_argument(muscle_name(m) + ": f_max must be positive");
    }
    if (!(0.0 < p.l_min && p.l_min < 1.0 && 1.0 < p.l_max)) {
      throw std::invalid_argument(muscle_name(m) + ": need l_min < 1 < l_max");
    }
    if (p.v_max <= 0.0) {
      throw std::invalid_argument(muscle_name(m) + ": v_max must be positive");
    }
    if (p.injury_factor < 0.0 || p.injury_factor > 1.0) {
      throw std::invalid_argument(muscle_name(m) + ": injury factor range");
    }
    int spanned = 0;
    for (int j = 0; j < kNumJoints; ++j) {
      const double arm = spec.moment_arms(m, j);
      if (std::abs(arm) > 0.08) {
        throw std::invalid_argument(muscle_name(m) + ": moment arm too large");
      }
      if (arm != 0.0) ++spanned;
    }
    const int role = m % kMusclesPerLeg;
    const bool biarticular = role == kRectusFemoris ||
                             role == kGastrocnemius || role == kHamstrings;
    if (spanned != (biarticular ? 2 : 1)) {
      throw std::invalid_argument(muscle_name(m) +
                                  ": wrong number of spanned joints");
    }
  }
  for (int j = 0; j < kNumJoints; ++j) {
    if (!(spec.joint_min[j] < spec.joint_max[j])) {
      throw std::invalid_argument("joint limits must be ordered");
    }
  }
  if (spec.contact.stiffness <= 0.0 || spec.contact.damping < 0.0) {
    throw std::invalid_argument("contact constants out of range");
  }
}

}  // namespace stance
