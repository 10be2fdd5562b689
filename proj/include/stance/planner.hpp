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
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "stance/biped.hpp"
#include "stance/cost.hpp"
#include "stance/exo.hpp"
#include "stance/lowctl.hpp"
#include "stance/parallel.hpp"
#include "stance/rng.hpp"
#include "stance/trial_log.hpp"
#include "stance/types.hpp"

namespace stance {

// High-level planner: MPPI over target joint angles. Each planning event
// samples candidate targets from a per-joint Gaussian, scores them with
// short closed-loop rollouts of the low-level controller, and refits the
// distribution to an exponentially weighted elite set.

struct TargetDistribution {
  std::vector<double> mu;
  std::vector<double> sigma;
};

struct PlannerConfig {
  int particles = 16;
  int horizon = 32;        // rollout length [control steps]
  int iterations = 2;      // distribution updates per planning event
  int elites = 4;
  double lambda = 30.0;    // softmax temperature, on the horizon-sum scale
  int execute_steps = 10;  // control steps between planning events
  double sigma_init = 0.15;   // [rad]
  double sigma_floor = 0.01;  // keeps exploration alive after updates
  bool sample_execution = true;  // draw the executed target vs. use the mean
  bool random_baseline = false;  // sample targets from the prior, no updates
  int threads = 1;
};

// Everything a rollout needs besides the state: the plant, the controllers,
// the cost, and the timing of the control loop.
struct Scenario {
  ModelSpec model;
  PdGains gains;
  CostWeights weights;
  double control_dt = 0.01;  // control period [s]
  int physics_substeps = 10; // physics dt = control_dt / physics_substeps
  int log_stride = 2;        // physics steps per log frame
  std::optional<ExoParams> exo;
  double tilt_target_limit = 0.4;  // [rad], bound on the planned pelvis tilt

  double physics_dt() const { return control_dt / physics_substeps; }
  Vector6 reference_joints() const {
    return model.reference_pose.segment<kNumJoints>(3);
  }
  // Targets are joints plus, with an exoskeleton, one pelvis-tilt entry.
  int target_dim() const { return exo ? kNumJoints + 1 : kNumJoints; }
  double target_min(int d) const {
    return d < kNumJoints ? model.joint_min[d] : -tilt_target_limit;
  }
  double target_max(int d) const {
    return d < kNumJoints ? model.joint_max[d] : tilt_target_limit;
  }

  // Standing objective context, fixed per trial.
  double initial_height = 0.0;

  double cost_of(const BodyState& state) const {
    return cost_components(model, state, reference_joints(), initial_height,
                           weights)
        .total;
  }
};

// A perturbation impulse: constant horizontal force over a time window.
struct PushWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  double force_x = 0.0;
};

inline Vec2 external_force_at(const std::vector<PushWindow>& pushes,
                              double t) {
  for (const PushWindow& w : pushes) {
    if (t >= w.t_start && t < w.t_end) return {w.force_x, 0.0};
  }
  return {0.0, 0.0};
}

inline Vector6 joint_targets_of(const std::vector<double>& targets) {
  Vector6 z;
  for (int j = 0; j < kNumJoints; ++j) z[j] = targets[j];
  return z;
}

// The exo senses pelvis tilt as a forward-positive lean angle; base pitch
// is CCW-positive (backward), so the tilt inputs are negated. A positive
// hip torque then rights a forward-leaning trunk through its reaction.
inline std::array<double, 2> exo_torque_for(const Scenario& scenario,
                                            const BodyState& state,
                                            const std::vector<double>& targets) {
  if (!scenario.exo) return {0.0, 0.0};
  return exo_torque(*scenario.exo, {state.q[kHipL], state.q[kHipR]},
                    {state.qd[kHipL], state.qd[kHipR]}, -state.q[kBasePitch],
                    -state.qd[kBasePitch], {targets[0], targets[3]},
                    targets[kNumJoints]);
}

// Advances one control step: one low-level control decision held over the
// physics substeps. Returns the logged frames if `log` is given.
inline BodyState control_step(const Scenario& scenario, BodyState state,
                              const std::vector<double>& targets,
                              const std::vector<PushWindow>& pushes,
                              TrialLog* log = nullptr, long* phys_steps = nullptr) {
  const Vector6 joints = joint_targets_of(targets);
  const ControlDecision decision = low_level_controls(
      scenario.model, state, joints, scenario.gains, scenario.control_dt);
  const double dt = scenario.physics_dt();
  for (int s = 0; s < scenario.physics_substeps; ++s) {
    const std::array<double, 2> tau = exo_torque_for(scenario, state, targets);
    const Vec2 push = external_force_at(pushes, state.t);
    state = step(scenario.model, state, decision.controls, tau, push, dt);
    if (log != nullptr) {
      ++*phys_steps;
      if (*phys_steps % scenario.log_stride == 0) {
        log->frames.push_back(capture_frame(scenario.model, state));
      }
    }
  }
  return state;
}

// Cumulative standing cost of holding `targets` for `horizon` control steps
// starting from a copy of `state`. A numerical fault makes the candidate
// infinitely bad.
inline double rollout(const Scenario& scenario, const BodyState& state,
                      const std::vector<double>& targets, int horizon) {
  static const std::vector<PushWindow> kNoPushes;
  BodyState s = state;
  double total = 0.0;
  try {
    for (int h = 0; h < horizon; ++h) {
      s = control_step(scenario, s, targets, kNoPushes);
      total += scenario.cost_of(s);
    }
  } catch (const NumericalFault&) {
    return std::numeric_limits<double>::infinity();
  }
  return total;
}

// Refits the target distribution to the k lowest-cost samples with weights
// exp(-(c - c_min) / lambda). Ties are broken by sample index. Samples with
// non-finite cost are discarded; if fewer than k remain all survivors are
// used, and none at all is a planning failure.
inline TargetDistribution mppi_update(
    const std::vector<std::vector<double>>& samples,
    const std::vector<double>& costs, int k, double lambda) {
  const int n = static_cast<int>(samples.size());
  std::vector<int> order;
  order.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(costs[i])) order.push_back(i);
  }
  if (order.empty()) {
    throw PlanningFailure("no rollout produced a finite cost");
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return costs[a] != costs[b] ? costs[a] < costs[b] : a < b;
  });
  const int elites = std::min<int>(k, static_cast<int>(order.size()));
  order.resize(elites);

  const double c_min = costs[order.front()];
  std::vector<double> weights(elites);
  double weight_sum = 0.0;
  for (int e = 0; e < elites; ++e) {
    weights[e] = std::exp(-(costs[order[e]] - c_min) / lambda);
    weight_sum += weights[e];
  }

  const int dim = static_cast<int>(samples[order[0]].size());
  TargetDistribution dist;
  dist.mu.assign(dim, 0.0);
  dist.sigma.assign(dim, 0.0);
  for (int e = 0; e < elites; ++e) {
    for (int d = 0; d < dim; ++d) {
      dist.mu[d] += weights[e] * samples[order[e]][d];
    }
  }
  for (int d = 0; d < dim; ++d) dist.mu[d] /= weight_sum;
  for (int e = 0; e < elites; ++e) {
    for (int d = 0; d < dim; ++d) {
      const double delta = samples[order[e]][d] - dist.mu[d];
      dist.sigma[d] += weights[e] * delta * delta;
    }
  }
  for (int d = 0; d < dim; ++d) {
    dist.sigma[d] = std::sqrt(dist.sigma[d] / weight_sum);
  }
  return dist;
}

// Generic MPPI loop over an arbitrary cost evaluator; the simulator path
// plugs rollouts in, tests can plug synthetic costs.
inline TargetDistribution mppi_optimize(
    const std::function<double(const std::vector<double>&)>& evaluate,
    TargetDistribution dist, const PlannerConfig& cfg,
    const std::function<double(int)>& lower,
    const std::function<double(int)>& upper, Rng& rng, int threads) {
  const int dim = static_cast<int>(dist.mu.size());
  std::vector<std::vector<double>> samples(cfg.particles,
                                           std::vector<double>(dim));
  std::vector<double> costs(cfg.particles);
  for (int it = 0; it < cfg.iterations; ++it) {
    for (int i = 0; i < cfg.particles; ++i) {
      for (int d = 0; d < dim; ++d) {
        samples[i][d] = std::clamp(rng.normal(dist.mu[d], dist.sigma[d]),
                                   lower(d), upper(d));
      }
    }
    parallel_for(cfg.particles, threads,
                 [&](int i) { costs[i] = evaluate(samples[i]); });
    dist = mppi_update(samples, costs, cfg.elites, cfg.lambda);
    for (int d = 0; d < dim; ++d) {
      dist.mu[d] = std::clamp(dist.mu[d], lower(d), upper(d));
      dist.sigma[d] = std::max(dist.sigma[d], cfg.sigma_floor);
    }
  }
  return dist;
}

// One planning event: refines the distribution in place and returns the
// target to execute.
inline std::vector<double> plan(const Scenario& scenario,
                                const BodyState& state,
                                TargetDistribution& dist,
                                const PlannerConfig& cfg, Rng& rng) {
  const auto lower = [&](int d) { return scenario.target_min(d); };
  const auto upper = [&](int d) { return scenario.target_max(d); };
  if (!cfg.random_baseline) {
    dist = mppi_optimize(
        [&](const std::vector<double>& targets) {
          return rollout(scenario, state, targets, cfg.horizon);
        },
        dist, cfg, lower, upper, rng, cfg.threads);
  }
  std::vector<double> executed(dist.mu);
  if (cfg.sample_execution || cfg.random_baseline) {
    for (size_t d = 0; d < executed.size(); ++d) {
      executed[d] = std::clamp(rng.normal(dist.mu[d], dist.sigma[d]),
                               lower(static_cast<int>(d)),
                               upper(static_cast<int>(d)));
    }
  }
  return executed;
}

struct TrialResult {
  TrialLog log;
  std::vector<std::array<double, kNumMuscles>> controls;
  double total_cost = 0.0;
  int planning_events = 0;
  bool fault = false;
  bool planning_failure = false;
  std::string fault_message;
};

// Full closed-loop trial: replan every execute_steps control steps, run the
// low-level controller in between, log at the sampling rate. A numerical
// fault or planning failure ends the trial early and is flagged in the log.
inline TrialResult run_closed_loop(Scenario scenario, const BodyState& initial,
                                   int control_steps, const PlannerConfig& cfg,
                                   Rng& rng,
                                   const std::vector<PushWindow>& pushes = {}) {
  scenario.initial_height = [&] {
    const Kinematics k = forward_kinematics(scenario.model, initial.q);
    return k.head.z -
           0.25 * (k.heel[0].z + k.toe[0].z + k.heel[1].z + k.toe[1].z);
  }();

  TrialResult result;
  result.log.log_dt = scenario.physics_dt() * scenario.log_stride;
  result.log.frames.push_back(capture_frame(scenario.model, initial));

  TargetDistribution dist;
  dist.mu.assign(scenario.target_dim(), 0.0);
  dist.sigma.assign(scenario.target_dim(), cfg.sigma_init);
  const Vector6 reference = scenario.reference_joints();
  for (int j = 0; j < kNumJoints; ++j) dist.mu[j] = reference[j];

  BodyState state = initial;
  std::vector<double> executed = dist.mu;
  long phys_steps = 0;
  try {
    for (int t = 0; t < control_steps; ++t) {
      if (t % cfg.execute_steps == 0) {
        // Carry the mean between events; exploration restarts wide.
        dist.sigma.assign(scenario.target_dim(), cfg.sigma_init);
        executed = plan(scenario, state, dist, cfg, rng);
        ++result.planning_events;
      }
      const Vector6 joints = joint_targets_of(executed);
      const ControlDecision decision =
          low_level_controls(scenario.model, state, joints, scenario.gains,
                             scenario.control_dt);
      result.controls.push_back(decision.controls);
      const double dt = scenario.physics_dt();
      for (int s = 0; s < scenario.physics_substeps; ++s) {
        const std::array<double, 2> tau =
            exo_torque_for(scenario, state, executed);
        const Vec2 push = external_force_at(pushes, state.t);
        state = step(scenario.model, state, decision.controls, tau, push, dt);
        ++phys_steps;
        if (phys_steps % scenario.log_stride == 0) {
          result.log.frames.push_back(capture_frame(scenario.model, state));
        }
      }
      result.total_cost += scenario.cost_of(state);
    }
  } catch (const NumericalFault& fault) {
    result.fault = true;
    result.fault_message = fault.what();
  } catch (const PlanningFailure& failure) {
    result.fault = true;
    result.planning_failure = true;
    result.fault_message = failure.what();
  }
  result.log.fault = result.fault;
  result.log.fault_message = result.fault_message;
  return result;
}

}  // namespace stance
