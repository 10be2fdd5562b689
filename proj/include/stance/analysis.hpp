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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stance/biped.hpp"
#include "stance/trial_log.hpp"
#include "stance/types.hpp"

namespace stance {

// Balance and fall analytics over trial logs. Everything here is a pure
// function of the log, so re-running analysis on a saved file reproduces
// the outcome exactly.

// Closed on both ends; an empty (absent) support never contains a point.
inline bool point_in_support(
    double x, const std::optional<std::pair<double, double>>& support) {
  return support && x >= support->first && x <= support->second;
}

struct FallRecord {
  std::optional<double> init_event_t;     // CoM first leaves the support
  std::optional<double> contact_event_t;  // peak non-foot ground force
  std::optional<double> fall_duration;
  std::optional<int> init_event_index;
  std::optional<int> contact_event_index;
  std::optional<std::string> collision_segment;
  std::optional<double> collision_x;
};

enum class Classification { kBalanced, kFell, kNumericalFault };

inline const char* classification_name(Classification c) {
  switch (c) {
    case Classification::kBalanced: return "balanced";
    case Classification::kFell: return "fell";
    default: return "numerical_fault";
  }
}

struct TrialOutcome {
  Classification classification = Classification::kFell;
  FallRecord record;
};

// Initialization event: first inside-to-outside transition of the CoM
// against the per-frame support interval. Contact event: the peak of the
// summed non-foot contact force at or after the initialization event
// (earlier of equal peaks). Either may be absent.
inline FallRecord detect_events(const TrialLog& log) {
  FallRecord record;
  const int n = static_cast<int>(log.frames.size());
  for (int i = 1; i < n; ++i) {
    const bool was_inside =
        point_in_support(log.frames[i - 1].com_x, log.frames[i - 1].support);
    const bool is_inside =
        point_in_support(log.frames[i].com_x, log.frames[i].support);
    if (was_inside && !is_inside) {
      record.init_event_index = i;
      record.init_event_t = log.frames[i].t;
      break;
    }
  }
  if (!record.init_event_index) return record;

  double peak = 0.0;
  for (int i = *record.init_event_index; i < n; ++i) {
    const double force = non_foot_contact_force(log.frames[i]);
    if (force > peak) {
      peak = force;
      record.contact_event_index = i;
    }
  }
  if (record.contact_event_index) {
    const LogFrame& impact = log.frames[*record.contact_event_index];
    record.contact_event_t = impact.t;
    record.fall_duration = *record.contact_event_t - *record.init_event_t;
    double best = -1.0;
    for (const ContactSample& c : impact.contacts) {
      if (!is_foot_point(c.id) && c.normal_force > best) {
        best = c.normal_force;
        record.collision_segment = contact_point_name(c.id);
        record.collision_x = c.x;
      }
    }
  }
  return record;
}

// Balanced requires that nothing but the feet ever touched the ground and
// that the CoM is inside the instantaneous support when the trial ends.
inline TrialOutcome classify(const TrialLog& log) {
  TrialOutcome outcome;
  outcome.record = detect_events(log);
  if (log.fault) {
    outcome.classification = Classification::kNumericalFault;
    return outcome;
  }
  bool non_foot_contact = false;
  for (const LogFrame& f : log.frames) {
    if (non_foot_contact_force(f) > 0.0) {
      non_foot_contact = true;
      break;
    }
  }
  const LogFrame& last = log.frames.back();
  const bool com_inside_at_end = point_in_support(last.com_x, last.support);
  outcome.classification = (!non_foot_contact && com_inside_at_end)
                               ? Classification::kBalanced
                               : Classification::kFell;
  return outcome;
}

// Time the model was still standing. Balanced trials stand for the whole
// log; fallen trials stand until the fall onset. Transient support
// excursions that recover do not end standing.
inline double standing_duration(const TrialLog& log,
                                const TrialOutcome& outcome) {
  const double logged = log.frames.empty() ? 0.0 : log.frames.back().t;
  if (outcome.classification == Classification::kBalanced) return logged;
  if (outcome.record.init_event_t) return *outcome.record.init_event_t;
  return logged;
}

struct BalanceRegion {
  double bin_lo = 0.0;
  double bin_width = 0.0;
  std::vector<double> density;  // sums to 1
  // Smallest contiguous bin window holding at least `target_mass`.
  double region_lo = 0.0;
  double region_hi = 0.0;
  double region_mass = 0.0;
  long frames = 0;
};

// Density over raw CoM x samples, plus the smallest interval covering
// `target_mass` of the mass.
inline BalanceRegion balance_region_from_samples(const std::vector<double>& xs,
                                                 int bins,
                                                 double target_mass = 0.68) {
  if (xs.empty()) {
    throw std::invalid_argument("balance region needs at least one trial");
  }
  if (bins < 1) throw std::invalid_argument("bins must be positive");

  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  BalanceRegion region;
  region.frames = static_cast<long>(xs.size());
  region.bin_lo = *lo_it;
  const double span = *hi_it - *lo_it;
  region.bin_width = span > 0.0 ? span / bins : 1e-9;
  region.density.assign(bins, 0.0);
  for (double x : xs) {
    int b = static_cast<int>((x - region.bin_lo) / region.bin_width);
    b = std::clamp(b, 0, bins - 1);
    region.density[b] += 1.0;
  }
  for (double& d : region.density) d /= static_cast<double>(xs.size());

  int best_lo = 0, best_hi = bins - 1;
  double best_mass = 1.0;
  int lo = 0;
  double mass = 0.0;
  for (int hi = 0; hi < bins; ++hi) {
    mass += region.density[hi];
    while (mass - region.density[lo] >= target_mass && lo < hi) {
      mass -= region.density[lo];
      ++lo;
    }
    if (mass >= target_mass && (hi - lo < best_hi - best_lo)) {
      best_lo = lo;
      best_hi = hi;
      best_mass = mass;
    }
  }
  region.region_lo = region.bin_lo + best_lo * region.bin_width;
  region.region_hi = region.bin_lo + (best_hi + 1) * region.bin_width;
  region.region_mass = best_mass;
  return region;
}

// Density of CoM x positions over all frames of the given balanced-trial
// logs.
inline BalanceRegion balance_region(const std::vector<const TrialLog*>& trials,
                                    int bins, double target_mass = 0.68) {
  std::vector<double> xs;
  for (const TrialLog* log : trials) {
    for (const LogFrame& f : log->frames) xs.push_back(f.com_x);
  }
  return balance_region_from_samples(xs, bins, target_mass);
}

struct CollisionStats {
  std::map<std::string, int> counts;
  std::map<std::string, std::vector<double>> positions;
  int total = 0;
};

inline CollisionStats collision_stats(const std::vector<FallRecord>& records) {
  CollisionStats stats;
  for (const FallRecord& r : records) {
    if (r.collision_segment) {
      ++stats.counts[*r.collision_segment];
      if (r.collision_x) {
        stats.positions[*r.collision_segment].push_back(*r.collision_x);
      }
      ++stats.total;
    }
  }
  return stats;
}

}  // namespace stance
