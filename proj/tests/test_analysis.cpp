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

#include "stance/analysis.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "stance/rng.hpp"

namespace stance {
namespace {

constexpr double kLogDt = 0.002;

LogFrame make_frame(int index, double com_x, bool in_support) {
  LogFrame f;
  f.t = index * kLogDt;
  f.com_x = com_x;
  // Fixed support; the inside/outside choice is steered via com_x.
  f.support = std::make_pair(-0.1, 0.1);
  if (!in_support) f.com_x = 0.5;
  return f;
}

TrialLog make_log(int frames) {
  TrialLog log;
  log.log_dt = kLogDt;
  log.config_hash = "feedbeef";
  for (int i = 0; i < frames; ++i) {
    log.frames.push_back(make_frame(i, 0.0, true));
  }
  return log;
}

void add_landmark_hit(LogFrame& frame, int id, double force, double x) {
  frame.contacts.push_back({id, 0.01, force, 0.0, x});
}

TEST(PointInSupport, ClosedIntervalAndEmpty) {
  const auto support = std::make_optional(std::make_pair(-0.1, 0.2));
  EXPECT_TRUE(point_in_support(0.05, support));
  EXPECT_TRUE(point_in_support(-0.1, support));
  EXPECT_TRUE(point_in_support(0.2, support));
  EXPECT_FALSE(point_in_support(0.21, support));
  EXPECT_FALSE(point_in_support(0.0, std::nullopt));
}

TEST(DetectEvents, QuietLogHasNoEvents) {
  const TrialLog log = make_log(600);
  const FallRecord record = detect_events(log);
  EXPECT_FALSE(record.init_event_t.has_value());
  EXPECT_FALSE(record.contact_event_t.has_value());
  EXPECT_FALSE(record.fall_duration.has_value());
  EXPECT_EQ(classify(log).classification, Classification::kBalanced);
}

TEST(DetectEvents, ExactSampleIndices) {
  TrialLog log = make_log(600);
  // CoM leaves the support at sample 137 and stays out; the landmark force
  // peaks at sample 512.
  for (int i = 137; i < 600; ++i) log.frames[i] = make_frame(i, 0.0, false);
  add_landmark_hit(log.frames[400], kPelvisPoint, 150.0, -0.3);
  add_landmark_hit(log.frames[512], kPelvisPoint, 900.0, -0.42);
  add_landmark_hit(log.frames[600 - 1], kPelvisPoint, 450.0, -0.5);

  const FallRecord record = detect_events(log);
  ASSERT_TRUE(record.init_event_index.has_value());
  ASSERT_TRUE(record.contact_event_index.has_value());
  EXPECT_EQ(*record.init_event_index, 137);
  EXPECT_EQ(*record.contact_event_index, 512);
  EXPECT_DOUBLE_EQ(*record.init_event_t, log.frames[137].t);
  EXPECT_DOUBLE_EQ(*record.contact_event_t, log.frames[512].t);
  EXPECT_DOUBLE_EQ(*record.fall_duration,
                   log.frames[512].t - log.frames[137].t);
  EXPECT_EQ(*record.collision_segment, "pelvis");
  EXPECT_DOUBLE_EQ(*record.collision_x, -0.42);
  EXPECT_EQ(classify(log).classification, Classification::kFell);
}

TEST(DetectEvents, EqualPeaksPickTheEarlier) {
  TrialLog log = make_log(300);
  for (int i = 100; i < 300; ++i) log.frames[i] = make_frame(i, 0.0, false);
  add_landmark_hit(log.frames[150], kKneeLPoint, 500.0, -0.1);
  add_landmark_hit(log.frames[220], kKneeRPoint, 500.0, -0.2);
  const FallRecord record = detect_events(log);
  ASSERT_TRUE(record.contact_event_index.has_value());
  EXPECT_EQ(*record.contact_event_index, 150);
  EXPECT_EQ(*record.collision_segment, "knee_l");
}

TEST(DetectEvents, ContactSearchStartsAtFallOnset) {
  TrialLog log = make_log(300);
  // A heavy landmark force before the CoM ever leaves support must not be
  // picked as the impact.
  add_landmark_hit(log.frames[50], kTorsoMidPoint, 2000.0, 0.0);
  for (int i = 200; i < 300; ++i) log.frames[i] = make_frame(i, 0.0, false);
  add_landmark_hit(log.frames[250], kHeadPoint, 300.0, -0.6);
  const FallRecord record = detect_events(log);
  ASSERT_TRUE(record.init_event_index.has_value());
  EXPECT_EQ(*record.init_event_index, 200);
  ASSERT_TRUE(record.contact_event_index.has_value());
  EXPECT_EQ(*record.contact_event_index, 250);
  EXPECT_EQ(*record.collision_segment, "head");
}

TEST(DetectEvents, FootForcesAreNotImpacts) {
  TrialLog log = make_log(300);
  for (int i = 100; i < 300; ++i) log.frames[i] = make_frame(i, 0.0, false);
  log.frames[150].contacts.push_back({kHeelLPoint, 0.005, 900.0, 10.0, 0.0});
  const FallRecord record = detect_events(log);
  EXPECT_TRUE(record.init_event_index.has_value());
  EXPECT_FALSE(record.contact_event_index.has_value());
}

TEST(Classify, NonFootContactForbidsBalanced) {
  TrialLog log = make_log(400);
  // Knee touch in the middle; CoM inside support for the whole trial.
  add_landmark_hit(log.frames[200], kKneeLPoint, 80.0, 0.02);
  const TrialOutcome outcome = classify(log);
  EXPECT_EQ(outcome.classification, Classification::kFell);
}

TEST(Classify, FaultWins) {
  TrialLog log = make_log(100);
  log.fault = true;
  log.fault_message = "boom";
  EXPECT_EQ(classify(log).classification, Classification::kNumericalFault);
}

TEST(Classify, ComOutsideAtEndIsAFall) {
  TrialLog log = make_log(200);
  log.frames[199] = make_frame(199, 0.0, false);
  EXPECT_EQ(classify(log).classification, Classification::kFell);
}

TEST(Classify, PureFunctionOfSerializedLog) {
  TrialLog log = make_log(500);
  for (int i = 300; i < 500; ++i) log.frames[i] = make_frame(i, 0.0, false);
  add_landmark_hit(log.frames[420], kPelvisPoint, 640.0, -0.33);
  const TrialOutcome direct = classify(log);

  std::istringstream stream(to_jsonl(log));
  const TrialLog reloaded = from_jsonl(stream);
  const TrialOutcome roundtrip = classify(reloaded);
  EXPECT_EQ(direct.classification, roundtrip.classification);
  ASSERT_TRUE(roundtrip.record.contact_event_t.has_value());
  EXPECT_DOUBLE_EQ(*roundtrip.record.contact_event_t,
                   *direct.record.contact_event_t);
  EXPECT_DOUBLE_EQ(*roundtrip.record.collision_x, *direct.record.collision_x);
}

TEST(StandingDuration, DefinitionPerOutcome) {
  {
    const TrialLog log = make_log(500);
    const TrialOutcome outcome = classify(log);
    EXPECT_DOUBLE_EQ(standing_duration(log, outcome), log.frames.back().t);
  }
  {
    TrialLog log = make_log(500);
    for (int i = 250; i < 500; ++i) log.frames[i] = make_frame(i, 0.0, false);
    const TrialOutcome outcome = classify(log);
    EXPECT_DOUBLE_EQ(standing_duration(log, outcome), log.frames[250].t);
  }
}

TEST(BalanceRegion, StationaryTrialIsOneBin) {
  TrialLog log = make_log(100);
  const BalanceRegion region = balance_region({&log}, 40);
  double total = 0.0;
  int occupied = 0;
  for (double d : region.density) {
    total += d;
    if (d > 0.0) ++occupied;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(occupied, 1);
  EXPECT_LE(region.region_hi - region.region_lo, region.bin_width + 1e-12);
}

TEST(BalanceRegion, DensityNormalizedForAnyInput) {
  Rng rng(77);
  TrialLog log = make_log(0);
  for (int i = 0; i < 5000; ++i) {
    LogFrame f = make_frame(i, rng.normal(0.02, 0.01), true);
    f.com_x = rng.normal(0.02, 0.01);
    log.frames.push_back(f);
  }
  const BalanceRegion region = balance_region({&log}, 60);
  double total = 0.0;
  for (double d : region.density) total += d;
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_GE(region.region_mass, 0.68);
}

TEST(BalanceRegion, UniformSamplesAreFlat) {
  Rng rng(79);
  std::vector<double> xs;
  const int n = 200000, bins = 20;
  for (int i = 0; i < n; ++i) xs.push_back(rng.uniform());
  const BalanceRegion region = balance_region_from_samples(xs, bins);
  // Multinomial: each bin holds 1/bins +- a few standard errors.
  const double expected = 1.0 / bins;
  const double tolerance = 5.0 * std::sqrt(expected * (1 - expected) / n);
  for (double d : region.density) {
    EXPECT_NEAR(d, expected, tolerance);
  }
}

TEST(BalanceRegion, SixtyEightPercentIntervalOfAGaussian) {
  Rng rng(83);
  std::vector<double> xs;
  for (int i = 0; i < 400000; ++i) xs.push_back(rng.normal(0.0, 0.05));
  const BalanceRegion region = balance_region_from_samples(xs, 200, 0.68);
  // The smallest 68% interval of a Gaussian is +-1 sigma.
  EXPECT_NEAR(region.region_hi - region.region_lo, 2.0 * 0.05, 0.01);
  EXPECT_NEAR(0.5 * (region.region_hi + region.region_lo), 0.0, 0.01);
}

TEST(BalanceRegion, RejectsEmptyInput) {
  EXPECT_THROW(balance_region({}, 10), std::invalid_argument);
}

TEST(CollisionStats, CountsAndConservation) {
  std::vector<FallRecord> records(5);
  records[0].collision_segment = "pelvis";
  records[0].collision_x = -0.3;
  records[1].collision_segment = "pelvis";
  records[1].collision_x = -0.4;
  records[2].collision_segment = "torso_mid";
  records[2].collision_x = 0.6;
  // records[3] and records[4]: falls without a recorded impact.
  const CollisionStats stats = collision_stats(records);
  EXPECT_EQ(stats.counts.at("pelvis"), 2);
  EXPECT_EQ(stats.counts.at("torso_mid"), 1);
  EXPECT_EQ(stats.total, 3);
  EXPECT_EQ(stats.positions.at("pelvis").size(), 2u);

  const CollisionStats empty = collision_stats({});
  EXPECT_TRUE(empty.counts.empty());
  EXPECT_EQ(empty.total, 0);
}

}  // namespace
}  // namespace stance
