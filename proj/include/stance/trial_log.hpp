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
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stance/biped.hpp"
#include "stance/types.hpp"

namespace stance {

// Time series of one trial, sampled at a fixed rate. Serialized as JSON
// lines: one header object followed by one object per frame, so logs can be
// streamed and analyzed without loading the producing configuration.

struct ContactSample {
  int id = 0;
  double penetration = 0.0;
  double normal_force = 0.0;
  double tangent_force = 0.0;
  double x = 0.0;
};

struct LogFrame {
  double t = 0.0;
  std::array<double, kNumDof> q{};
  std::array<double, kNumDof> qd{};
  double com_x = 0.0, com_z = 0.0;
  double com_vx = 0.0, com_vz = 0.0;
  std::optional<std::pair<double, double>> support;
  std::array<double, kNumMuscles> muscle_force{};
  std::array<double, kNumMuscles> activation{};
  std::vector<ContactSample> contacts;  // points currently in contact
};

struct TrialLog {
  int version = 1;
  std::string config_hash;
  double log_dt = 0.002;
  bool fault = false;
  std::string fault_message;
  std::vector<LogFrame> frames;
};

inline LogFrame capture_frame(const ModelSpec& spec, const BodyState& state) {
  LogFrame f;
  f.t = state.t;
  for (int i = 0; i < kNumDof; ++i) {
    f.q[i] = state.q[i];
    f.qd[i] = state.qd[i];
  }
  const Vec2 c = com(spec, state);
  const Vec2 cv = com_velocity(spec, state);
  f.com_x = c.x;
  f.com_z = c.z;
  f.com_vx = cv.x;
  f.com_vz = cv.z;
  f.support = support_interval(spec, state);
  const Vector18 forces = muscle_forces(spec, state);
  for (int m = 0; m < kNumMuscles; ++m) {
    f.muscle_force[m] = forces[m];
    f.activation[m] = state.activation[m];
  }
  for (const ContactPointState& p : contact_points(spec, state)) {
    if (p.penetration > 0.0) {
      f.contacts.push_back(
          {p.id, p.penetration, p.normal_force, p.tangent_force, p.pos.x});
    }
  }
  return f;
}

// Summed normal force on non-foot landmarks; the impact signal used by the
// fall analysis.
inline double non_foot_contact_force(const LogFrame& frame) {
  double total = 0.0;
  for (const ContactSample& c : frame.contacts) {
    if (!is_foot_point(c.id)) total += c.normal_force;
  }
  return total;
}

namespace detail {

inline nlohmann::json frame_to_json(const LogFrame& f) {
  nlohmann::json j;
  j["t"] = f.t;
  j["q"] = f.q;
  j["qd"] = f.qd;
  j["com"] = {f.com_x, f.com_z};
  j["com_vel"] = {f.com_vx, f.com_vz};
  if (f.support) {
    j["support"] = {f.support->first, f.support->second};
  } else {
    j["support"] = nullptr;
  }
  j["force"] = f.muscle_force;
  j["act"] = f.activation;
  nlohmann::json contacts = nlohmann::json::array();
  for (const ContactSample& c : f.contacts) {
    contacts.push_back({{"id", c.id},
                        {"pen", c.penetration},
                        {"fn", c.normal_force},
                        {"ft", c.tangent_force},
                        {"x", c.x}});
  }
  j["contacts"] = std::move(contacts);
  return j;
}

inline LogFrame frame_from_json(const nlohmann::json& j) {
  LogFrame f;
  f.t = j.at("t").get<double>();
  for (int i = 0; i < kNumDof; ++i) {
    f.q[i] = j.at("q").at(i).get<double>();
    f.qd[i] = j.at("qd").at(i).get<double>();
  }
  f.com_x = j.at("com").at(0).get<double>();
  f.com_z = j.at("com").at(1).get<double>();
  f.com_vx = j.at("com_vel").at(0).get<double>();
  f.com_vz = j.at("com_vel").at(1).get<double>();
  if (!j.at("support").is_null()) {
    f.support = std::make_pair(j.at("support").at(0).get<double>(),
                               j.at("support").at(1).get<double>());
  }
  for (int m = 0; m < kNumMuscles; ++m) {
    f.muscle_force[m] = j.at("force").at(m).get<double>();
    f.activation[m] = j.at("act").at(m).get<double>();
  }
  for (const auto& c : j.at("contacts")) {
    f.contacts.push_back({c.at("id").get<int>(), c.at("pen").get<double>(),
                          c.at("fn").get<double>(), c.at("ft").get<double>(),
                          c.at("x").get<double>()});
  }
  return f;
}

}  // namespace detail

inline std::string to_jsonl(const TrialLog& log) {
  std::ostringstream out;
  nlohmann::json header;
  header["format"] = "stance-trial-log";
  header["version"] = log.version;
  header["config_hash"] = log.config_hash;
  header["log_dt"] = log.log_dt;
  header["fault"] = log.fault;
  if (log.fault) header["fault_message"] = log.fault_message;
  out << header.dump() << '\n';
  for (const LogFrame& f : log.frames) {
    out << detail::frame_to_json(f).dump() << '\n';
  }
  return out.str();
}

inline void write_jsonl(const TrialLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << to_jsonl(log);
}

inline TrialLog from_jsonl(std::istream& in) {
  TrialLog log;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty trial log");
  }
  const nlohmann::json header = nlohmann::json::parse(line);
  if (header.value("format", "") != "stance-trial-log") {
    throw std::runtime_error("not a stance trial log");
  }
  log.version = header.at("version").get<int>();
  if (log.version != 1) {
    throw std::runtime_error("unsupported trial log version");
  }
  log.config_hash = header.at("config_hash").get<std::string>();
  log.log_dt = header.at("log_dt").get<double>();
  log.fault = header.value("fault", false);
  log.fault_message = header.value("fault_message", "");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    log.frames.push_back(detail::frame_from_json(nlohmann::json::parse(line)));
  }
  return log;
}

inline TrialLog read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trial log: " + path);
  return from_jsonl(in);
}

}  // namespace stance
