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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stance/analysis.hpp"
#include "stance/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumericalFault = 2;
constexpr int kExitPlanningFailure = 3;

struct CommonOptions {
  std::vector<std::string> config_files;
  std::vector<std::string> overrides;  // key=value
};

void add_common(CLI::App* cmd, CommonOptions* common) {
  cmd->add_option("--config", common->config_files,
                  "Config file(s); later files override earlier ones")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", common->overrides,
                  "Override any config key, e.g. --set planner.particles=32");
}

stance::Config build_config(const CommonOptions& common,
                            const std::vector<std::pair<std::string, std::string>>&
                                defaults = {},
                            const std::vector<std::pair<std::string, std::string>>&
                                forced = {}) {
  stance::Config cfg;
  for (const std::string& path : common.config_files) {
    cfg.merge_file(path);
  }
  for (const auto& [key, value] : defaults) {
    if (!cfg.has(key)) cfg.set(key, value);
  }
  for (const std::string& kv : common.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw stance::ConfigError("--set expects key=value, got: " + kv);
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [key, value] : forced) {
    cfg.set(key, value);
  }
  return cfg;
}

void print_summary(const stance::BatchSummary& s) {
  std::printf("trials: %d  balanced: %d  fell: %d  fault: %d\n", s.n_trials,
              s.n_balanced, s.n_fell, s.n_fault);
  std::printf("success rate: %.3f  mean standing duration: %.3f s\n",
              s.success_rate, s.mean_standing_duration);
}

void write_batch_outputs(const stance::Experiment& exp,
                         const stance::BatchResult& result,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  stance::write_summary_csv(result.summary,
                            (fs::path(out_dir) / "summary.csv").string());
  stance::write_records_csv(result.records,
                            (fs::path(out_dir) / "records.csv").string());
  stance::write_muscle_stats_csv(
      result.summary, (fs::path(out_dir) / "muscle_stats.csv").string());
  stance::write_trial_muscle_csv(
      result.records, (fs::path(out_dir) / "trial_muscle_stats.csv").string());

  std::vector<double> balanced_com;
  std::vector<stance::FallRecord> fell;
  for (const stance::TrialRecord& r : result.records) {
    if (r.outcome.classification == stance::Classification::kBalanced) {
      balanced_com.insert(balanced_com.end(), r.com_x.begin(), r.com_x.end());
    } else if (r.outcome.classification == stance::Classification::kFell) {
      fell.push_back(r.outcome.record);
    }
  }
  if (!balanced_com.empty()) {
    const stance::BalanceRegion region = stance::balance_region_from_samples(
        balanced_com, exp.balance_region_bins, exp.balance_region_mass);
    stance::write_balance_region_csv(
        region, (fs::path(out_dir) / "balance_region.csv").string());
    std::printf("balance region (%.0f%% mass): [%.4f, %.4f] m, width %.4f m\n",
                100.0 * exp.balance_region_mass, region.region_lo,
                region.region_hi, region.region_hi - region.region_lo);
  }
  if (!fell.empty()) {
    stance::write_collision_csv(
        stance::collision_stats(fell),
        (fs::path(out_dir) / "collisions.csv").string());
  }
}

int run_batch_command(const CommonOptions& common,
                      const std::vector<std::pair<std::string, std::string>>&
                          defaults,
                      const std::string& out_dir, bool keep_trial_logs) {
  stance::Config cfg = build_config(common, defaults);
  const stance::Experiment exp = stance::load_experiment(cfg);
  const stance::BatchResult result =
      stance::run_batch(exp, keep_trial_logs ? out_dir : "", false);
  write_batch_outputs(exp, result, out_dir);
  print_summary(result.summary);
  std::printf("outputs written to %s\n", out_dir.c_str());
  return kExitOk;
}

int run_stand(const CommonOptions& common, const std::string& out_path) {
  stance::Config cfg = build_config(common);
  const stance::Experiment exp = stance::load_experiment(cfg);
  auto [record, log] = stance::run_trial(exp, exp.experiment.seed, 0);
  if (!out_path.empty()) {
    stance::write_jsonl(log, out_path);
  }
  std::printf("classification: %s\n",
              stance::classification_name(record.outcome.classification));
  std::printf("standing duration: %.3f s  planning events: %d  cost: %.1f\n",
              record.standing_duration, record.planning_events,
              record.total_cost);
  if (record.outcome.record.init_event_t) {
    std::printf("fall onset: %.3f s\n", *record.outcome.record.init_event_t);
  }
  if (record.outcome.record.contact_event_t) {
    std::printf("impact: %.3f s on %s at x=%.3f m\n",
                *record.outcome.record.contact_event_t,
                record.outcome.record.collision_segment->c_str(),
                record.outcome.record.collision_x.value_or(0.0));
  }
  if (!out_path.empty()) {
    std::printf("log written to %s\n", out_path.c_str());
  }
  if (record.outcome.classification ==
      stance::Classification::kNumericalFault) {
    return record.planning_failure ? kExitPlanningFailure
                                   : kExitNumericalFault;
  }
  return kExitOk;
}

int run_exo_optimize(const CommonOptions& common, const std::string& out_dir) {
  stance::Config cfg = build_config(
      common,
      {{"perturbation.count", "3"}},
      {{"exo.enabled", "true"}});
  const stance::Experiment exp = stance::load_experiment(cfg);
  std::printf("optimizing exoskeleton parameters: budget %d x %d trials\n",
              exp.bo.budget, exp.bo.trials_per_eval);
  const stance::ExoOptimizationResult result = stance::optimize_exo(exp);

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  stance::write_bo_history_csv(result.bo,
                               (fs::path(out_dir) / "history.csv").string());
  const std::string params_path =
      (fs::path(out_dir) / "best_params.ini").string();
  {
    std::ofstream out(params_path, std::ios::binary);
    out << "[exo]\n";
    out << "enabled = true\n";
    out << "k_p_joint = "
        << stance::Config::format_double(result.best_params.k_p_joint) << '\n';
    out << "k_d_joint = "
        << stance::Config::format_double(result.best_params.k_d_joint) << '\n';
    out << "k_p_tilt = "
        << stance::Config::format_double(result.best_params.k_p_tilt) << '\n';
    out << "k_d_tilt = "
        << stance::Config::format_double(result.best_params.k_d_tilt) << '\n';
    out << "weight = "
        << stance::Config::format_double(result.best_params.weight) << '\n';
    out << "torque_max = "
        << stance::Config::format_double(result.best_params.torque_max)
        << '\n';
  }
  std::printf("best objective: %.3f\n", result.bo.y_best);
  std::printf("best params: k_p_joint=%.1f k_d_joint=%.1f k_p_tilt=%.1f "
              "weight=%.3f\n",
              result.best_params.k_p_joint, result.best_params.k_d_joint,
              result.best_params.k_p_tilt, result.best_params.weight);
  std::printf("history and parameters written to %s\n", out_dir.c_str());
  return kExitOk;
}

int run_analyze(const std::vector<std::string>& inputs,
                const std::string& out_dir, int bins, double mass) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const std::string& input : inputs) {
    if (fs::is_directory(input)) {
      for (const auto& entry : fs::directory_iterator(input)) {
        if (entry.path().extension() == ".jsonl") {
          files.push_back(entry.path().string());
        }
      }
    } else {
      files.push_back(input);
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::fprintf(stderr, "analyze: no trial logs found\n");
    return kExitUsage;
  }

  std::vector<stance::TrialLog> logs;
  logs.reserve(files.size());
  for (const std::string& file : files) {
    logs.push_back(stance::read_jsonl(file));
    if (logs.back().config_hash != logs.front().config_hash) {
      std::fprintf(stderr,
                   "analyze: %s was produced by a different configuration "
                   "(config hash mismatch)\n",
                   file.c_str());
      return kExitUsage;
    }
  }

  int balanced = 0, fell = 0, fault = 0;
  std::vector<const stance::TrialLog*> balanced_logs;
  std::vector<stance::FallRecord> fall_records;
  for (const stance::TrialLog& log : logs) {
    const stance::TrialOutcome outcome = stance::classify(log);
    switch (outcome.classification) {
      case stance::Classification::kBalanced:
        ++balanced;
        balanced_logs.push_back(&log);
        break;
      case stance::Classification::kFell:
        ++fell;
        fall_records.push_back(outcome.record);
        break;
      case stance::Classification::kNumericalFault:
        ++fault;
        break;
    }
  }
  std::printf("logs: %zu  balanced: %d  fell: %d  fault: %d\n", logs.size(),
              balanced, fell, fault);

  fs::create_directories(out_dir);
  if (!balanced_logs.empty()) {
    const stance::BalanceRegion region =
        stance::balance_region(balanced_logs, bins, mass);
    stance::write_balance_region_csv(
        region, (fs::path(out_dir) / "balance_region.csv").string());
    std::printf("balance region (%.0f%% mass): [%.4f, %.4f] m, width %.4f m\n",
                100.0 * mass, region.region_lo, region.region_hi,
                region.region_hi - region.region_lo);
  }
  if (!fall_records.empty()) {
    const stance::CollisionStats stats = stance::collision_stats(fall_records);
    stance::write_collision_csv(
        stats, (fs::path(out_dir) / "collisions.csv").string());
    for (const auto& [segment, count] : stats.counts) {
      std::printf("collisions on %s: %d\n", segment.c_str(), count);
    }
  }
  std::printf("outputs written to %s\n", out_dir.c_str());
  return kExitOk;
}

int run_validate(const CommonOptions& common) {
  stance::Config cfg = build_config(common);
  const stance::Experiment exp = stance::load_experiment(cfg);
  const std::vector<std::string> unknown = cfg.unknown_keys();
  std::printf("%s", cfg.resolved_ini().c_str());
  std::printf("\n# config hash: %s\n", exp.config_hash.c_str());
  if (!unknown.empty()) {
    for (const std::string& key : unknown) {
      std::fprintf(stderr, "unknown config key: %s\n", key.c_str());
    }
    return kExitUsage;
  }
  std::printf("# configuration valid\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sagittal-plane musculoskeletal standing simulator"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string out_dir = "out";
  std::string out_path;
  std::vector<std::string> analyze_inputs;
  int bins = 60;
  double mass = 0.68;
  std::optional<uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> duration;
  std::optional<std::string> injury_muscle;
  std::optional<double> injury_factor;
  std::optional<int> budget;
  bool exo = false;

  CLI::App* stand = app.add_subcommand("stand", "Run a single standing trial");
  add_common(stand, &common);
  stand->add_option("--seed", seed, "Master seed");
  stand->add_option("--duration", duration, "Trial length [s]");
  stand->add_option("--out", out_path, "Write the trial log (JSON lines)");
  stand->add_flag("--exo", exo, "Enable the hip exoskeleton");

  CLI::App* batch = app.add_subcommand("batch", "Run a batch of seeded trials");
  add_common(batch, &common);
  batch->add_option("--trials", trials, "Number of trials");
  batch->add_option("--seed", seed, "Master seed");
  batch->add_option("--duration", duration, "Trial length [s]");
  batch->add_option("--out-dir", out_dir, "Output directory");
  batch->add_flag("--exo", exo, "Enable the hip exoskeleton");

  CLI::App* perturb =
      app.add_subcommand("perturb", "Batch with scheduled random pushes");
  add_common(perturb, &common);
  perturb->add_option("--trials", trials, "Number of trials");
  perturb->add_option("--seed", seed, "Master seed");
  perturb->add_option("--duration", duration, "Trial length [s]");
  perturb->add_option("--out-dir", out_dir, "Output directory");
  perturb->add_flag("--exo", exo, "Enable the hip exoskeleton");

  CLI::App* injury =
      app.add_subcommand("injury", "Batch with one muscle weakened");
  add_common(injury, &common);
  injury->add_option("--muscle", injury_muscle, "Injured muscle name");
  injury->add_option("--factor", injury_factor,
                     "Remaining force capacity in [0, 1]");
  injury->add_option("--trials", trials, "Number of trials");
  injury->add_option("--seed", seed, "Master seed");
  injury->add_option("--duration", duration, "Trial length [s]");
  injury->add_option("--out-dir", out_dir, "Output directory");

  CLI::App* exo_opt = app.add_subcommand(
      "exo-optimize",
      "Bayesian optimization of the exoskeleton control parameters");
  add_common(exo_opt, &common);
  exo_opt->add_option("--budget", budget, "Objective evaluations");
  exo_opt->add_option("--seed", seed, "Master seed");
  exo_opt->add_option("--out-dir", out_dir, "Output directory");

  CLI::App* analyze =
      app.add_subcommand("analyze", "Summarize saved trial logs");
  analyze->add_option("--logs", analyze_inputs,
                      "Log files or directories containing them")
      ->required();
  analyze->add_option("--out-dir", out_dir, "Output directory");
  analyze->add_option("--bins", bins, "Histogram bins");
  analyze->add_option("--mass", mass, "Balance region mass fraction");

  CLI::App* validate =
      app.add_subcommand("validate-config", "Check and print a configuration");
  add_common(validate, &common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    // Dedicated flags are sugar for --set overrides.
    if (seed) common.overrides.push_back("experiment.seed=" + std::to_string(*seed));
    if (trials) common.overrides.push_back("experiment.trials=" + std::to_string(*trials));
    if (duration) {
      common.overrides.push_back("experiment.duration=" +
                                 stance::Config::format_double(*duration));
    }
    if (exo) common.overrides.push_back("exo.enabled=true");
    if (budget) common.overrides.push_back("bayesopt.budget=" + std::to_string(*budget));

    if (stand->parsed()) {
      return run_stand(common, out_path);
    }
    if (batch->parsed()) {
      return run_batch_command(common, {}, out_dir, true);
    }
    if (perturb->parsed()) {
      return run_batch_command(common, {{"perturbation.count", "3"}}, out_dir,
                               true);
    }
    if (injury->parsed()) {
      std::vector<std::pair<std::string, std::string>> defaults = {
          {"injury.muscle", injury_muscle.value_or("left_rectus_femoris")}};
      if (injury_muscle) {
        common.overrides.push_back("injury.muscle=" + *injury_muscle);
      }
      if (injury_factor) {
        common.overrides.push_back(
            "injury.factor=" + stance::Config::format_double(*injury_factor));
      }
      return run_batch_command(common, defaults, out_dir, true);
    }
    if (exo_opt->parsed()) {
      return run_exo_optimize(common, out_dir);
    }
    if (analyze->parsed()) {
      return run_analyze(analyze_inputs, out_dir, bins, mass);
    }
    if (validate->parsed()) {
      return run_validate(common);
    }
  } catch (const stance::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const stance::PlanningFailure& e) {
    std::fprintf(stderr, "planning failure: %s\n", e.what());
    return kExitPlanningFailure;
  } catch (const stance::NumericalFault& e) {
    std::fprintf(stderr, "numerical fault: %s\n", e.what());
    return kExitNumericalFault;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
