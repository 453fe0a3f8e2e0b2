#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cyberdef/checkpoint.hpp"
#include "cyberdef/config.hpp"
#include "cyberdef/metrics.hpp"
#include "cyberdef/ppo.hpp"
#include "cyberdef/team.hpp"
#include "cyberdef/training.hpp"

namespace cyberdef {

/// Everything a run needs. Loaded from one YAML file holding the scenario
/// sections plus `experiment:` and `training:` maps; command-line flags are
/// applied on top.
struct ExperimentConfig {
  std::string config_path;
  ScenarioConfig scenario = ScenarioConfig::desk();
  StrategyKind strategy = StrategyKind::HmarlExpert;
  std::string profile = "desk";
  TrainConfig train = TrainConfig::desk();
  std::uint64_t seed = 1;
  int episodes = 100;
  bool greedy = false;
  /// Iterations between interval checkpoints; 0 writes only the final one.
  int checkpoint_every = 10;
  std::string checkpoint;
  std::string pretrained;
  /// Transfer budget; negative means round(fraction * iterations).
  int fine_tune_iterations = -1;
  double fine_tune_fraction = 0.1;
  /// Red variants for an evaluation sweep; empty evaluates the scenario's variant.
  std::vector<std::string> sweep;
  /// Raw `training:` overrides, re-applied whenever the profile changes.
  std::string training_overrides;

  void set_profile(const std::string& name);
  void set_red(const std::string& variant);
  int fine_tune_budget() const;
};

/// Throws ConfigError on unknown names or malformed values.
ExperimentConfig parse_experiment(const std::string& yaml_text);
ExperimentConfig load_experiment(const std::string& path);
/// Effective config in the same format; parsing it reproduces the run.
std::string dump_experiment(const ExperimentConfig& cfg);

/// Exclusive claim on an output directory, released on destruction.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path path_;
};

std::string build_commit();

struct TrainedRun {
  Team team;
  /// One entry per training stage, e.g. {"subpolicies", ...}, {"master", ...}.
  std::vector<std::pair<std::string, TrainResult>> curves;
};

Team fresh_team(const ExperimentConfig& cfg, StrategyKind strategy, std::uint64_t seed);
/// Trains `cfg.strategy` from scratch; Meta runs the two-stage curriculum.
TrainedRun train_strategy(const ExperimentConfig& cfg, const TrainHooks& hooks = {});
/// Rebuilds the team a checkpoint was written from and loads it.
Team team_from_checkpoint(const ExperimentConfig& cfg, const Checkpoint& ckpt);

struct EvalOutcome {
  std::string label;
  MetricsReport report;
  std::vector<EpisodeTrace> traces;
};
EvalOutcome evaluate_team(const ExperimentConfig& cfg, const Team& team, const std::string& label);

/// Observation ablation arms in presentation order.
struct AblationArm {
  std::string label;
  ObsFlags flags;
};
std::vector<AblationArm> ablation_arms(bool communication);

/// Command bodies. Each writes only inside `out` and leaves a manifest.
void cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
void cmd_eval(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
void cmd_ablate_obs(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
void cmd_transfer(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
/// Inputs are trace files or run directories holding traces.jsonl. An empty
/// `out` only prints the table.
void cmd_report(const std::vector<std::string>& inputs, const std::filesystem::path& out,
                std::ostream& log);

}  // namespace cyberdef
