#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyberdef/team.hpp"
#include "cyberdef/trace.hpp"

namespace cyberdef {

/// One decision of one agent. Rewards of the in-progress steps that follow
/// are added to the decision that launched the action.
struct DecisionRecord {
  int unit = 0;
  int step = 0;
  Transition sub;
  std::optional<Transition> master;
};

struct EpisodeOutput {
  std::uint64_t seed = 0;
  double total_reward = 0.0;
  std::vector<std::vector<DecisionRecord>> decisions;
  std::optional<EpisodeTrace> trace;
};

struct RolloutOptions {
  /// Keep transitions for training.
  bool record = true;
  bool greedy = false;
  bool trace = false;
  double reward_scale = 1.0;
};

std::uint64_t episode_seed(std::uint64_t base, int iteration, int episode);

EpisodeOutput run_episode(NetworkEnv& env, const Team& team, std::uint64_t seed,
                          const RolloutOptions& options, int episode_index = 0);

/// Runs one episode per seed on `workers` threads, each with its own
/// environment. Results are returned in seed order regardless of scheduling.
std::vector<EpisodeOutput> run_episodes(const ScenarioConfig& scenario, const Team& team,
                                        std::span<const std::uint64_t> seeds,
                                        const RolloutOptions& options, int workers = 1);

struct EvalResult {
  std::vector<double> rewards;
  std::vector<EpisodeTrace> traces;
  double mean() const;
  double std() const;
};

/// Exploration is on unless `greedy`; the team is not modified.
EvalResult evaluate(const ScenarioConfig& scenario, const Team& team, std::uint64_t seed,
                    int episodes, bool greedy = false, bool traces = false, int workers = 1);

}  // namespace cyberdef
