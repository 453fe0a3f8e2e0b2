#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cyberdef/rollout.hpp"
#include "cyberdef/team.hpp"

namespace cyberdef {

struct CurveRow {
  int iteration = 0;
  int episodes = 0;
  std::size_t samples = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
};

struct TrainResult {
  std::vector<CurveRow> curve;
  double final_mean() const;
};

struct TrainHooks {
  /// Called after every iteration with the updated team.
  std::function<void(const CurveRow&, const Team&)> on_iteration;
  /// Which units learn; defaults to every unit that is not frozen.
  bool update_units = true;
  bool update_master = true;
  /// Checked after every iteration; returning true ends training early.
  std::function<bool(const TrainResult&)> stop;
};

/// True once the smoothed return improved by less than `tolerance`
/// (relative) over the last `window` iterations.
bool plateaued(const TrainResult& result, int window = 20, double tolerance = 0.02);

int episodes_per_iteration(const TrainConfig& cfg, const ScenarioConfig& scenario, int agents);

/// Shared on-policy loop: collect, estimate advantages per agent timeline,
/// split transitions into each policy's memory and update.
TrainResult train_team(Team& team, const ScenarioConfig& scenario, const TrainConfig& cfg,
                       std::uint64_t seed, int iterations, const TrainHooks& hooks = {});

/// Flat per-agent actor and critic on local observations.
TrainResult train_ippo(Team& team, const ScenarioConfig& scenario, const TrainConfig& cfg,
                       std::uint64_t seed, const TrainHooks& hooks = {});
/// Flat local actors with one critic over global state and all actions.
TrainResult train_centralized_critic(Team& team, const ScenarioConfig& scenario,
                                     const TrainConfig& cfg, std::uint64_t seed,
                                     const TrainHooks& hooks = {});

void write_curve_csv(std::ostream& out, const TrainResult& result);

}  // namespace cyberdef
