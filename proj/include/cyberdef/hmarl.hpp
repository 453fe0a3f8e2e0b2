#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cyberdef/observation.hpp"
#include "cyberdef/rng.hpp"
#include "cyberdef/team.hpp"
#include "cyberdef/training.hpp"

namespace cyberdef {

/// Rule-based master. Host IOCs always select Recover. With ControlTraffic
/// registered, the deterministic rule picks it on a network IOC; the
/// probabilistic rule splits the remaining cases 75/25 between Investigate and
/// ControlTraffic.
SubPolicyId expert_select(const AgentHistory& history, const std::vector<SubPolicyId>& registry,
                          MasterKind kind, Rng& rng);

/// The expert routes each decision; every sub-policy learns from its
/// own memory. Frozen sub-policies only act.
TrainResult train_subpolicies(Team& team, const ScenarioConfig& scenario, const TrainConfig& cfg,
                              std::uint64_t seed, const TrainHooks& hooks = {});

/// Learns the meta master over frozen sub-policies. Throws
/// ContractError when any sub-policy is not frozen.
TrainResult train_master(Team& team, const ScenarioConfig& scenario, const TrainConfig& cfg,
                         std::uint64_t seed, const TrainHooks& hooks = {});

/// Master and sub-policies learned together from scratch.
TrainResult train_collective(Team& team, const ScenarioConfig& scenario, const TrainConfig& cfg,
                             std::uint64_t seed, const TrainHooks& hooks = {});

/// Warm-started sub-policy training against another red variant, updating only `target`.
TrainResult fine_tune_subpolicy(Team& team, SubPolicyId target, const ScenarioConfig& scenario,
                                const TrainConfig& cfg, int iterations, std::uint64_t seed,
                                const TrainHooks& hooks = {});

struct CurriculumResult {
  TrainResult subpolicies;
  TrainResult master;
};

/// Trains `expert`'s sub-policies until the return plateaus (at most
/// cfg.iterations), copies them into `meta`, freezes them and trains the
/// master for cfg.iterations.
CurriculumResult train_meta_curriculum(Team& meta, Team& expert, const ScenarioConfig& scenario,
                                       const TrainConfig& cfg, std::uint64_t seed,
                                       const TrainHooks& sub_hooks = {},
                                       const TrainHooks& master_hooks = {});

/// Copies the sub-policy units of `source` into a team of the same layout
/// (the master, if any, is left as is).
void adopt_subpolicies(Team& target, const Team& source);

}  // namespace cyberdef
