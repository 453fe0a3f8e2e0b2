#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cyberdef/env.hpp"
#include "cyberdef/observation.hpp"
#include "cyberdef/ppo.hpp"

namespace cyberdef {

enum class StrategyKind : std::uint8_t {
  MarlDecentralized,
  MarlCentralizedCritic,
  HmarlExpert,
  HmarlMeta,
  HmarlCollective,
};
std::string_view to_string(StrategyKind s);
/// Throws ConfigError for unknown names.
StrategyKind parse_strategy(const std::string& name);

enum class MasterKind : std::uint8_t { None, ExpertDeterministic, ExpertProbabilistic, Meta };
std::string_view to_string(MasterKind m);

/// Primitive actions (indices into the agent's action space) owned by a
/// sub-policy.
std::vector<int> subpolicy_actions(const BlueActionSpace& space, SubPolicyId id);

struct PolicyUnit {
  std::string name;
  SubPolicyId id = SubPolicyId::Investigate;
  /// Local action -> index into the agent's action space (identity for flat
  /// policies). Unused by masters.
  std::vector<int> actions;
  Learner actor;
  /// Absent when a shared centralized critic supplies values.
  std::optional<Learner> critic;
  bool frozen = false;
  ReplayMemory memory;
};

struct AgentPolicy {
  int agent = 0;
  ObsLayout layout;
  int action_count = 0;
  /// One unit for flat strategies, one per registered sub-policy otherwise.
  std::vector<PolicyUnit> units;
  std::optional<PolicyUnit> master;
};

struct TeamSpec {
  StrategyKind strategy = StrategyKind::MarlDecentralized;
  MasterKind master = MasterKind::None;
  std::vector<SubPolicyId> registry;

  bool hierarchical() const { return !registry.empty(); }
  bool centralized() const { return strategy == StrategyKind::MarlCentralizedCritic; }
  /// Defaults per strategy: Expert uses the two-policy registry.
  static TeamSpec for_strategy(StrategyKind s);
};

struct Team {
  TeamSpec spec;
  ObsFlags flags;
  std::vector<AgentPolicy> agents;
  std::optional<Learner> central_critic;
  ReplayMemory central_memory;

  int unit_index(SubPolicyId id) const;
  /// Digest over all sub-policy (or flat) actor and critic parameters.
  std::string subpolicy_hash() const;
  std::string master_hash() const;
  std::string full_hash() const;
  void set_frozen(SubPolicyId id, bool frozen);
  void freeze_all_units(bool frozen);
};

Team make_team(const NetworkEnv& env, TeamSpec spec, const TrainConfig& cfg, Rng& rng);

/// Phase one-hot, 4 flags per host (user, root, decoy present, service
/// degraded or stopped) and one flag per unordered blocked subnet pair.
std::vector<double> global_state(const NetworkState& state);
int global_state_length(const Topology& topology);
int central_critic_input_length(const NetworkEnv& env);

}  // namespace cyberdef
