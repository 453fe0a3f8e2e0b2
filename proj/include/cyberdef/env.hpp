#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cyberdef/action_space.hpp"
#include "cyberdef/config.hpp"
#include "cyberdef/events.hpp"
#include "cyberdef/rng.hpp"
#include "cyberdef/state.hpp"

namespace cyberdef {

/// What one blue agent submits each step. `message` is broadcast to the other
/// blue agents (only meaningful when communication is enabled).
struct BlueCommand {
  ActionSpec action = ActionSpec::sleep();
  std::uint8_t message = 0;
};
using JointAction = std::vector<BlueCommand>;

struct StepResult {
  double reward = 0.0;
  /// Every penalty event; reward is exactly their sum.
  EventList penalties;
  /// Events each blue agent is allowed to see.
  std::vector<EventList> agent_events;
  /// Full ground-truth event log for the step.
  EventList log;
  bool done = false;
};

/// Ground truth consumed by metrics; never read by blue policies.
struct TruthRecord {
  int step = 0;
  std::vector<Foothold> footholds;
  bool ot_available = true;

  double clean_fraction(bool include_contractor, const Topology& t) const;
  bool operator==(const TruthRecord&) const = default;
};

/// Blue-visible slice of the state used for observation encoding.
struct StateView {
  Phase phase = Phase::P1;
  int subnet_count = 0;
  /// Row-major subnet x subnet flags.
  std::vector<std::uint8_t> blocked;
  std::vector<std::uint8_t> mission_blocked;
};

class NetworkEnv {
 public:
  explicit NetworkEnv(ScenarioConfig config);

  const NetworkState& reset(std::uint64_t seed);
  /// Throws RejectedActionError (non-Sleep while pending) or
  /// InvalidTargetError before touching the state.
  StepResult step(const JointAction& joint);

  TruthRecord truth_snapshot() const;
  StateView view() const;

  const NetworkState& state() const { return state_; }
  /// For scripted scenarios in tests and tools.
  NetworkState& mutable_state() { return state_; }
  const ScenarioConfig& config() const { return config_; }
  const Topology& topology() const { return state_.topology; }
  const TransitionMatrix& red_matrix() const { return matrix_; }
  bool done() const { return state_.step_index >= config_.episode_length; }
  bool pending(int agent) const { return state_.pending.count(agent) != 0; }
  int agent_count() const { return state_.topology.agent_count(); }
  const BlueActionSpace& action_space(int agent) const { return spaces_.at(agent); }

 private:
  void validate(const JointAction& joint) const;
  EventList apply_blue_effect(int agent, const PendingAction& action);
  void route(const Event& e, int actor, StepResult& out) const;

  ScenarioConfig config_;
  TransitionMatrix matrix_;
  RedVariant variant_ = RedVariant::Default;
  double remote_scan_ = 0.1;
  Topology fixed_topology_;
  NetworkState state_;
  std::vector<BlueActionSpace> spaces_;
  Rng rng_;
};

/// Digest of a truth record, stable across platforms.
std::string truth_digest(const TruthRecord& truth);
std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace cyberdef
