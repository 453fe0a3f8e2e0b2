#pragma once

#include <optional>

#include "cyberdef/config.hpp"
#include "cyberdef/events.hpp"
#include "cyberdef/rng.hpp"
#include "cyberdef/state.hpp"

namespace cyberdef {

struct RedChoice {
  ActionSpec action;
  /// Host red launches from (a foothold it holds).
  int source_host = -1;
  /// Known host whose attack state supplied the matrix row.
  int row_host = -1;
};

/// Picks one actionable known host uniformly, then an action from that
/// state's matrix row. Returns nullopt while the agent holds no foothold.
std::optional<RedChoice> red_select_action(const RedStateMachine& machine,
                                           const NetworkState& state,
                                           double remote_scan, Rng& rng);

/// Applies a completed red action to the ground truth. Failures are events,
/// never exceptions.
EventList red_apply_outcome(NetworkState& state, RedStateMachine& machine,
                            const RedChoice& choice,
                            const ScenarioConfig& config, Rng& rng);

/// One green user turn: AccessService or LocalWork with equal chance.
EventList green_act(NetworkState& state, int host, const ScenarioConfig& config,
                    Rng& rng);
EventList green_local_work(NetworkState& state, int host,
                           const ScenarioConfig& config, Rng& rng);
EventList green_access_service(NetworkState& state, int host, int target_host,
                               int service, const ScenarioConfig& config,
                               Rng& rng);

/// Penalty for a failed green access into `subnet` during `phase`.
double green_failure_penalty(const ScenarioConfig& config, Phase phase,
                             int subnet);

/// Re-aligns red knowledge with ground truth after a host lost footholds.
void sync_red_knowledge(NetworkState& state, int host);

RedStateMachine make_red_machine(int home_subnet, RedVariant variant,
                                 const TransitionMatrix& matrix, int host_count);

}  // namespace cyberdef
