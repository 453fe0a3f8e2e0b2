#pragma once

#include <algorithm>

#include "cyberdef/env.hpp"

namespace cyberdef::testing {

inline ScenarioConfig quiet_desk() {
  ScenarioConfig c = ScenarioConfig::desk();
  c.green.activity = 0.0;
  return c;
}

/// Clears every red agent's knowledge so no red action is chosen.
inline void silence_red(NetworkEnv& env) {
  for (auto& m : env.mutable_state().red) {
    std::fill(m.states.begin(), m.states.end(), AttackState::Unknown);
    m.pending.reset();
  }
}

inline JointAction all_sleep(const NetworkEnv& env) {
  return JointAction(static_cast<std::size_t>(env.agent_count()));
}

inline int first_host(const Topology& t, int subnet) { return t.subnet_hosts.at(subnet).front(); }

inline void compromise(NetworkEnv& env, int host, Foothold level) {
  auto& s = env.mutable_state();
  auto& h = s.hosts[host];
  h.foothold = level;
  h.had_user = true;
  h.malicious_files.push_back({s.next_file_id++, Foothold::User});
  if (level == Foothold::Root) h.malicious_files.push_back({s.next_file_id++, Foothold::Root});
}

}  // namespace cyberdef::testing
