#include "cyberdef/adversaries.hpp"

#include <algorithm>

namespace cyberdef {

namespace {

bool holds_foothold(AttackState s) {
  return s == AttackState::UserFoothold || s == AttackState::RootFoothold;
}

void add_file(NetworkState& state, HostRecord& host, Foothold level) {
  host.malicious_files.push_back({state.next_file_id++, level});
}

Event red_event(const RedChoice& c, int host, int subnet, bool success) {
  Event e;
  e.type = EventType::RedAction;
  e.detail = c.action.kind;
  e.host = host;
  e.subnet = subnet;
  e.source = c.source_host;
  e.success = success;
  return e;
}

template <typename Pred>
int pick_service(const HostRecord& h, Pred keep, Rng& rng) {
  std::vector<int> options;
  for (int s : h.services)
    if (keep(s)) options.push_back(s);
  if (options.empty()) return -1;
  return options[rng.uniform_int(0, static_cast<int>(options.size()) - 1)];
}

}  // namespace

RedStateMachine make_red_machine(int home_subnet, RedVariant variant,
                                 const TransitionMatrix& matrix,
                                 int host_count) {
  RedStateMachine m;
  m.home_subnet = home_subnet;
  m.variant = variant;
  m.matrix = matrix;
  m.states.assign(host_count, AttackState::Unknown);
  return m;
}

std::optional<RedChoice> red_select_action(const RedStateMachine& machine,
                                           const NetworkState& state,
                                           double remote_scan, Rng& rng) {
  const auto& topo = state.topology;
  std::vector<int> footholds;
  std::vector<int> candidates;
  for (int h = 0; h < static_cast<int>(machine.states.size()); ++h) {
    const auto s = machine.states[h];
    if (holds_foothold(s)) footholds.push_back(h);
    if (is_actionable(s)) candidates.push_back(h);
  }
  if (footholds.empty() || candidates.empty()) return std::nullopt;

  const int host =
      candidates[rng.uniform_int(0, static_cast<int>(candidates.size()) - 1)];
  auto row = machine.matrix.row(machine.states[host]);
  if (topo.is_contractor_host(host))
    row[static_cast<std::size_t>(RedAction::Withdraw)] = 0.0;
  const auto action = static_cast<RedAction>(rng.categorical(row));

  RedChoice choice;
  choice.row_host = host;
  choice.source_host =
      footholds[rng.uniform_int(0, static_cast<int>(footholds.size()) - 1)];
  if (action == RedAction::DiscoverRemoteSystems) {
    int subnet = machine.home_subnet;
    if (rng.bernoulli(remote_scan)) {
      std::vector<int> remote;
      for (int s = 0; s < topo.subnet_count; ++s)
        if (s != machine.home_subnet && topo.adjacent(machine.home_subnet, s))
          remote.push_back(s);
      if (!remote.empty())
        subnet = remote[rng.uniform_int(0, static_cast<int>(remote.size()) - 1)];
    }
    choice.action = ActionSpec::red(action, Target::subnet(subnet));
  } else {
    choice.action = ActionSpec::red(action, Target::host(host));
  }
  return choice;
}

EventList red_apply_outcome(NetworkState& state, RedStateMachine& machine,
                            const RedChoice& choice,
                            const ScenarioConfig& config, Rng& rng) {
  EventList events;
  const auto& topo = state.topology;
  const auto& det = config.detection;
  const RedAction kind = choice.action.red_kind();

  if (kind == RedAction::DiscoverRemoteSystems) {
    const int subnet = choice.action.target.id;
    const bool ok = state.reachable(machine.home_subnet, subnet);
    if (ok) {
      for (int h : topo.subnet_hosts[subnet]) {
        auto& s = machine.states[h];
        if (s == AttackState::Unknown || s == AttackState::Withdrawn)
          s = AttackState::Discovered;
      }
    }
    events.push_back(red_event(choice, -1, subnet, ok));
    return events;
  }

  const int h = choice.action.target.id;
  HostRecord& host = state.hosts[h];
  const int subnet = host.subnet_id;
  const bool path = state.reachable(machine.home_subnet, subnet);
  auto& known = machine.states[h];
  bool ok = false;

  switch (kind) {
    case RedAction::AggressiveServiceDiscovery:
    case RedAction::StealthServiceDiscovery: {
      ok = path;
      if (!ok) break;
      if (known == AttackState::Discovered) known = AttackState::ServicesKnown;
      const double p = kind == RedAction::AggressiveServiceDiscovery
                           ? det.aggressive_discovery_alert
                           : det.stealthy_discovery_alert;
      if (rng.bernoulli(p)) events.push_back(Event::alert(h, AlertKind::Connection));
      break;
    }
    case RedAction::ExploitNetworkServices: {
      if (!path || known != AttackState::ServicesKnown) break;
      const int real = static_cast<int>(host.services.size());
      const int total = real + static_cast<int>(host.decoys.size());
      const int pick = rng.uniform_int(0, total - 1);
      if (pick >= real) {
        Event e;
        e.type = EventType::DecoyAccess;
        e.host = h;
        e.subnet = subnet;
        e.source = choice.source_host;
        e.detail = host.decoys[pick - real];
        events.push_back(e);
        events.push_back(Event::alert(h, AlertKind::Connection));
        break;
      }
      if (!rng.bernoulli(config.red.exploit_success)) break;
      ok = true;
      if (host.foothold == Foothold::None) host.foothold = Foothold::User;
      host.had_user = true;
      add_file(state, host, Foothold::User);
      if (rng.bernoulli(det.exploit_alert))
        events.push_back(Event::alert(h, AlertKind::Process));
      const auto gained = host.foothold == Foothold::Root
                              ? AttackState::RootFoothold
                              : AttackState::UserFoothold;
      if (subnet != machine.home_subnet) {
        known = AttackState::Unknown;
        auto& owner = state.red[subnet].states[h];
        if (!holds_foothold(owner) || gained == AttackState::RootFoothold)
          owner = gained;
      } else {
        known = gained;
      }
      break;
    }
    case RedAction::PrivilegeEscalate: {
      if (host.foothold == Foothold::None) {
        sync_red_knowledge(state, h);
        break;
      }
      ok = true;
      host.foothold = Foothold::Root;
      add_file(state, host, Foothold::Root);
      known = AttackState::RootFoothold;
      if (rng.bernoulli(det.privesc_alert))
        events.push_back(Event::alert(h, AlertKind::Process));
      break;
    }
    case RedAction::Impact: {
      if (host.foothold != Foothold::Root) {
        sync_red_knowledge(state, h);
        break;
      }
      if (h == topo.ot_host) {
        ok = true;
        if (!host.stopped(kOtService)) host.stopped_services.push_back(kOtService);
        const double v = config.rewards.impact_ot[static_cast<int>(state.mission_phase)];
        events.push_back(Event::penalty(PenaltyKind::OtImpact, v, h));
      } else {
        const int s = pick_service(host, [&](int x) { return !host.stopped(x); }, rng);
        if (s >= 0) {
          ok = true;
          host.stopped_services.push_back(s);
        }
      }
      break;
    }
    case RedAction::DegradeServices: {
      if (host.foothold != Foothold::Root) {
        sync_red_knowledge(state, h);
        break;
      }
      const int s = pick_service(host, [&](int x) { return !host.degraded(x); }, rng);
      if (s >= 0) {
        ok = true;
        host.degraded_services.push_back(s);
      }
      break;
    }
    case RedAction::DiscoverDeception: {
      if (!path) break;
      ok = true;
      if (!host.decoys.empty() && rng.bernoulli(config.red.deception_detect))
        known = AttackState::DeceptionSuspected;
      break;
    }
    case RedAction::Withdraw: {
      if (host.foothold == Foothold::None || topo.is_contractor_host(h)) break;
      ok = true;
      host.foothold = Foothold::None;
      host.malicious_files.clear();
      sync_red_knowledge(state, h);
      known = AttackState::Withdrawn;
      break;
    }
    case RedAction::DiscoverRemoteSystems:
      break;
  }
  events.insert(events.begin(), red_event(choice, h, subnet, ok));
  return events;
}

void sync_red_knowledge(NetworkState& state, int host) {
  const Foothold truth = state.hosts[host].foothold;
  for (auto& m : state.red) {
    auto& s = m.states[host];
    if (!holds_foothold(s)) continue;
    if (truth == Foothold::None)
      s = AttackState::ServicesKnown;
    else if (truth == Foothold::User)
      s = AttackState::UserFoothold;
  }
}

double green_failure_penalty(const ScenarioConfig& config, Phase phase,
                             int subnet) {
  if (!config.rewards.degrade_penalty) return 0.0;
  const int p = static_cast<int>(phase);
  double v = config.rewards.green_failure[p];
  if (auto it = config.rewards.subnet_phase_multiplier.find(subnet);
      it != config.rewards.subnet_phase_multiplier.end())
    v *= it->second[p];
  return v;
}

EventList green_local_work(NetworkState& state, int host,
                           const ScenarioConfig& config, Rng& rng) {
  EventList events;
  HostRecord& rec = state.hosts[host];
  if (rng.bernoulli(config.detection.phishing_foothold) &&
      rec.foothold == Foothold::None) {
    rec.foothold = Foothold::User;
    rec.had_user = true;
    add_file(state, rec, Foothold::User);
    auto& owner = state.red[rec.subnet_id].states[host];
    owner = AttackState::UserFoothold;
    Event e;
    e.type = EventType::Phishing;
    e.host = host;
    e.subnet = rec.subnet_id;
    events.push_back(e);
  }
  if (rng.bernoulli(config.detection.green_false_positive))
    events.push_back(Event::alert(host, static_cast<AlertKind>(rng.uniform_int(0, 1))));
  return events;
}

EventList green_access_service(NetworkState& state, int host, int target_host,
                               int service, const ScenarioConfig& config,
                               Rng& rng) {
  EventList events;
  const int from = state.hosts[host].subnet_id;
  const HostRecord& target = state.hosts[target_host];
  bool ok = state.reachable(from, target.subnet_id);
  if (ok && target.stopped(service))
    ok = !rng.bernoulli(config.green.stopped_failure);
  else if (ok && target.degraded(service))
    ok = !rng.bernoulli(config.green.degraded_failure);

  Event e;
  e.type = EventType::GreenAccess;
  e.host = host;
  e.source = target_host;
  e.detail = service;
  e.success = ok;
  events.push_back(e);
  if (!ok) {
    const double v =
        green_failure_penalty(config, state.mission_phase, target.subnet_id);
    if (v != 0.0) events.push_back(Event::penalty(PenaltyKind::GreenFailure, v, target_host));
  }
  if (rng.bernoulli(config.detection.green_false_positive))
    events.push_back(Event::alert(host, static_cast<AlertKind>(rng.uniform_int(0, 1))));
  return events;
}

EventList green_act(NetworkState& state, int host, const ScenarioConfig& config,
                    Rng& rng) {
  if (rng.bernoulli(0.5)) return green_local_work(state, host, config, rng);
  const auto& topo = state.topology;
  const int own = state.hosts[host].subnet_id;
  int subnet = own;
  if (!rng.bernoulli(config.green.local_access)) {
    std::vector<int> remote;
    for (int s = 0; s < topo.subnet_count; ++s)
      if (s != own && topo.adjacent(own, s)) remote.push_back(s);
    if (!remote.empty())
      subnet = remote[rng.uniform_int(0, static_cast<int>(remote.size()) - 1)];
  }
  const auto& hosts = topo.subnet_hosts[subnet];
  const int target = hosts[rng.uniform_int(0, static_cast<int>(hosts.size()) - 1)];
  const auto& services = state.hosts[target].services;
  const int service =
      services[rng.uniform_int(0, static_cast<int>(services.size()) - 1)];
  return green_access_service(state, host, target, service, config, rng);
}

}  // namespace cyberdef
