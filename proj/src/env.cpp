#include "cyberdef/env.hpp"

#include <algorithm>
#include <cstdio>

#include "cyberdef/adversaries.hpp"
#include "cyberdef/errors.hpp"

namespace cyberdef {

namespace {

bool is_host_action(BlueAction k) {
  return k == BlueAction::Analyse || k == BlueAction::DeployDecoy ||
         k == BlueAction::Remove || k == BlueAction::Restore;
}

bool owns_host(const Topology& t, int agent, int host) {
  return host >= 0 && host < t.host_count() && t.owner_of_host(host) == agent;
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string truth_digest(const TruthRecord& truth) {
  std::vector<unsigned char> bytes;
  bytes.reserve(truth.footholds.size() + 8);
  for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<unsigned char>(truth.step >> (8 * i)));
  for (auto f : truth.footholds) bytes.push_back(static_cast<unsigned char>(f));
  bytes.push_back(truth.ot_available ? 1 : 0);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(bytes.data(), bytes.size())));
  return buf;
}

double TruthRecord::clean_fraction(bool include_contractor,
                                   const Topology& t) const {
  int total = 0, clean = 0;
  for (int h = 0; h < static_cast<int>(footholds.size()); ++h) {
    if (!include_contractor && t.is_contractor_host(h)) continue;
    ++total;
    if (footholds[h] == Foothold::None) ++clean;
  }
  return total == 0 ? 1.0 : static_cast<double>(clean) / total;
}

NetworkEnv::NetworkEnv(ScenarioConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto variant = parse_red_variant(config_.red.variant);
  if (!variant) throw ConfigError("unknown red variant '" + config_.red.variant + "'");
  variant_ = *variant;
  matrix_ = builtin_matrix(variant_);
  if (!config_.red.matrix_file.empty())
    matrix_ = load_matrix(config_.red.matrix_file, matrix_);
  matrix_.validate();
  remote_scan_ =
      variant_ == RedVariant::ExternalScan ? 0.5 : config_.red.remote_scan;
  fixed_topology_ = generate_topology(config_.topology_seed, config_.topology);
  reset(0);
}

const NetworkState& NetworkEnv::reset(std::uint64_t seed) {
  rng_.reseed(derive_seed(seed, 0xE4F));
  NetworkState s;
  s.topology = config_.topology.randomize_per_episode
                   ? generate_topology(derive_seed(config_.topology_seed, seed),
                                       config_.topology)
                   : fixed_topology_;
  const auto& t = s.topology;
  s.hosts.resize(t.host_count());
  for (int h = 0; h < t.host_count(); ++h) {
    auto& rec = s.hosts[h];
    rec.host_id = h;
    rec.subnet_id = t.host_subnet[h];
    rec.services = t.services[h];
  }
  for (int sub = 0; sub < t.subnet_count; ++sub)
    s.red.push_back(make_red_machine(sub, variant_, matrix_, t.host_count()));

  const auto& contractor = t.subnet_hosts[kContractorSubnet];
  const int seed_host =
      contractor[rng_.uniform_int(0, static_cast<int>(contractor.size()) - 1)];
  auto& rec = s.hosts[seed_host];
  rec.foothold = Foothold::Root;
  rec.had_user = true;
  rec.malicious_files.push_back({s.next_file_id++, Foothold::User});
  rec.malicious_files.push_back({s.next_file_id++, Foothold::Root});
  s.red[kContractorSubnet].states[seed_host] = AttackState::RootFoothold;

  s.mission_phase = config_.phase_at(0);
  state_ = std::move(s);
  spaces_.clear();
  for (int a = 0; a < state_.topology.agent_count(); ++a)
    spaces_.emplace_back(state_.topology, a);
  return state_;
}

void NetworkEnv::validate(const JointAction& joint) const {
  const auto& t = state_.topology;
  if (static_cast<int>(joint.size()) != t.agent_count())
    throw InvalidTargetError("joint action must hold one command per blue agent");
  for (int a = 0; a < t.agent_count(); ++a) {
    const ActionSpec& act = joint[a].action;
    if (act.actor != ActorClass::Blue)
      throw InvalidTargetError("blue agents may only submit blue actions");
    if (state_.pending.count(a) && !act.is_sleep())
      throw RejectedActionError("agent " + std::to_string(a) +
                                " has an action in progress; only Sleep is allowed");
    const BlueAction k = act.blue_kind();
    if (is_host_action(k)) {
      if (act.target.kind != Target::Kind::Host || !owns_host(t, a, act.target.id))
        throw InvalidTargetError("agent " + std::to_string(a) + ": " + to_string(act) +
                                 " targets a host outside its subnets");
    } else if (k == BlueAction::BlockTraffic || k == BlueAction::AllowTraffic) {
      const int z = act.target.id;
      if (act.target.kind != Target::Kind::Subnet || z < 0 || z >= t.subnet_count ||
          t.subnet_agent[z] == a)
        throw InvalidTargetError("agent " + std::to_string(a) + ": invalid zone for " +
                                 to_string(act));
    }
  }
}

void NetworkEnv::route(const Event& e, int actor, StepResult& out) const {
  const auto& t = state_.topology;
  out.log.push_back(e);
  switch (e.type) {
    case EventType::Alert:
    case EventType::DecoyAccess: {
      const int owner = t.owner_of_host(e.host);
      if (owner >= 0) out.agent_events[owner].push_back(e);
      break;
    }
    case EventType::MaliciousFile:
    case EventType::AnalyseClean:
    case EventType::DecoyDeployed:
    case EventType::DecoyRejected:
    case EventType::RecoveryCompleted:
    case EventType::TrafficChanged:
    case EventType::MonitorCompleted:
      if (actor >= 0) out.agent_events[actor].push_back(e);
      break;
    case EventType::Message:
      for (int a = 0; a < t.agent_count(); ++a)
        if (a != e.source) out.agent_events[a].push_back(e);
      break;
    case EventType::Penalty:
      out.penalties.push_back(e);
      out.reward += e.value;
      break;
    case EventType::RedAction:
    case EventType::GreenAccess:
    case EventType::Phishing:
      break;
  }
}

EventList NetworkEnv::apply_blue_effect(int agent, const PendingAction& pa) {
  EventList events;
  auto& s = state_;
  const auto& t = s.topology;
  const ActionSpec& act = pa.action;
  const int h = act.target.id;
  switch (act.blue_kind()) {
    case BlueAction::Sleep:
      break;
    case BlueAction::Monitor: {
      for (int sub : t.agent_subnets[agent])
        for (int host : t.subnet_hosts[sub])
          if (s.hosts[host].foothold != Foothold::None &&
              rng_.bernoulli(config_.detection.monitor_detect))
            events.push_back(Event::alert(host, AlertKind::Process));
      Event e;
      e.type = EventType::MonitorCompleted;
      events.push_back(e);
      break;
    }
    case BlueAction::Analyse: {
      const auto& files = s.hosts[h].malicious_files;
      for (const auto& f : files) {
        Event e;
        e.type = EventType::MaliciousFile;
        e.host = h;
        e.detail = static_cast<int>(f.level);
        events.push_back(e);
      }
      if (files.empty()) {
        Event e;
        e.type = EventType::AnalyseClean;
        e.host = h;
        events.push_back(e);
      }
      break;
    }
    case BlueAction::DeployDecoy: {
      auto& rec = s.hosts[h];
      std::vector<int> unused;
      for (int id = 1; id < t.service_catalog; ++id)
        if (!rec.runs(id) && !rec.has_decoy(id)) unused.push_back(id);
      Event e;
      e.host = h;
      if (static_cast<int>(rec.decoys.size()) >= config_.decoy_cap || unused.empty()) {
        e.type = EventType::DecoyRejected;
      } else {
        e.type = EventType::DecoyDeployed;
        e.detail = unused[rng_.uniform_int(0, static_cast<int>(unused.size()) - 1)];
        rec.decoys.push_back(e.detail);
      }
      events.push_back(e);
      break;
    }
    case BlueAction::Remove:
    case BlueAction::Restore: {
      auto& rec = s.hosts[h];
      if (act.blue_kind() == BlueAction::Remove) {
        if (rec.foothold == Foothold::User) rec.foothold = Foothold::None;
        std::erase_if(rec.malicious_files,
                      [](const MaliciousFile& f) { return f.level == Foothold::User; });
      } else {
        rec.foothold = Foothold::None;
        rec.malicious_files.clear();
        rec.degraded_services.clear();
        rec.stopped_services.clear();
        rec.decoys.clear();
        events.push_back(Event::penalty(PenaltyKind::RestoreCost,
                                        config_.rewards.restore_cost, h));
      }
      sync_red_knowledge(s, h);
      Event e;
      e.type = EventType::RecoveryCompleted;
      e.host = h;
      e.detail = static_cast<int>(act.blue_kind());
      e.submitted_step = pa.submitted_step;
      events.push_back(e);
      break;
    }
    case BlueAction::BlockTraffic:
    case BlueAction::AllowTraffic: {
      const bool block = act.blue_kind() == BlueAction::BlockTraffic;
      for (int own : t.agent_subnets[agent]) {
        if (block) {
          s.blocked_pairs.insert({own, h});
          s.blocked_pairs.insert({h, own});
        } else {
          s.blocked_pairs.erase({own, h});
          s.blocked_pairs.erase({h, own});
        }
      }
      Event e;
      e.type = EventType::TrafficChanged;
      e.subnet = h;
      e.detail = block ? 1 : 0;
      events.push_back(e);
      break;
    }
  }
  return events;
}

StepResult NetworkEnv::step(const JointAction& joint) {
  if (done()) throw ContractError("step() called after the episode ended");
  validate(joint);
  auto& s = state_;
  const auto& t = s.topology;
  StepResult out;
  out.agent_events.resize(t.agent_count());

  for (int a = 0; a < t.agent_count(); ++a) {
    PendingAction current;
    if (auto it = s.pending.find(a); it != s.pending.end()) {
      if (--it->second.remaining > 0) continue;
      current = it->second;
      s.pending.erase(it);
    } else {
      current = {joint[a].action, joint[a].action.duration, s.step_index};
      if (current.action.duration > 1) {
        current.remaining = current.action.duration - 1;
        s.pending[a] = current;
        continue;
      }
    }
    for (const auto& e : apply_blue_effect(a, current)) route(e, a, out);
  }

  for (auto& machine : s.red) {
    if (machine.pending) {
      if (--machine.pending->remaining > 0) continue;
      const RedChoice choice{machine.pending->action, machine.pending->source_host};
      machine.pending.reset();
      for (const auto& e : red_apply_outcome(s, machine, choice, config_, rng_))
        route(e, -1, out);
      continue;
    }
    const auto choice = red_select_action(machine, s, remote_scan_, rng_);
    if (!choice) continue;
    if (choice->action.duration > 1) {
      machine.pending = PendingRed{choice->action, choice->action.duration - 1,
                                   choice->source_host};
      continue;
    }
    for (const auto& e : red_apply_outcome(s, machine, *choice, config_, rng_))
      route(e, -1, out);
  }

  for (int h = 0; h < t.host_count(); ++h)
    if (rng_.bernoulli(config_.green.activity))
      for (const auto& e : green_act(s, h, config_, rng_)) route(e, -1, out);

  for (int a = 0; a < t.agent_count(); ++a) {
    if (!config_.features.communication || joint[a].message == 0) continue;
    Event e;
    e.type = EventType::Message;
    e.source = a;
    e.detail = joint[a].message;
    route(e, a, out);
  }

  ++s.step_index;
  s.mission_phase = config_.phase_at(s.step_index);
  out.done = done();
  return out;
}

TruthRecord NetworkEnv::truth_snapshot() const {
  TruthRecord r;
  r.step = state_.step_index;
  r.footholds.reserve(state_.hosts.size());
  for (const auto& h : state_.hosts) r.footholds.push_back(h.foothold);
  r.ot_available = state_.ot_available();
  return r;
}

StateView NetworkEnv::view() const {
  StateView v;
  const int n = state_.topology.subnet_count;
  v.phase = state_.mission_phase;
  v.subnet_count = n;
  v.blocked.assign(n * n, 0);
  v.mission_blocked.assign(n * n, 0);
  for (const auto& [a, b] : state_.blocked_pairs) v.blocked[a * n + b] = 1;
  for (const auto& [a, b] : config_.mission_blocks[static_cast<int>(v.phase)]) {
    if (a < 0 || b < 0 || a >= n || b >= n) continue;
    v.mission_blocked[a * n + b] = 1;
    v.mission_blocked[b * n + a] = 1;
  }
  return v;
}

}  // namespace cyberdef
