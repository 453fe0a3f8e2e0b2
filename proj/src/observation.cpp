#include "cyberdef/observation.hpp"

#include <algorithm>

#include "cyberdef/errors.hpp"

namespace cyberdef {

namespace {

std::uint8_t merge_priority(std::uint8_t current, int priority) {
  if (current == 0) return static_cast<std::uint8_t>(priority);
  return static_cast<std::uint8_t>(std::min<int>(current, priority));
}

}  // namespace

std::string_view to_string(SubPolicyId id) {
  switch (id) {
    case SubPolicyId::Investigate: return "Investigate";
    case SubPolicyId::Recover: return "Recover";
    case SubPolicyId::ControlTraffic: return "ControlTraffic";
  }
  return "?";
}

ObsLayout make_layout(const Topology& t, int agent, const ObsFlags& flags) {
  ObsLayout l;
  l.subnet_count = t.subnet_count;
  l.own_subnets = t.agent_subnets.at(agent);
  for (int s : l.own_subnets) {
    const int n = t.slots_per_subnet > 0
                      ? t.slots_per_subnet
                      : static_cast<int>(t.subnet_hosts[s].size());
    l.slots_per_own_subnet.push_back(n);
    l.slots += n;
  }
  l.peers = t.agent_count() - 1;
  l.communication = flags.communication;
  return l;
}

int AgentHistory::slot_of(int host) const {
  auto it = std::find(slots.begin(), slots.end(), host);
  return (host < 0 || it == slots.end()) ? -1 : static_cast<int>(it - slots.begin());
}

AgentHistory make_history(const Topology& t, int agent, const ObsFlags& flags) {
  AgentHistory h;
  h.agent = agent;
  h.flags = flags;
  h.layout = make_layout(t, agent, flags);
  for (std::size_t i = 0; i < h.layout.own_subnets.size(); ++i) {
    const auto& hosts = t.subnet_hosts[h.layout.own_subnets[i]];
    for (int k = 0; k < h.layout.slots_per_own_subnet[i]; ++k)
      h.slots.push_back(k < static_cast<int>(hosts.size()) ? hosts[k] : -1);
  }
  for (int a = 0; a < t.agent_count(); ++a)
    if (a != agent) h.peers.push_back(a);
  h.alerts.assign(2 * h.slots.size(), 0);
  h.ioc.assign(h.slots.size(), 0);
  h.messages.assign(h.peers.size(), 0);
  return h;
}

int assign_ioc_priority(const Event& e) {
  if (e.type == EventType::DecoyAccess) return 3;
  if (e.type == EventType::MaliciousFile)
    return static_cast<Foothold>(e.detail) == Foothold::Root ? 1 : 2;
  throw DomainError("assign_ioc_priority: " + std::string(to_string(e.type)) +
                    " is not an indicator of compromise");
}

void update_history(AgentHistory& h, const EventList& events) {
  if (!h.flags.history) {
    std::fill(h.alerts.begin(), h.alerts.end(), 0);
    std::fill(h.ioc.begin(), h.ioc.end(), 0);
  }
  std::fill(h.messages.begin(), h.messages.end(), 0);

  for (const auto& e : events) {
    switch (e.type) {
      case EventType::Alert: {
        const int slot = h.slot_of(e.host);
        if (slot >= 0) h.alerts[2 * slot + e.detail] = 1;
        break;
      }
      case EventType::MaliciousFile: {
        const int slot = h.slot_of(e.host);
        if (slot >= 0 && h.flags.ioc)
          h.ioc[slot] = merge_priority(h.ioc[slot], assign_ioc_priority(e));
        break;
      }
      case EventType::DecoyAccess: {
        // The indicator is the address of the host issuing the request.
        const int slot = h.slot_of(e.source);
        if (slot >= 0 && h.flags.decoy_ioc)
          h.ioc[slot] = merge_priority(h.ioc[slot], assign_ioc_priority(e));
        break;
      }
      case EventType::RecoveryCompleted: {
        const int slot = h.slot_of(e.host);
        if (slot < 0) break;
        h.alerts[2 * slot] = h.alerts[2 * slot + 1] = 0;
        if (static_cast<BlueAction>(e.detail) == BlueAction::Restore || h.ioc[slot] != 1)
          h.ioc[slot] = 0;
        break;
      }
      case EventType::Message: {
        auto it = std::find(h.peers.begin(), h.peers.end(), e.source);
        if (it == h.peers.end()) break;
        const auto bits = static_cast<std::uint8_t>(e.detail);
        h.messages[it - h.peers.begin()] = bits;
        if (auto decoded = decode_message(bits); decoded && h.flags.decoy_ioc) {
          const auto& own = h.layout.own_subnets;
          int base = 0;
          for (std::size_t i = 0; i < own.size(); ++i) {
            if (own[i] == decoded->first &&
                decoded->second < h.layout.slots_per_own_subnet[i]) {
              const int slot = base + decoded->second;
              if (h.slots[slot] >= 0) h.ioc[slot] = merge_priority(h.ioc[slot], 3);
            }
            base += h.layout.slots_per_own_subnet[i];
          }
        }
        break;
      }
      default:
        break;
    }
  }
}

std::vector<double> encode_observation(const AgentHistory& h, const StateView& view) {
  const auto& l = h.layout;
  std::vector<double> obs(l.length(), 0.0);
  obs[static_cast<int>(view.phase)] = 1.0;
  const int n = l.subnet_count;
  int off = l.subnet_offset();
  for (int own : l.own_subnets) {
    obs[off + own] = 1.0;
    for (int z = 0; z < n; ++z) {
      obs[off + n + z] = view.blocked[own * n + z];
      obs[off + 2 * n + z] = view.mission_blocked[own * n + z];
    }
    off += 3 * n;
  }
  for (std::size_t i = 0; i < h.alerts.size(); ++i) obs[l.alert_offset() + i] = h.alerts[i];
  for (std::size_t i = 0; i < h.ioc.size(); ++i) obs[l.ioc_offset() + i] = h.ioc[i];
  if (l.communication) {
    for (std::size_t p = 0; p < h.messages.size(); ++p)
      for (int b = 0; b < 8; ++b)
        obs[l.message_offset() + 8 * p + b] = (h.messages[p] >> (7 - b)) & 1;
  }
  return obs;
}

void mark_in_progress(std::span<double> obs) {
  for (int i = 0; i < 3; ++i) obs[i] = -obs[i];
}

std::uint8_t encode_message(int subnet, int host_index) {
  if (subnet < 1 || subnet > 7 || host_index < 0 || host_index > 15)
    throw DomainError("encode_message: subnet must be in 1..7 and host index in 0..15");
  return static_cast<std::uint8_t>(0x80 | (subnet << 4) | host_index);
}

std::optional<std::pair<int, int>> decode_message(std::uint8_t bits) {
  if ((bits & 0x80) == 0) return std::nullopt;
  const int subnet = (bits >> 4) & 0x7;
  if (subnet == 0) return std::nullopt;
  return std::make_pair(subnet, bits & 0xF);
}

std::uint8_t outgoing_message(const AgentHistory& h, const Topology& t) {
  int best = -1;
  for (std::size_t s = 0; s < h.ioc.size(); ++s) {
    if (h.ioc[s] == 0 || h.slots[s] < 0) continue;
    if (best < 0 || h.ioc[s] < h.ioc[best]) best = static_cast<int>(s);
  }
  if (best < 0) return 0;
  const int host = h.slots[best];
  return encode_message(t.host_subnet[host], t.host_index[host]);
}

bool network_ioc(const AgentHistory& h) {
  return std::any_of(h.messages.begin(), h.messages.end(),
                     [](std::uint8_t m) { return decode_message(m).has_value(); });
}

bool host_ioc(const AgentHistory& h) {
  return std::any_of(h.ioc.begin(), h.ioc.end(), [](std::uint8_t v) { return v != 0; });
}

int subobservation_length(const ObsLayout& l, SubPolicyId id) {
  switch (id) {
    case SubPolicyId::Recover: return 3 + l.slots;
    case SubPolicyId::Investigate: return 3 + 3 * l.slots;
    case SubPolicyId::ControlTraffic: return 3 + l.subnet_len() + l.subnet_count;
  }
  throw DomainError("unknown sub-policy id");
}

std::vector<double> transform_for_subpolicy(std::span<const double> obs,
                                            const ObsLayout& l, SubPolicyId id) {
  if (static_cast<int>(obs.size()) != l.length())
    throw ShapeError("transform_for_subpolicy: observation length mismatch");
  const int len = subobservation_length(l, id);
  std::vector<double> out;
  out.reserve(len);
  out.insert(out.end(), obs.begin(), obs.begin() + 3);
  switch (id) {
    case SubPolicyId::Recover:
      out.insert(out.end(), obs.begin() + l.ioc_offset(),
                 obs.begin() + l.ioc_offset() + l.slots);
      break;
    case SubPolicyId::Investigate:
      out.insert(out.end(), obs.begin() + l.alert_offset(),
                 obs.begin() + l.alert_offset() + 2 * l.slots);
      for (int s = 0; s < l.slots; ++s)
        out.push_back(obs[l.ioc_offset() + s] == 3.0 ? 1.0 : 0.0);
      break;
    case SubPolicyId::ControlTraffic: {
      out.insert(out.end(), obs.begin() + l.subnet_offset(),
                 obs.begin() + l.subnet_offset() + l.subnet_len());
      std::vector<double> flags(l.subnet_count, 0.0);
      int base = 0;
      for (std::size_t i = 0; i < l.own_subnets.size(); ++i) {
        for (int k = 0; k < l.slots_per_own_subnet[i]; ++k)
          if (obs[l.ioc_offset() + base + k] != 0.0) flags[l.own_subnets[i]] = 1.0;
        base += l.slots_per_own_subnet[i];
      }
      if (l.communication) {
        for (int p = 0; p < l.peers; ++p) {
          int bits = 0;
          for (int b = 0; b < 8; ++b)
            bits = (bits << 1) | (obs[l.message_offset() + 8 * p + b] != 0.0 ? 1 : 0);
          if (auto d = decode_message(static_cast<std::uint8_t>(bits)))
            if (d->first < l.subnet_count) flags[d->first] = 1.0;
        }
      }
      out.insert(out.end(), flags.begin(), flags.end());
      break;
    }
  }
  return out;
}

}  // namespace cyberdef
