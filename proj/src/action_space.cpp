#include "cyberdef/action_space.hpp"

#include <algorithm>

#include "cyberdef/errors.hpp"

namespace cyberdef {

BlueActionSpace::BlueActionSpace(const Topology& topology, int agent)
    : agent_(agent) {
  const auto& own = topology.agent_subnets.at(agent);
  for (int s : own) {
    const auto& hosts = topology.subnet_hosts[s];
    const int n = topology.slots_per_subnet > 0
                      ? topology.slots_per_subnet
                      : static_cast<int>(hosts.size());
    for (int i = 0; i < n; ++i)
      slots_.push_back(i < static_cast<int>(hosts.size()) ? hosts[i] : -1);
  }
  for (int s = 0; s < topology.subnet_count; ++s)
    if (std::find(own.begin(), own.end(), s) == own.end()) zones_.push_back(s);
}

int BlueActionSpace::index(BlueAction kind, int position) const {
  const int n = slot_count();
  switch (kind) {
    case BlueAction::Sleep: return 0;
    case BlueAction::Monitor: return 1;
    case BlueAction::Analyse: return 2 + position;
    case BlueAction::DeployDecoy: return 2 + n + position;
    case BlueAction::Remove: return 2 + 2 * n + position;
    case BlueAction::Restore: return 2 + 3 * n + position;
    case BlueAction::BlockTraffic: return 2 + 4 * n + position;
    case BlueAction::AllowTraffic: return 2 + 4 * n + zone_count() + position;
  }
  return 0;
}

BlueAction BlueActionSpace::kind_of(int index) const {
  const int n = slot_count();
  if (index < 0 || index >= size()) throw InvalidTargetError("action index out of range");
  if (index == 0) return BlueAction::Sleep;
  if (index == 1) return BlueAction::Monitor;
  index -= 2;
  if (index < 4 * n)
    return static_cast<BlueAction>(static_cast<int>(BlueAction::Analyse) + index / n);
  index -= 4 * n;
  return index < zone_count() ? BlueAction::BlockTraffic : BlueAction::AllowTraffic;
}

int BlueActionSpace::position_of(int index) const {
  const int n = slot_count();
  if (index < 2) return 0;
  index -= 2;
  if (index < 4 * n) return index % n;
  index -= 4 * n;
  return index % zone_count();
}

ActionSpec BlueActionSpace::decode(int index) const {
  const BlueAction kind = kind_of(index);
  const int pos = position_of(index);
  switch (kind) {
    case BlueAction::Sleep:
    case BlueAction::Monitor:
      return ActionSpec::blue(kind);
    case BlueAction::BlockTraffic:
    case BlueAction::AllowTraffic:
      return ActionSpec::blue(kind, Target::subnet(zones_[pos]));
    default:
      if (slots_[pos] < 0) throw InvalidTargetError("action on an empty host slot");
      return ActionSpec::blue(kind, Target::host(slots_[pos]));
  }
}

int BlueActionSpace::slot_of_host(int host) const {
  auto it = std::find(slots_.begin(), slots_.end(), host);
  return it == slots_.end() ? -1 : static_cast<int>(it - slots_.begin());
}

int BlueActionSpace::encode(const ActionSpec& a) const {
  const BlueAction kind = a.blue_kind();
  switch (kind) {
    case BlueAction::Sleep:
    case BlueAction::Monitor:
      return index(kind);
    case BlueAction::BlockTraffic:
    case BlueAction::AllowTraffic: {
      auto it = std::find(zones_.begin(), zones_.end(), a.target.id);
      if (it == zones_.end()) throw InvalidTargetError("zone not addressable by agent");
      return index(kind, static_cast<int>(it - zones_.begin()));
    }
    default: {
      const int slot = slot_of_host(a.target.id);
      if (slot < 0 || a.target.id < 0) throw InvalidTargetError("host not owned by agent");
      return index(kind, slot);
    }
  }
}

std::vector<std::uint8_t> BlueActionSpace::valid_mask() const {
  std::vector<std::uint8_t> mask(size(), 1);
  for (int i = 0; i < size(); ++i) {
    const BlueAction k = kind_of(i);
    if (k >= BlueAction::Analyse && k <= BlueAction::Restore &&
        slots_[position_of(i)] < 0)
      mask[i] = 0;
  }
  return mask;
}

}  // namespace cyberdef
