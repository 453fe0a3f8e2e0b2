#pragma once

#include <cstdint>
#include <vector>

#include "cyberdef/topology.hpp"
#include "cyberdef/types.hpp"

namespace cyberdef {

/// Flat primitive action indexing for one blue agent:
///   [Sleep, Monitor, Analyse x slots, DeployDecoy x slots, Remove x slots,
///    Restore x slots, BlockTraffic x zones, AllowTraffic x zones]
/// Slots are host positions in the agent's subnets (padded when topologies
/// vary between episodes); zones are every subnet the agent does not own.
class BlueActionSpace {
 public:
  BlueActionSpace() = default;
  BlueActionSpace(const Topology& topology, int agent);

  int size() const { return 2 + 4 * slot_count() + 2 * zone_count(); }
  int slot_count() const { return static_cast<int>(slots_.size()); }
  int zone_count() const { return static_cast<int>(zones_.size()); }
  const std::vector<int>& slots() const { return slots_; }
  const std::vector<int>& zones() const { return zones_; }
  int agent() const { return agent_; }

  /// Index of (kind, slot-or-zone); Sleep/Monitor ignore the position.
  int index(BlueAction kind, int position = 0) const;
  BlueAction kind_of(int index) const;
  int position_of(int index) const;

  /// Throws InvalidTargetError for an empty slot.
  ActionSpec decode(int index) const;
  int encode(const ActionSpec& action) const;
  /// 1 where the index maps to a real host or zone.
  std::vector<std::uint8_t> valid_mask() const;
  int slot_of_host(int host) const;

 private:
  int agent_ = -1;
  std::vector<int> slots_;
  std::vector<int> zones_;
};

}  // namespace cyberdef
