#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cyberdef/config.hpp"
#include "cyberdef/env.hpp"
#include "cyberdef/events.hpp"
#include "cyberdef/topology.hpp"

namespace cyberdef {

enum class SubPolicyId : std::uint8_t { Investigate, Recover, ControlTraffic };
inline constexpr int kSubPolicyKinds = 3;
std::string_view to_string(SubPolicyId id);

/// Offsets of the fixed observation layout:
///   phase one-hot (3) | per own subnet: assignment, blocked, mission-block
///   flags over all subnets | 2 alert bits per host slot | IOC value per slot |
///   8 message bits per peer agent (communication only)
struct ObsLayout {
  int subnet_count = 0;
  std::vector<int> own_subnets;
  /// Host slots contributed by each own subnet, same order as own_subnets.
  std::vector<int> slots_per_own_subnet;
  int slots = 0;
  int peers = 0;
  bool communication = false;

  int phase_offset() const { return 0; }
  int subnet_offset() const { return 3; }
  int subnet_len() const {
    return static_cast<int>(own_subnets.size()) * 3 * subnet_count;
  }
  int alert_offset() const { return subnet_offset() + subnet_len(); }
  int ioc_offset() const { return alert_offset() + 2 * slots; }
  int message_offset() const { return ioc_offset() + slots; }
  int length() const {
    return message_offset() + (communication ? 8 * peers : 0);
  }
  bool operator==(const ObsLayout&) const = default;
};

ObsLayout make_layout(const Topology& topology, int agent, const ObsFlags& flags);

struct AgentHistory {
  int agent = -1;
  ObsFlags flags;
  ObsLayout layout;
  /// slot -> host id (-1 for padding).
  std::vector<int> slots;
  /// Peer agent ids in message-block order.
  std::vector<int> peers;
  std::vector<std::uint8_t> alerts;
  std::vector<std::uint8_t> ioc;
  std::vector<std::uint8_t> messages;
  std::vector<double> last_observation;

  int slot_of(int host) const;
  bool operator==(const AgentHistory&) const = default;
};

AgentHistory make_history(const Topology& topology, int agent, const ObsFlags& flags);

/// 1 for root-level files, 2 for user-level files, 3 for decoy accesses.
/// Throws DomainError for any other event.
int assign_ioc_priority(const Event& event);

/// Union semantics; recoveries clear the host's entries. Restore clears
/// everything, Remove keeps root-level indicators. Without the history flag
/// only the current step's events are kept.
void update_history(AgentHistory& history, const EventList& events);

std::vector<double> encode_observation(const AgentHistory& history,
                                       const StateView& view);

/// Replaces the phase one-hot with its negation: the "action in progress"
/// encoding fed while an agent waits on a multi-step action.
void mark_in_progress(std::span<double> observation);

/// First (most significant) bit is the validity flag, then 3 bits of subnet
/// (1..7) and 4 bits of host index (0..15). Throws DomainError when out of range.
std::uint8_t encode_message(int subnet, int host_index);
std::optional<std::pair<int, int>> decode_message(std::uint8_t bits);

/// Message an agent broadcasts: its highest-priority IOC host, or 0.
std::uint8_t outgoing_message(const AgentHistory& history, const Topology& topology);
/// True when a peer reported an IOC in the last step.
bool network_ioc(const AgentHistory& history);
bool host_ioc(const AgentHistory& history);

int subobservation_length(const ObsLayout& layout, SubPolicyId id);
/// Each coordinate is computed from observation coordinates only.
std::vector<double> transform_for_subpolicy(std::span<const double> observation,
                                            const ObsLayout& layout, SubPolicyId id);

}  // namespace cyberdef
