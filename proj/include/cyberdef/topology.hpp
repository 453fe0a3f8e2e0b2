#pragma once

#include <cstdint>
#include <vector>

#include "cyberdef/config.hpp"

namespace cyberdef {

inline constexpr int kContractorSubnet = 0;
/// Service id reserved for the critical OT service.
inline constexpr int kOtService = 0;

/// Static network layout. Subnet 0 is the undefended contractor network;
/// defended subnets are numbered 1..n.
struct Topology {
  int subnet_count = 0;
  std::vector<std::vector<int>> subnet_hosts;
  std::vector<int> host_subnet;
  std::vector<int> host_index;
  std::vector<std::vector<int>> services;
  std::vector<std::vector<int>> agent_subnets;
  std::vector<int> subnet_agent;
  std::vector<std::vector<std::uint8_t>> adjacency;
  int ot_host = -1;
  int service_catalog = 0;
  /// Host slots reserved per subnet in observation/action layouts when
  /// topologies vary between episodes; 0 means "use the actual host count".
  int slots_per_subnet = 0;

  int host_count() const { return static_cast<int>(host_subnet.size()); }
  int agent_count() const { return static_cast<int>(agent_subnets.size()); }
  bool adjacent(int a, int b) const { return a == b || adjacency[a][b] != 0; }
  bool is_contractor_host(int h) const {
    return host_subnet[h] == kContractorSubnet;
  }
  int owner_of_host(int h) const { return subnet_agent[host_subnet[h]]; }
  bool operator==(const Topology&) const = default;
};

/// Deterministic for a fixed seed. Throws ConfigError on out-of-range config.
Topology generate_topology(std::uint64_t seed, const TopologyConfig& config);

}  // namespace cyberdef
