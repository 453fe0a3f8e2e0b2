#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "cyberdef/red_machine.hpp"
#include "cyberdef/topology.hpp"
#include "cyberdef/types.hpp"

namespace cyberdef {

struct MaliciousFile {
  int id = 0;
  Foothold level = Foothold::User;
  auto operator<=>(const MaliciousFile&) const = default;
};

struct HostRecord {
  int host_id = -1;
  int subnet_id = -1;
  std::vector<int> services;
  Foothold foothold = Foothold::None;
  /// Set once red held a user session here; root requires it.
  bool had_user = false;
  std::vector<MaliciousFile> malicious_files;
  std::vector<int> decoys;
  std::vector<int> degraded_services;
  std::vector<int> stopped_services;

  bool runs(int service) const {
    return std::binary_search(services.begin(), services.end(), service);
  }
  bool has_decoy(int service) const {
    return std::find(decoys.begin(), decoys.end(), service) != decoys.end();
  }
  bool degraded(int service) const {
    return std::find(degraded_services.begin(), degraded_services.end(),
                     service) != degraded_services.end();
  }
  bool stopped(int service) const {
    return std::find(stopped_services.begin(), stopped_services.end(),
                     service) != stopped_services.end();
  }
  bool operator==(const HostRecord&) const = default;
};

struct PendingAction {
  ActionSpec action;
  int remaining = 0;
  int submitted_step = 0;
  bool operator==(const PendingAction&) const = default;
};

struct NetworkState {
  Topology topology;
  std::vector<HostRecord> hosts;
  std::set<std::pair<int, int>> blocked_pairs;
  Phase mission_phase = Phase::P1;
  int step_index = 0;
  std::map<int, PendingAction> pending;
  /// One finite-state red agent per subnet, indexed by home subnet.
  std::vector<RedStateMachine> red;
  int next_file_id = 1;

  bool blocked(int a, int b) const {
    return a != b && blocked_pairs.count({a, b}) != 0;
  }
  /// Red or green traffic between two subnets.
  bool reachable(int from_subnet, int to_subnet) const {
    return topology.adjacent(from_subnet, to_subnet) &&
           !blocked(from_subnet, to_subnet);
  }
  bool ot_available() const {
    return !hosts[topology.ot_host].stopped(kOtService);
  }
  bool operator==(const NetworkState&) const = default;
};

}  // namespace cyberdef
