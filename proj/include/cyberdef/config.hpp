#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cyberdef/types.hpp"

namespace cyberdef {

struct TopologyConfig {
  int defended_subnets = 7;
  int min_hosts = 4;
  int max_hosts = 16;
  int min_services = 1;
  int max_services = 10;
  /// Distinct service ids; decoys draw from ids a host does not run.
  int service_catalog = 16;
  int agents = 5;
  /// Defended subnet hosting the OT service; -1 picks the default zone.
  int ot_subnet = -1;
  /// Draw a fresh topology for every episode (observations are then padded
  /// to max_hosts slots per subnet).
  bool randomize_per_episode = false;
};

struct RewardTable {
  std::array<double, 3> green_failure{-1.0, -2.0, -3.0};
  std::array<double, 3> impact_ot{-5.0, -10.0, -10.0};
  double restore_cost = -2.0;
  bool degrade_penalty = true;
  /// subnet id -> per-phase multiplier on green-failure penalties.
  std::map<int, std::array<double, 3>> subnet_phase_multiplier;
};

struct DetectionModel {
  double aggressive_discovery_alert = 0.75;
  double stealthy_discovery_alert = 0.25;
  double exploit_alert = 0.5;
  double privesc_alert = 0.5;
  double monitor_detect = 0.3;
  double green_false_positive = 0.01;
  double phishing_foothold = 0.005;
};

struct GreenModel {
  /// Per host per step chance that the green user acts.
  double activity = 0.3;
  /// Chance an AccessService stays inside the user's own subnet.
  double local_access = 0.7;
  double degraded_failure = 0.5;
  double stopped_failure = 1.0;
};

struct RedConfig {
  std::string variant = "default";
  /// Optional tabular matrix file overriding the variant's built-in rows.
  std::string matrix_file;
  double remote_scan = 0.1;
  double deception_detect = 0.5;
  double exploit_success = 1.0;
};

struct ObsFlags {
  bool history = true;
  bool ioc = true;
  bool decoy_ioc = true;
  bool communication = false;
  bool operator==(const ObsFlags&) const = default;
};

struct ScenarioConfig {
  TopologyConfig topology;
  std::uint64_t topology_seed = 7;
  int episode_length = 500;
  std::array<int, 2> phase_boundaries{167, 333};
  RewardTable rewards;
  DetectionModel detection;
  GreenModel green;
  RedConfig red;
  int decoy_cap = 3;
  /// Per phase: subnet pairs the mission policy says should be blocked.
  std::array<std::vector<std::pair<int, int>>, 3> mission_blocks;
  ObsFlags features;

  Phase phase_at(int step) const {
    if (step < phase_boundaries[0]) return Phase::P1;
    if (step < phase_boundaries[1]) return Phase::P2;
    return Phase::P3;
  }

  /// Throws ConfigError naming the offending key.
  void validate() const;

  /// The full-size network (8 subnets, 500-step episodes).
  static ScenarioConfig paper();
  /// Two defended subnets plus the contractor, two agents, 100 steps.
  static ScenarioConfig desk();
};

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& yaml_text,
                              ScenarioConfig base = ScenarioConfig::paper());
std::string dump_scenario(const ScenarioConfig& cfg);

}  // namespace cyberdef
