#include "cyberdef/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

#include "cyberdef/errors.hpp"

namespace cyberdef {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("scenario config: " + what);
}

bool is_prob(double p) { return p >= 0.0 && p <= 1.0; }

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (node && node[key]) {
    try {
      out = node[key].as<T>();
    } catch (const YAML::Exception& e) {
      throw ConfigError(std::string("scenario config: bad value for '") + key +
                        "': " + e.what());
    }
  }
}

void read_range(const YAML::Node& node, const char* key, int& lo, int& hi) {
  if (!node || !node[key]) return;
  const auto v = node[key].as<std::vector<int>>();
  require(v.size() == 2, std::string(key) + " must be [min, max]");
  lo = v[0];
  hi = v[1];
}

void read_triple(const YAML::Node& node, const char* key,
                 std::array<double, 3>& out) {
  if (!node || !node[key]) return;
  const auto v = node[key].as<std::vector<double>>();
  require(v.size() == 3, std::string(key) + " needs one value per phase");
  std::copy(v.begin(), v.end(), out.begin());
}

}  // namespace

void ScenarioConfig::validate() const {
  const auto& t = topology;
  require(t.defended_subnets >= 1 && t.defended_subnets <= 7,
          "topology.defended_subnets must be in [1,7]");
  require(t.min_hosts >= 1 && t.min_hosts <= t.max_hosts && t.max_hosts <= 16,
          "topology.hosts_per_subnet must satisfy 1 <= min <= max <= 16");
  require(t.min_services >= 1 && t.min_services <= t.max_services &&
              t.max_services <= 10,
          "topology.services_per_host must satisfy 1 <= min <= max <= 10");
  require(t.service_catalog > t.max_services && t.service_catalog <= 64,
          "topology.service_catalog must exceed max services (id 0 is the OT service) and be <= 64");
  require(t.agents >= 1 && t.agents <= t.defended_subnets,
          "topology.agents must be in [1, defended_subnets]");
  require(t.ot_subnet == -1 ||
              (t.ot_subnet >= 1 && t.ot_subnet <= t.defended_subnets),
          "topology.ot_subnet must name a defended subnet");
  require(episode_length >= 1, "episode.length must be positive");
  require(phase_boundaries[0] >= 0 &&
              phase_boundaries[0] <= phase_boundaries[1],
          "episode.phase_boundaries must be non-decreasing");
  for (double v : rewards.green_failure) require(v <= 0, "rewards must be <= 0");
  for (double v : rewards.impact_ot) require(v <= 0, "rewards must be <= 0");
  require(rewards.restore_cost <= 0, "rewards.restore_cost must be <= 0");
  const auto& d = detection;
  for (double p : {d.aggressive_discovery_alert, d.stealthy_discovery_alert,
                   d.exploit_alert, d.privesc_alert, d.monitor_detect,
                   d.green_false_positive, d.phishing_foothold})
    require(is_prob(p), "detection probabilities must be in [0,1]");
  for (double p : {green.activity, green.local_access, green.degraded_failure,
                   green.stopped_failure})
    require(is_prob(p), "green probabilities must be in [0,1]");
  for (double p : {red.remote_scan, red.deception_detect, red.exploit_success})
    require(is_prob(p), "red probabilities must be in [0,1]");
  require(decoy_cap >= 0, "blue.decoy_cap must be >= 0");
}

ScenarioConfig ScenarioConfig::paper() { return ScenarioConfig{}; }

ScenarioConfig ScenarioConfig::desk() {
  ScenarioConfig c;
  c.topology.defended_subnets = 2;
  c.topology.agents = 2;
  c.topology.min_hosts = 4;
  c.topology.max_hosts = 6;
  c.topology.min_services = 1;
  c.topology.max_services = 4;
  c.topology.service_catalog = 8;
  c.topology.ot_subnet = 2;
  c.episode_length = 100;
  c.phase_boundaries = {33, 66};
  c.rewards.subnet_phase_multiplier[0] = {0.2, 0.2, 0.2};
  c.red.remote_scan = 0.3;
  return c;
}

ScenarioConfig parse_scenario(const std::string& yaml_text,
                              ScenarioConfig c) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario config: ") + e.what());
  }
  if (!root || root.IsNull()) return c;
  if (root["base"]) {
    const auto base = root["base"].as<std::string>();
    if (base == "desk")
      c = ScenarioConfig::desk();
    else if (base == "paper")
      c = ScenarioConfig::paper();
    else
      throw ConfigError("scenario config: unknown base '" + base + "'");
  }

  if (auto t = root["topology"]) {
    read(t, "defended_subnets", c.topology.defended_subnets);
    read_range(t, "hosts_per_subnet", c.topology.min_hosts, c.topology.max_hosts);
    read_range(t, "services_per_host", c.topology.min_services,
               c.topology.max_services);
    read(t, "service_catalog", c.topology.service_catalog);
    read(t, "agents", c.topology.agents);
    read(t, "ot_subnet", c.topology.ot_subnet);
    read(t, "randomize_per_episode", c.topology.randomize_per_episode);
    read(t, "seed", c.topology_seed);
  }
  if (auto e = root["episode"]) {
    read(e, "length", c.episode_length);
    if (e["phase_boundaries"]) {
      const auto v = e["phase_boundaries"].as<std::vector<int>>();
      require(v.size() == 2, "episode.phase_boundaries needs two steps");
      c.phase_boundaries = {v[0], v[1]};
    }
  }
  if (auto r = root["rewards"]) {
    read_triple(r, "green_failure", c.rewards.green_failure);
    read_triple(r, "impact_ot", c.rewards.impact_ot);
    read(r, "restore_cost", c.rewards.restore_cost);
    read(r, "degrade_penalty", c.rewards.degrade_penalty);
    if (auto m = r["subnet_phase_multiplier"]) {
      for (const auto& kv : m) {
        const auto v = kv.second.as<std::vector<double>>();
        require(v.size() == 3, "subnet_phase_multiplier needs 3 values");
        c.rewards.subnet_phase_multiplier[kv.first.as<int>()] = {v[0], v[1], v[2]};
      }
    }
  }
  if (auto d = root["detection"]) {
    read(d, "aggressive_discovery_alert", c.detection.aggressive_discovery_alert);
    read(d, "stealthy_discovery_alert", c.detection.stealthy_discovery_alert);
    read(d, "exploit_alert", c.detection.exploit_alert);
    read(d, "privesc_alert", c.detection.privesc_alert);
    read(d, "monitor_detect", c.detection.monitor_detect);
    read(d, "green_false_positive", c.detection.green_false_positive);
    read(d, "phishing_foothold", c.detection.phishing_foothold);
  }
  if (auto g = root["green"]) {
    read(g, "activity", c.green.activity);
    read(g, "local_access", c.green.local_access);
    read(g, "degraded_failure", c.green.degraded_failure);
    read(g, "stopped_failure", c.green.stopped_failure);
  }
  if (auto r = root["red"]) {
    read(r, "variant", c.red.variant);
    read(r, "matrix_file", c.red.matrix_file);
    read(r, "remote_scan", c.red.remote_scan);
    read(r, "deception_detect", c.red.deception_detect);
    read(r, "exploit_success", c.red.exploit_success);
  }
  if (auto b = root["blue"]) {
    read(b, "decoy_cap", c.decoy_cap);
    if (auto mb = b["mission_blocks"]) {
      for (int p = 0; p < 3; ++p) {
        const std::string key = "P" + std::to_string(p + 1);
        if (!mb[key]) continue;
        c.mission_blocks[p].clear();
        for (const auto& pair : mb[key]) {
          const auto v = pair.as<std::vector<int>>();
          require(v.size() == 2, "mission_blocks entries are [a, b]");
          c.mission_blocks[p].emplace_back(v[0], v[1]);
        }
      }
    }
  }
  if (auto f = root["features"]) {
    read(f, "history", c.features.history);
    read(f, "ioc", c.features.ioc);
    read(f, "decoy_ioc", c.features.decoy_ioc);
    read(f, "communication", c.features.communication);
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string dump_scenario(const ScenarioConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << c.topology_seed;
  out << YAML::Key << "defended_subnets" << YAML::Value << c.topology.defended_subnets;
  out << YAML::Key << "hosts_per_subnet" << YAML::Value << YAML::Flow
      << std::vector<int>{c.topology.min_hosts, c.topology.max_hosts};
  out << YAML::Key << "services_per_host" << YAML::Value << YAML::Flow
      << std::vector<int>{c.topology.min_services, c.topology.max_services};
  out << YAML::Key << "service_catalog" << YAML::Value << c.topology.service_catalog;
  out << YAML::Key << "agents" << YAML::Value << c.topology.agents;
  out << YAML::Key << "ot_subnet" << YAML::Value << c.topology.ot_subnet;
  out << YAML::Key << "randomize_per_episode" << YAML::Value
      << c.topology.randomize_per_episode;
  out << YAML::EndMap;

  out << YAML::Key << "episode" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "length" << YAML::Value << c.episode_length;
  out << YAML::Key << "phase_boundaries" << YAML::Value << YAML::Flow
      << std::vector<int>{c.phase_boundaries[0], c.phase_boundaries[1]};
  out << YAML::EndMap;

  auto triple = [](const std::array<double, 3>& a) {
    return std::vector<double>(a.begin(), a.end());
  };
  out << YAML::Key << "rewards" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "green_failure" << YAML::Value << YAML::Flow
      << triple(c.rewards.green_failure);
  out << YAML::Key << "impact_ot" << YAML::Value << YAML::Flow
      << triple(c.rewards.impact_ot);
  out << YAML::Key << "restore_cost" << YAML::Value << c.rewards.restore_cost;
  out << YAML::Key << "degrade_penalty" << YAML::Value << c.rewards.degrade_penalty;
  if (!c.rewards.subnet_phase_multiplier.empty()) {
    out << YAML::Key << "subnet_phase_multiplier" << YAML::Value << YAML::BeginMap;
    for (const auto& [s, m] : c.rewards.subnet_phase_multiplier)
      out << YAML::Key << s << YAML::Value << YAML::Flow << triple(m);
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  const auto& d = c.detection;
  out << YAML::Key << "detection" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "aggressive_discovery_alert" << YAML::Value << d.aggressive_discovery_alert;
  out << YAML::Key << "stealthy_discovery_alert" << YAML::Value << d.stealthy_discovery_alert;
  out << YAML::Key << "exploit_alert" << YAML::Value << d.exploit_alert;
  out << YAML::Key << "privesc_alert" << YAML::Value << d.privesc_alert;
  out << YAML::Key << "monitor_detect" << YAML::Value << d.monitor_detect;
  out << YAML::Key << "green_false_positive" << YAML::Value << d.green_false_positive;
  out << YAML::Key << "phishing_foothold" << YAML::Value << d.phishing_foothold;
  out << YAML::EndMap;

  out << YAML::Key << "green" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "activity" << YAML::Value << c.green.activity;
  out << YAML::Key << "local_access" << YAML::Value << c.green.local_access;
  out << YAML::Key << "degraded_failure" << YAML::Value << c.green.degraded_failure;
  out << YAML::Key << "stopped_failure" << YAML::Value << c.green.stopped_failure;
  out << YAML::EndMap;

  out << YAML::Key << "red" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "variant" << YAML::Value << c.red.variant;
  out << YAML::Key << "matrix_file" << YAML::Value << c.red.matrix_file;
  out << YAML::Key << "remote_scan" << YAML::Value << c.red.remote_scan;
  out << YAML::Key << "deception_detect" << YAML::Value << c.red.deception_detect;
  out << YAML::Key << "exploit_success" << YAML::Value << c.red.exploit_success;
  out << YAML::EndMap;

  out << YAML::Key << "blue" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "decoy_cap" << YAML::Value << c.decoy_cap;
  out << YAML::Key << "mission_blocks" << YAML::Value << YAML::BeginMap;
  for (int p = 0; p < 3; ++p) {
    out << YAML::Key << ("P" + std::to_string(p + 1)) << YAML::Value << YAML::BeginSeq;
    for (const auto& [a, b] : c.mission_blocks[p])
      out << YAML::Flow << std::vector<int>{a, b};
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::Key << "features" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "history" << YAML::Value << c.features.history;
  out << YAML::Key << "ioc" << YAML::Value << c.features.ioc;
  out << YAML::Key << "decoy_ioc" << YAML::Value << c.features.decoy_ioc;
  out << YAML::Key << "communication" << YAML::Value << c.features.communication;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace cyberdef
