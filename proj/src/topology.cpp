#include "cyberdef/topology.hpp"

#include <algorithm>
#include <numeric>

#include "cyberdef/errors.hpp"
#include "cyberdef/rng.hpp"

namespace cyberdef {

namespace {

void check(const TopologyConfig& c) {
  ScenarioConfig probe;
  probe.topology = c;
  probe.validate();
}

}  // namespace

Topology generate_topology(std::uint64_t seed, const TopologyConfig& config) {
  check(config);
  Rng rng(derive_seed(seed, 0x7090));
  Topology t;
  t.subnet_count = config.defended_subnets + 1;
  t.service_catalog = config.service_catalog;
  t.slots_per_subnet = config.randomize_per_episode ? config.max_hosts : 0;
  t.subnet_hosts.resize(t.subnet_count);

  for (int s = 0; s < t.subnet_count; ++s) {
    const int n = rng.uniform_int(config.min_hosts, config.max_hosts);
    for (int i = 0; i < n; ++i) {
      const int h = t.host_count();
      t.subnet_hosts[s].push_back(h);
      t.host_subnet.push_back(s);
      t.host_index.push_back(i);
    }
  }

  std::vector<int> pool(config.service_catalog - 1);
  std::iota(pool.begin(), pool.end(), 1);
  t.services.resize(t.host_count());
  for (int h = 0; h < t.host_count(); ++h) {
    const int k = rng.uniform_int(config.min_services, config.max_services);
    for (int i = 0; i < k; ++i) {
      const int j = rng.uniform_int(i, static_cast<int>(pool.size()) - 1);
      std::swap(pool[i], pool[j]);
    }
    t.services[h].assign(pool.begin(), pool.begin() + k);
    std::sort(t.services[h].begin(), t.services[h].end());
  }

  const int ot_subnet = config.ot_subnet > 0
                            ? config.ot_subnet
                            : std::min(2, config.defended_subnets);
  const auto& ot_hosts = t.subnet_hosts[ot_subnet];
  t.ot_host = ot_hosts[rng.uniform_int(0, static_cast<int>(ot_hosts.size()) - 1)];
  t.services[t.ot_host].insert(t.services[t.ot_host].begin(), kOtService);

  // The OT zone only talks to the zone in front of it; everything else is
  // mutually reachable.
  t.adjacency.assign(t.subnet_count, std::vector<std::uint8_t>(t.subnet_count, 1));
  const int front = ot_subnet - 1;
  for (int s = 0; s < t.subnet_count; ++s) {
    if (s == ot_subnet || s == front) continue;
    t.adjacency[s][ot_subnet] = 0;
    t.adjacency[ot_subnet][s] = 0;
  }

  t.subnet_agent.assign(t.subnet_count, -1);
  t.agent_subnets.resize(config.agents);
  for (int s = 1; s < t.subnet_count; ++s) {
    const int agent = std::min(s - 1, config.agents - 1);
    t.agent_subnets[agent].push_back(s);
    t.subnet_agent[s] = agent;
  }
  return t;
}

}  // namespace cyberdef
