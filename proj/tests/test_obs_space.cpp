#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "cyberdef/errors.hpp"
#include "cyberdef/observation.hpp"
#include "support.hpp"

using namespace cyberdef;
using namespace cyberdef::testing;

namespace {

Event file_event(int host, Foothold level) {
  Event e;
  e.type = EventType::MaliciousFile;
  e.host = host;
  e.detail = static_cast<int>(level);
  return e;
}

Event recovery(int host, BlueAction a) {
  Event e;
  e.type = EventType::RecoveryCompleted;
  e.host = host;
  e.detail = static_cast<int>(a);
  return e;
}

Event message(int from, std::uint8_t bits) {
  Event e;
  e.type = EventType::Message;
  e.source = from;
  e.detail = bits;
  return e;
}

struct ObsFixture {
  Topology topology = generate_topology(7, TopologyConfig{});
  AgentHistory history;
  int host = -1;
  explicit ObsFixture(ObsFlags flags = {}, int agent = 0) {
    history = make_history(topology, agent, flags);
    host = history.slots.front();
  }
  StateView view(Phase p = Phase::P1) const {
    StateView v;
    v.phase = p;
    v.subnet_count = topology.subnet_count;
    v.blocked.assign(v.subnet_count * v.subnet_count, 0);
    v.mission_blocked = v.blocked;
    return v;
  }
  std::vector<double> obs(Phase p = Phase::P1) const { return encode_observation(history, view(p)); }
};

}  // namespace

TEST_CASE("alerts persist until recovery") {
  ObsFixture f;
  update_history(f.history, {Event::alert(f.host, AlertKind::Process)});
  update_history(f.history, {});
  const auto o = f.obs();
  CHECK(o[f.history.layout.alert_offset()] == 1.0);
  update_history(f.history, {Event::alert(f.host, AlertKind::Process),
                             Event::alert(f.host, AlertKind::Process)});
  CHECK(f.history.alerts[0] == 1);
  CHECK(f.history.alerts[1] == 0);
}

TEST_CASE("restore clears alerts and the IOC value") {
  ObsFixture f;
  update_history(f.history, {Event::alert(f.host, AlertKind::Connection), file_event(f.host, Foothold::Root)});
  CHECK(f.history.ioc[0] == 1);
  update_history(f.history, {recovery(f.host, BlueAction::Restore)});
  CHECK(f.history.alerts[0] == 0);
  CHECK(f.history.alerts[1] == 0);
  CHECK(f.history.ioc[0] == 0);
}

TEST_CASE("remove keeps a root indicator but clears user ones") {
  ObsFixture f;
  const int other = f.history.slots[1];
  update_history(f.history, {file_event(f.host, Foothold::Root), file_event(other, Foothold::User),
                             Event::alert(f.host, AlertKind::Process)});
  update_history(f.history, {recovery(f.host, BlueAction::Remove), recovery(other, BlueAction::Remove)});
  CHECK(f.history.ioc[0] == 1);
  CHECK(f.history.ioc[1] == 0);
  CHECK(f.history.alerts[0] == 0);
}

TEST_CASE("memoryless observations drop last step's alerts") {
  ObsFlags flags;
  flags.history = false;
  ObsFixture f(flags);
  update_history(f.history, {Event::alert(f.host, AlertKind::Process)});
  CHECK(f.history.alerts[0] == 1);
  update_history(f.history, {});
  CHECK(f.history.alerts[0] == 0);
}

TEST_CASE("IOC priorities follow the indicator type") {
  CHECK(assign_ioc_priority(file_event(0, Foothold::Root)) == 1);
  CHECK(assign_ioc_priority(file_event(0, Foothold::User)) == 2);
  Event d;
  d.type = EventType::DecoyAccess;
  CHECK(assign_ioc_priority(d) == 3);
  CHECK_THROWS_AS(assign_ioc_priority(Event::alert(0, AlertKind::Process)), DomainError);
  Event clean;
  clean.type = EventType::AnalyseClean;
  CHECK_THROWS_AS(assign_ioc_priority(clean), DomainError);
}

TEST_CASE("stored IOC keeps the highest priority seen") {
  ObsFixture f;
  Event d;
  d.type = EventType::DecoyAccess;
  d.host = f.history.slots[2];
  d.source = f.host;
  update_history(f.history, {d});
  CHECK(f.history.ioc[0] == 3);
  update_history(f.history, {file_event(f.host, Foothold::User)});
  CHECK(f.history.ioc[0] == 2);
  update_history(f.history, {d});
  CHECK(f.history.ioc[0] == 2);
  update_history(f.history, {file_event(f.host, Foothold::Root)});
  CHECK(f.history.ioc[0] == 1);
  const auto o = f.obs();
  CHECK(o[f.history.layout.ioc_offset()] == 1.0);
}

TEST_CASE("disabled IOC features ignore indicator events") {
  ObsFlags flags;
  flags.ioc = false;
  flags.decoy_ioc = false;
  ObsFixture f(flags);
  Event d;
  d.type = EventType::DecoyAccess;
  d.host = f.host;
  d.source = f.host;
  update_history(f.history, {file_event(f.host, Foothold::Root), d});
  CHECK(f.history.ioc[0] == 0);
}

TEST_CASE("history is monotone between recoveries") {
  ObsFixture f;
  Rng rng(8);
  const int slots = static_cast<int>(f.history.slots.size());
  for (int step = 0; step < 2000; ++step) {
    const auto before = f.history;
    EventList ev;
    bool recovered = false;
    for (int k = 0; k < 3; ++k) {
      const int host = f.history.slots[rng.uniform_int(0, slots - 1)];
      switch (rng.uniform_int(0, 4)) {
        case 0: ev.push_back(Event::alert(host, static_cast<AlertKind>(rng.uniform_int(0, 1)))); break;
        case 1: ev.push_back(file_event(host, rng.bernoulli(0.5) ? Foothold::Root : Foothold::User)); break;
        case 2: {
          Event d;
          d.type = EventType::DecoyAccess;
          d.host = host;
          d.source = host;
          ev.push_back(d);
          break;
        }
        case 3:
          if (rng.bernoulli(0.1)) {
            ev.push_back(recovery(host, BlueAction::Restore));
            recovered = true;
          }
          break;
        default: break;
      }
    }
    update_history(f.history, ev);
    if (recovered) continue;
    for (int s = 0; s < slots; ++s) {
      CHECK(f.history.alerts[2 * s] >= before.alerts[2 * s]);
      CHECK(f.history.alerts[2 * s + 1] >= before.alerts[2 * s + 1]);
      if (before.ioc[s] != 0) CHECK(f.history.ioc[s] <= before.ioc[s]);
      CHECK(f.history.ioc[s] <= 3);
    }
  }
}

TEST_CASE("phase is one-hot") {
  ObsFixture f;
  const auto o = f.obs(Phase::P2);
  CHECK(o[0] == 0.0);
  CHECK(o[1] == 1.0);
  CHECK(o[2] == 0.0);
  auto p = o;
  mark_in_progress(p);
  CHECK(p[1] == -1.0);
}

TEST_CASE("layout length follows the topology arithmetic") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Topology t = generate_topology(seed, TopologyConfig{});
    for (int a = 0; a < t.agent_count(); ++a) {
      int hosts = 0;
      for (int s : t.agent_subnets[a]) hosts += static_cast<int>(t.subnet_hosts[s].size());
      const int n_own = static_cast<int>(t.agent_subnets[a].size());
      const int block = n_own * 3 * t.subnet_count;
      ObsFlags flags;
      CHECK(make_layout(t, a, flags).length() == 3 + block + 2 * hosts + hosts);
      flags.communication = true;
      CHECK(make_layout(t, a, flags).length() == 3 + block + 3 * hosts + 8 * (t.agent_count() - 1));
      if (n_own == 1 && hosts == 10)
        CHECK(make_layout(t, a, ObsFlags{}).length() == 3 + 3 * 8 + 20 + 10);
    }
  }
}

TEST_CASE("observation length is constant through an episode") {
  NetworkEnv env(ScenarioConfig::desk());
  env.reset(3);
  std::vector<AgentHistory> hs;
  for (int a = 0; a < env.agent_count(); ++a) hs.push_back(make_history(env.topology(), a, env.config().features));
  const std::size_t len0 = encode_observation(hs[0], env.view()).size();
  Rng rng(3);
  while (!env.done()) {
    JointAction j = all_sleep(env);
    for (int a = 0; a < env.agent_count(); ++a)
      if (!env.pending(a)) j[a].action = env.action_space(a).decode(rng.uniform_int(0, env.action_space(a).size() - 1));
    const StepResult r = env.step(j);
    for (int a = 0; a < env.agent_count(); ++a) update_history(hs[a], r.agent_events[a]);
    const auto o = encode_observation(hs[0], env.view());
    CHECK(o.size() == len0);
    for (int i = hs[0].layout.alert_offset(); i < hs[0].layout.ioc_offset(); ++i)
      CHECK((o[i] == 0.0 || o[i] == 1.0));
    for (int i = hs[0].layout.ioc_offset(); i < hs[0].layout.message_offset(); ++i)
      CHECK((o[i] >= 0.0 && o[i] <= 3.0));
  }
}

TEST_CASE("clean network without history encodes zero alerts and IOCs") {
  ObsFixture f;
  const auto o = f.obs();
  for (int i = f.history.layout.alert_offset(); i < f.history.layout.length(); ++i) CHECK(o[i] == 0.0);
}

TEST_CASE("subnet block carries assignment and blocked flags") {
  ObsFixture f;
  auto v = f.view();
  const int n = v.subnet_count;
  const int own = f.history.layout.own_subnets.front();
  v.blocked[own * n + 0] = 1;
  v.mission_blocked[own * n + 3] = 1;
  const auto o = encode_observation(f.history, v);
  const int off = f.history.layout.subnet_offset();
  CHECK(o[off + own] == 1.0);
  CHECK(o[off + n + 0] == 1.0);
  CHECK(o[off + 2 * n + 3] == 1.0);
  double sum = 0.0;
  for (int i = off; i < off + f.history.layout.subnet_len(); ++i) sum += o[i];
  CHECK(sum == 3.0);
}

TEST_CASE("message encoding uses a validity bit, subnet and host index") {
  CHECK(encode_message(1, 0) == 0b10010000);
  CHECK(encode_message(7, 15) == 0b11111111);
  CHECK_THROWS_AS(encode_message(0, 3), DomainError);
  CHECK_THROWS_AS(encode_message(8, 3), DomainError);
  CHECK_THROWS_AS(encode_message(3, 16), DomainError);
  CHECK_THROWS_AS(encode_message(3, -1), DomainError);
  CHECK_FALSE(decode_message(0).has_value());
  CHECK_FALSE(decode_message(0x7F).has_value());
  CHECK_FALSE(decode_message(0x85).has_value());
}

TEST_CASE("message round trip over every valid pair") {
  std::set<std::uint8_t> seen;
  for (int s = 1; s <= 7; ++s)
    for (int h = 0; h <= 15; ++h) {
      const std::uint8_t bits = encode_message(s, h);
      seen.insert(bits);
      const auto d = decode_message(bits);
      REQUIRE(d.has_value());
      CHECK(d->first == s);
      CHECK(d->second == h);
    }
  CHECK(seen.size() == 112);
}

TEST_CASE("outgoing message names the highest priority host") {
  ObsFixture f;
  CHECK(outgoing_message(f.history, f.topology) == 0);
  const int a = f.history.slots[0];
  const int b = f.history.slots[1];
  update_history(f.history, {file_event(a, Foothold::User), file_event(b, Foothold::Root)});
  const auto d = decode_message(outgoing_message(f.history, f.topology));
  REQUIRE(d.has_value());
  CHECK(d->first == f.topology.host_subnet[b]);
  CHECK(d->second == f.topology.host_index[b]);
}

TEST_CASE("sub-observation lengths") {
  ObsFlags flags;
  flags.communication = true;
  ObsFixture f(flags);
  const auto& l = f.history.layout;
  const auto o = f.obs();
  CHECK(subobservation_length(l, SubPolicyId::Recover) == 3 + l.slots);
  CHECK(transform_for_subpolicy(o, l, SubPolicyId::Recover).size() == std::size_t(3 + l.slots));
  CHECK(transform_for_subpolicy(o, l, SubPolicyId::Investigate).size() == std::size_t(3 + 3 * l.slots));
  CHECK(transform_for_subpolicy(o, l, SubPolicyId::ControlTraffic).size() ==
        std::size_t(3 + l.subnet_len() + l.subnet_count));
  CHECK_THROWS_AS(transform_for_subpolicy(o, l, static_cast<SubPolicyId>(7)), DomainError);
  std::vector<double> shorter(o.begin(), o.end() - 1);
  CHECK_THROWS_AS(transform_for_subpolicy(shorter, l, SubPolicyId::Recover), ShapeError);
}

TEST_CASE("recover view is zero apart from the phase without IOCs") {
  ObsFixture f;
  update_history(f.history, {Event::alert(f.host, AlertKind::Process)});
  const auto v = transform_for_subpolicy(f.obs(Phase::P3), f.history.layout, SubPolicyId::Recover);
  CHECK(v[2] == 1.0);
  for (std::size_t i = 3; i < v.size(); ++i) CHECK(v[i] == 0.0);
}

TEST_CASE("control traffic view changes on a peer IOC report") {
  ObsFlags flags;
  flags.communication = true;
  ObsFixture f(flags);
  const auto& l = f.history.layout;
  const auto quiet = transform_for_subpolicy(f.obs(), l, SubPolicyId::ControlTraffic);
  const int peer = f.history.peers.front();
  const int peer_subnet = f.topology.agent_subnets[peer].front();
  update_history(f.history, {message(peer, encode_message(peer_subnet, 2))});
  CHECK(network_ioc(f.history));
  const auto loud = transform_for_subpolicy(f.obs(), l, SubPolicyId::ControlTraffic);
  CHECK(quiet != loud);
  CHECK(loud[3 + l.subnet_len() + peer_subnet] == 1.0);
  update_history(f.history, {});
  CHECK_FALSE(network_ioc(f.history));
}

TEST_CASE("sub-observations are functions of the observation alone") {
  ObsFlags flags;
  flags.communication = true;
  ObsFixture f(flags);
  Rng rng(41);
  const auto& l = f.history.layout;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> o(l.length());
    for (int i = 0; i < 3; ++i) o[i] = i == trial % 3 ? 1.0 : 0.0;
    for (int i = 3; i < l.ioc_offset(); ++i) o[i] = rng.bernoulli(0.2);
    for (int i = l.ioc_offset(); i < l.message_offset(); ++i) o[i] = rng.uniform_int(0, 3);
    for (int i = l.message_offset(); i < l.length(); ++i) o[i] = rng.bernoulli(0.5);
    for (SubPolicyId id : {SubPolicyId::Recover, SubPolicyId::Investigate, SubPolicyId::ControlTraffic}) {
      const auto a = transform_for_subpolicy(o, l, id);
      const auto b = transform_for_subpolicy(std::vector<double>(o), l, id);
      CHECK(a == b);
    }
    const auto inv = transform_for_subpolicy(o, l, SubPolicyId::Investigate);
    for (int s = 0; s < l.slots; ++s) {
      CHECK(inv[3 + 2 * s] == o[l.alert_offset() + 2 * s]);
      CHECK(inv[3 + 2 * l.slots + s] == (o[l.ioc_offset() + s] == 3.0 ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("peer report naming an owned host raises a decoy indicator") {
  ObsFlags flags;
  flags.communication = true;
  ObsFixture f(flags);
  const int own = f.history.layout.own_subnets.front();
  const int peer = f.history.peers.front();
  update_history(f.history, {message(peer, encode_message(own, 1))});
  CHECK(f.history.ioc[1] == 3);
}
