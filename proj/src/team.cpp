#include "cyberdef/team.hpp"

#include <algorithm>
#include <cctype>

#include "cyberdef/errors.hpp"

namespace cyberdef {

std::string_view to_string(StrategyKind s) {
  switch (s) {
    case StrategyKind::MarlDecentralized: return "MARL-Decentralized";
    case StrategyKind::MarlCentralizedCritic: return "MARL-CentralizedCritic";
    case StrategyKind::HmarlExpert: return "HMARL-Expert";
    case StrategyKind::HmarlMeta: return "HMARL-Meta";
    case StrategyKind::HmarlCollective: return "HMARL-Collective";
  }
  return "?";
}

StrategyKind parse_strategy(const std::string& name) {
  std::string key;
  for (char c : name)
    if (std::isalnum(static_cast<unsigned char>(c))) key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (key == "marldecentralized" || key == "ippo") return StrategyKind::MarlDecentralized;
  if (key == "marlcentralizedcritic" || key == "mappo") return StrategyKind::MarlCentralizedCritic;
  if (key == "hmarlexpert") return StrategyKind::HmarlExpert;
  if (key == "hmarlmeta") return StrategyKind::HmarlMeta;
  if (key == "hmarlcollective") return StrategyKind::HmarlCollective;
  throw ConfigError("unknown strategy '" + name +
                    "' (expected MARL-Decentralized, MARL-CentralizedCritic, HMARL-Expert, HMARL-Meta or "
                    "HMARL-Collective)");
}

std::string_view to_string(MasterKind m) {
  switch (m) {
    case MasterKind::None: return "none";
    case MasterKind::ExpertDeterministic: return "expert";
    case MasterKind::ExpertProbabilistic: return "expert-probabilistic";
    case MasterKind::Meta: return "meta";
  }
  return "?";
}

std::vector<int> subpolicy_actions(const BlueActionSpace& space, SubPolicyId id) {
  std::vector<int> out;
  auto add_slots = [&](BlueAction k) {
    for (int s = 0; s < space.slot_count(); ++s) out.push_back(space.index(k, s));
  };
  auto add_zones = [&](BlueAction k) {
    for (int z = 0; z < space.zone_count(); ++z) out.push_back(space.index(k, z));
  };
  switch (id) {
    case SubPolicyId::Investigate:
      out.push_back(space.index(BlueAction::Sleep));
      out.push_back(space.index(BlueAction::Monitor));
      add_slots(BlueAction::Analyse);
      add_slots(BlueAction::DeployDecoy);
      break;
    case SubPolicyId::Recover:
      add_slots(BlueAction::Remove);
      add_slots(BlueAction::Restore);
      break;
    case SubPolicyId::ControlTraffic:
      add_zones(BlueAction::BlockTraffic);
      add_zones(BlueAction::AllowTraffic);
      break;
  }
  return out;
}

TeamSpec TeamSpec::for_strategy(StrategyKind s) {
  TeamSpec t;
  t.strategy = s;
  switch (s) {
    case StrategyKind::MarlDecentralized:
    case StrategyKind::MarlCentralizedCritic:
      break;
    case StrategyKind::HmarlExpert:
      t.master = MasterKind::ExpertDeterministic;
      t.registry = {SubPolicyId::Investigate, SubPolicyId::Recover};
      break;
    case StrategyKind::HmarlMeta:
    case StrategyKind::HmarlCollective:
      t.master = MasterKind::Meta;
      t.registry = {SubPolicyId::Investigate, SubPolicyId::Recover};
      break;
  }
  return t;
}

int Team::unit_index(SubPolicyId id) const {
  const auto it = std::find(spec.registry.begin(), spec.registry.end(), id);
  return it == spec.registry.end() ? -1 : static_cast<int>(it - spec.registry.begin());
}

std::string Team::subpolicy_hash() const {
  std::vector<const PolicyNet*> nets;
  for (const auto& a : agents)
    for (const auto& u : a.units) {
      nets.push_back(&u.actor.net);
      if (u.critic) nets.push_back(&u.critic->net);
    }
  return combined_hash(nets);
}

std::string Team::master_hash() const {
  std::vector<const PolicyNet*> nets;
  for (const auto& a : agents)
    if (a.master) {
      nets.push_back(&a.master->actor.net);
      if (a.master->critic) nets.push_back(&a.master->critic->net);
    }
  return combined_hash(nets);
}

std::string Team::full_hash() const {
  std::vector<const PolicyNet*> nets;
  for (const auto& a : agents) {
    for (const auto& u : a.units) {
      nets.push_back(&u.actor.net);
      if (u.critic) nets.push_back(&u.critic->net);
    }
    if (a.master) {
      nets.push_back(&a.master->actor.net);
      if (a.master->critic) nets.push_back(&a.master->critic->net);
    }
  }
  if (central_critic) nets.push_back(&central_critic->net);
  return combined_hash(nets);
}

void Team::set_frozen(SubPolicyId id, bool frozen) {
  const int k = unit_index(id);
  if (k < 0) throw ConfigError("sub-policy " + std::string(to_string(id)) + " is not registered");
  for (auto& a : agents) a.units[static_cast<std::size_t>(k)].frozen = frozen;
}

void Team::freeze_all_units(bool frozen) {
  for (auto& a : agents)
    for (auto& u : a.units) u.frozen = frozen;
}

int global_state_length(const Topology& t) {
  return 3 + 4 * t.host_count() + t.subnet_count * (t.subnet_count - 1) / 2;
}

std::vector<double> global_state(const NetworkState& s) {
  const Topology& t = s.topology;
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(global_state_length(t)));
  for (int p = 0; p < 3; ++p) g.push_back(static_cast<int>(s.mission_phase) == p ? 1.0 : 0.0);
  for (const auto& h : s.hosts) {
    g.push_back(h.foothold == Foothold::User ? 1.0 : 0.0);
    g.push_back(h.foothold == Foothold::Root ? 1.0 : 0.0);
    g.push_back(h.decoys.empty() ? 0.0 : 1.0);
    g.push_back(h.degraded_services.empty() && h.stopped_services.empty() ? 0.0 : 1.0);
  }
  for (int a = 0; a < t.subnet_count; ++a)
    for (int b = a + 1; b < t.subnet_count; ++b) g.push_back(s.blocked(a, b) ? 1.0 : 0.0);
  return g;
}

int central_critic_input_length(const NetworkEnv& env) {
  int n = global_state_length(env.topology());
  for (int a = 0; a < env.agent_count(); ++a) n += env.action_space(a).size();
  return n;
}

Team make_team(const NetworkEnv& env, TeamSpec spec, const TrainConfig& cfg, Rng& rng) {
  Team team;
  team.spec = std::move(spec);
  team.flags = env.config().features;
  const Topology& topo = env.topology();
  const bool central = team.spec.centralized();
  for (int a = 0; a < env.agent_count(); ++a) {
    AgentPolicy ap;
    ap.agent = a;
    ap.layout = make_layout(topo, a, team.flags);
    const BlueActionSpace& space = env.action_space(a);
    ap.action_count = space.size();
    const int obs_len = ap.layout.length();
    if (!team.spec.hierarchical()) {
      PolicyUnit u;
      u.name = "agent" + std::to_string(a) + "/policy";
      for (int i = 0; i < space.size(); ++i) u.actions.push_back(i);
      u.actor = make_actor(obs_len, space.size(), cfg, rng);
      if (!central) u.critic = make_critic(obs_len, cfg, rng);
      ap.units.push_back(std::move(u));
    } else {
      for (SubPolicyId id : team.spec.registry) {
        PolicyUnit u;
        u.id = id;
        u.name = "agent" + std::to_string(a) + "/" + std::string(to_string(id));
        u.actions = subpolicy_actions(space, id);
        const int in = subobservation_length(ap.layout, id);
        u.actor = make_actor(in, static_cast<int>(u.actions.size()), cfg, rng);
        u.critic = make_critic(in, cfg, rng);
        ap.units.push_back(std::move(u));
      }
      if (team.spec.master == MasterKind::Meta) {
        PolicyUnit m;
        m.name = "agent" + std::to_string(a) + "/master";
        m.actor = make_actor(obs_len, static_cast<int>(team.spec.registry.size()), cfg, rng);
        m.critic = make_critic(obs_len, cfg, rng);
        ap.master = std::move(m);
      }
    }
    team.agents.push_back(std::move(ap));
  }
  if (central) team.central_critic = make_critic(central_critic_input_length(env), cfg, rng);
  return team;
}

}  // namespace cyberdef
