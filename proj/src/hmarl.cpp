#include "cyberdef/hmarl.hpp"

#include <algorithm>

#include "cyberdef/errors.hpp"

namespace cyberdef {

namespace {

bool registered(const std::vector<SubPolicyId>& reg, SubPolicyId id) {
  return std::find(reg.begin(), reg.end(), id) != reg.end();
}

void require_expert(const Team& team) {
  if (team.spec.master != MasterKind::ExpertDeterministic &&
      team.spec.master != MasterKind::ExpertProbabilistic)
    throw ContractError("sub-policy training needs an expert master");
}

void require_meta(const Team& team) {
  for (const auto& a : team.agents)
    if (!a.master) throw ContractError("master training needs a meta master");
}

}  // namespace

SubPolicyId expert_select(const AgentHistory& history, const std::vector<SubPolicyId>& registry,
                          MasterKind kind, Rng& rng) {
  if (host_ioc(history) && registered(registry, SubPolicyId::Recover)) return SubPolicyId::Recover;
  const bool traffic = registered(registry, SubPolicyId::ControlTraffic);
  if (kind == MasterKind::ExpertProbabilistic) {
    if (traffic && rng.bernoulli(0.25)) return SubPolicyId::ControlTraffic;
    return SubPolicyId::Investigate;
  }
  if (traffic && network_ioc(history)) return SubPolicyId::ControlTraffic;
  return SubPolicyId::Investigate;
}

TrainResult train_subpolicies(Team& team, const ScenarioConfig& scenario, const TrainConfig& cfg,
                              std::uint64_t seed, const TrainHooks& hooks) {
  require_expert(team);
  TrainHooks h = hooks;
  h.update_units = true;
  h.update_master = false;
  return train_team(team, scenario, cfg, seed, cfg.iterations, h);
}

TrainResult train_master(Team& team, const ScenarioConfig& scenario, const TrainConfig& cfg,
                         std::uint64_t seed, const TrainHooks& hooks) {
  require_meta(team);
  for (const auto& a : team.agents)
    for (const auto& u : a.units)
      if (!u.frozen) throw ContractError("train_master: sub-policy " + u.name + " is not frozen");
  TrainHooks h = hooks;
  h.update_units = false;
  h.update_master = true;
  return train_team(team, scenario, cfg, seed, cfg.iterations, h);
}

TrainResult train_collective(Team& team, const ScenarioConfig& scenario, const TrainConfig& cfg,
                             std::uint64_t seed, const TrainHooks& hooks) {
  require_meta(team);
  team.freeze_all_units(false);
  TrainHooks h = hooks;
  h.update_units = true;
  h.update_master = true;
  return train_team(team, scenario, cfg, seed, cfg.iterations, h);
}

TrainResult fine_tune_subpolicy(Team& team, SubPolicyId target, const ScenarioConfig& scenario,
                                const TrainConfig& cfg, int iterations, std::uint64_t seed,
                                const TrainHooks& hooks) {
  require_expert(team);
  if (team.unit_index(target) < 0)
    throw ContractError("fine_tune_subpolicy: " + std::string(to_string(target)) + " is not registered");
  team.freeze_all_units(true);
  team.set_frozen(target, false);
  TrainHooks h = hooks;
  h.update_units = true;
  h.update_master = false;
  TrainResult r = train_team(team, scenario, cfg, seed, iterations, h);
  team.freeze_all_units(false);
  return r;
}

namespace {

void copy_net(PolicyNet& dst, const PolicyNet& src, const std::string& name) {
  if (dst.sizes() != src.sizes()) {
    std::string msg = "layout mismatch for " + name + ": expected sizes [";
    for (std::size_t i = 0; i < dst.sizes().size(); ++i) msg += (i ? "," : "") + std::to_string(dst.sizes()[i]);
    msg += "], found [";
    for (std::size_t i = 0; i < src.sizes().size(); ++i) msg += (i ? "," : "") + std::to_string(src.sizes()[i]);
    throw LoadError(msg + "]");
  }
  dst.parameters() = src.parameters();
}

}  // namespace

void adopt_subpolicies(Team& target, const Team& source) {
  if (target.agents.size() != source.agents.size())
    throw LoadError("agent count differs: expected " + std::to_string(target.agents.size()) + ", found " +
                    std::to_string(source.agents.size()));
  for (std::size_t a = 0; a < target.agents.size(); ++a) {
    auto& dst = target.agents[a];
    const auto& src = source.agents[a];
    for (auto& u : dst.units) {
      const auto it = std::find_if(src.units.begin(), src.units.end(),
                                   [&](const PolicyUnit& s) { return s.id == u.id; });
      if (it == src.units.end()) throw LoadError("source team has no " + u.name);
      copy_net(u.actor.net, it->actor.net, u.name + "/actor");
      u.actor.opt = Optimizer(u.actor.opt.kind(), u.actor.net.parameter_count());
      if (u.critic && it->critic) {
        copy_net(u.critic->net, it->critic->net, u.name + "/critic");
        u.critic->opt = Optimizer(u.critic->opt.kind(), u.critic->net.parameter_count());
      }
    }
  }
}

CurriculumResult train_meta_curriculum(Team& meta, Team& expert, const ScenarioConfig& scenario,
                                       const TrainConfig& cfg, std::uint64_t seed,
                                       const TrainHooks& sub_hooks,
                                       const TrainHooks& master_hooks) {
  require_meta(meta);
  CurriculumResult out;
  TrainHooks sub = sub_hooks;
  sub.stop = [](const TrainResult& r) { return plateaued(r); };
  out.subpolicies = train_subpolicies(expert, scenario, cfg, seed, sub);
  adopt_subpolicies(meta, expert);
  meta.freeze_all_units(true);
  out.master = train_master(meta, scenario, cfg, derive_seed(seed, 0x3e7a), master_hooks);
  return out;
}

}  // namespace cyberdef
