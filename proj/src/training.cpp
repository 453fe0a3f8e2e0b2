#include "cyberdef/training.hpp"

#include <cmath>
#include <ostream>

#include "cyberdef/errors.hpp"
#include "cyberdef/metrics.hpp"

namespace cyberdef {

double TrainResult::final_mean() const { return curve.empty() ? 0.0 : curve.back().mean_return; }

bool plateaued(const TrainResult& result, int window, double tolerance) {
  const int smooth = 5;
  const int n = static_cast<int>(result.curve.size());
  if (n < window + smooth) return false;
  auto mean_ending = [&](int end) {
    double s = 0.0;
    for (int i = end - smooth; i < end; ++i) s += result.curve[static_cast<std::size_t>(i)].mean_return;
    return s / smooth;
  };
  const double recent = mean_ending(n);
  const double past = mean_ending(n - window);
  return recent - past < tolerance * std::max(std::abs(past), 1e-9);
}

int episodes_per_iteration(const TrainConfig& cfg, const ScenarioConfig& scenario, int agents) {
  const std::size_t per_episode =
      static_cast<std::size_t>(scenario.episode_length) * static_cast<std::size_t>(std::max(agents, 1));
  return static_cast<int>(std::max<std::size_t>(1, (cfg.buffer_capacity + per_episode - 1) / per_episode));
}

namespace {

void assign_advantages(std::vector<Transition*>& timeline, const TrainConfig& cfg) {
  std::vector<double> r, v;
  std::vector<std::uint8_t> d;
  for (const auto* t : timeline) {
    r.push_back(t->reward);
    v.push_back(t->value);
    d.push_back(t->done ? 1 : 0);
  }
  const GaeResult g = compute_gae(r, v, d, cfg.gamma, cfg.gae_lambda);
  for (std::size_t k = 0; k < timeline.size(); ++k) {
    timeline[k]->advantage = g.advantages[k];
    timeline[k]->ret = g.returns[k];
  }
}

struct LossAccumulator {
  double policy = 0.0, value = 0.0, entropy = 0.0, kl = 0.0;
  int n = 0;
  void add(const UpdateStats& s) {
    policy += s.policy_loss;
    value += s.value_loss;
    entropy += s.entropy;
    kl += s.approx_kl;
    ++n;
  }
};

}  // namespace

TrainResult train_team(Team& team, const ScenarioConfig& scenario, const TrainConfig& cfg,
                       std::uint64_t seed, int iterations, const TrainHooks& hooks) {
  cfg.validate();
  TrainResult result;
  const int agents = static_cast<int>(team.agents.size());
  const int episodes = episodes_per_iteration(cfg, scenario, agents);
  RolloutOptions opt;
  opt.reward_scale = cfg.reward_scale;
  for (int it = 0; it < iterations; ++it) {
    std::vector<std::uint64_t> seeds;
    for (int e = 0; e < episodes; ++e) seeds.push_back(episode_seed(seed, it, e));
    auto outs = run_episodes(scenario, team, seeds, opt, cfg.workers);

    std::vector<double> returns;
    std::size_t samples = 0;
    for (auto& o : outs) {
      returns.push_back(o.total_reward);
      for (int a = 0; a < agents; ++a) {
        auto& ds = o.decisions[static_cast<std::size_t>(a)];
        std::vector<Transition*> sub, master;
        for (auto& d : ds) {
          sub.push_back(&d.sub);
          if (d.master) master.push_back(&*d.master);
        }
        assign_advantages(sub, cfg);
        if (!master.empty()) assign_advantages(master, cfg);
        auto& ap = team.agents[static_cast<std::size_t>(a)];
        for (auto& d : ds) {
          auto& unit = ap.units[static_cast<std::size_t>(d.unit)];
          const bool learns = hooks.update_units && !unit.frozen;
          if (learns && team.central_critic) team.central_memory.push(d.sub);
          if (learns) {
            unit.memory.push(std::move(d.sub));
            ++samples;
          }
          if (d.master && ap.master && hooks.update_master && !ap.master->frozen)
            ap.master->memory.push(std::move(*d.master));
        }
      }
    }

    Rng rng(derive_seed(seed, 0xfeedULL, static_cast<std::uint64_t>(it)));
    LossAccumulator acc;
    double central_loss = 0.0;
    if (team.central_critic && !team.central_memory.empty()) {
      std::vector<const Transition*> ptrs;
      for (const auto& t : team.central_memory.items()) ptrs.push_back(&t);
      central_loss = value_update(*team.central_critic, ptrs, cfg, rng);
      team.central_memory.clear();
    }
    for (auto& ap : team.agents) {
      for (auto& u : ap.units) {
        if (u.memory.empty()) continue;
        const UpdateStats s = ppo_update(u.actor, u.critic ? &*u.critic : nullptr, u.memory, cfg, rng);
        acc.add(s);
        if (!u.actor.net.finite() || (u.critic && !u.critic->net.finite()))
          throw NumericalError("non-finite parameters after updating " + u.name);
      }
      if (ap.master && !ap.master->memory.empty()) {
        const UpdateStats s = ppo_update(ap.master->actor, &*ap.master->critic, ap.master->memory, cfg, rng);
        acc.add(s);
      }
    }

    CurveRow row;
    row.iteration = it;
    row.episodes = episodes;
    row.samples = samples;
    const Stat st = summarize(returns);
    row.mean_return = st.mean;
    row.std_return = st.std;
    if (acc.n > 0) {
      row.policy_loss = acc.policy / acc.n;
      row.value_loss = acc.value / acc.n + central_loss;
      row.entropy = acc.entropy / acc.n;
      row.approx_kl = acc.kl / acc.n;
    } else {
      row.value_loss = central_loss;
    }
    result.curve.push_back(row);
    if (hooks.on_iteration) hooks.on_iteration(row, team);
    if (hooks.stop && hooks.stop(result)) break;
  }
  return result;
}

TrainResult train_ippo(Team& team, const ScenarioConfig& scenario, const TrainConfig& cfg,
                       std::uint64_t seed, const TrainHooks& hooks) {
  if (team.spec.hierarchical() || team.spec.centralized())
    throw ContractError("train_ippo needs a flat team with per-agent critics");
  return train_team(team, scenario, cfg, seed, cfg.iterations, hooks);
}

TrainResult train_centralized_critic(Team& team, const ScenarioConfig& scenario,
                                     const TrainConfig& cfg, std::uint64_t seed,
                                     const TrainHooks& hooks) {
  if (!team.central_critic) throw ContractError("train_centralized_critic needs a shared critic");
  return train_team(team, scenario, cfg, seed, cfg.iterations, hooks);
}

void write_curve_csv(std::ostream& out, const TrainResult& result) {
  out << "iteration,episodes,samples,mean_return,std_return,policy_loss,value_loss,entropy,approx_kl\n";
  char buf[512];
  for (const auto& r : result.curve) {
    std::snprintf(buf, sizeof buf, "%d,%d,%zu,%.6f,%.6f,%.6g,%.6g,%.6g,%.6g\n", r.iteration, r.episodes,
                  r.samples, r.mean_return, r.std_return, r.policy_loss, r.value_loss, r.entropy, r.approx_kl);
    out << buf;
  }
}

}  // namespace cyberdef
