#include "cyberdef/rollout.hpp"

#include <cmath>
#include <thread>

#include "cyberdef/errors.hpp"
#include "cyberdef/hmarl.hpp"
#include "cyberdef/metrics.hpp"

namespace cyberdef {

namespace {

struct Choice {
  int index = 0;
  double logprob = 0.0;
};

Choice choose(const PolicyNet& actor, std::span<const double> input,
              std::span<const std::uint8_t> mask, bool greedy, Rng& rng) {
  const Vec logits = actor.forward(input);
  const ActionSample s = greedy ? greedy_masked(logits, mask) : sample_masked(logits, mask, rng);
  return {s.action, s.logprob};
}

double value_of(const PolicyNet& critic, std::span<const double> input) {
  return critic.forward(input)[0];
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t base, int iteration, int episode) {
  return derive_seed(base, static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(episode));
}

EpisodeOutput run_episode(NetworkEnv& env, const Team& team, std::uint64_t seed,
                          const RolloutOptions& opt, int episode_index) {
  env.reset(seed);
  Rng rng(derive_seed(seed, 0x9e3779b97f4a7c15ULL, 1));
  const int agents = env.agent_count();
  if (static_cast<int>(team.agents.size()) != agents)
    throw ShapeError("team has " + std::to_string(team.agents.size()) + " agents, environment has " +
                     std::to_string(agents));

  EpisodeOutput out;
  out.seed = seed;
  out.decisions.resize(static_cast<std::size_t>(agents));
  if (opt.trace) out.trace = begin_trace(env, std::string(to_string(team.spec.strategy)), seed, episode_index);

  std::vector<AgentHistory> hist;
  for (int a = 0; a < agents; ++a) hist.push_back(make_history(env.topology(), a, team.flags));
  std::vector<int> active_unit(static_cast<std::size_t>(agents), -1);
  std::vector<std::vector<std::uint8_t>> valid;
  for (int a = 0; a < agents; ++a) valid.push_back(env.action_space(a).valid_mask());

  const bool hier = team.spec.hierarchical();
  const bool central = team.spec.centralized();
  std::vector<int> chosen(static_cast<std::size_t>(agents), 0);
  std::vector<char> decided(static_cast<std::size_t>(agents), 0);

  while (!env.done()) {
    const StateView view = env.view();
    const int step = env.state().step_index;
    JointAction joint(static_cast<std::size_t>(agents));
    std::vector<AgentStepRecord> records(static_cast<std::size_t>(agents));
    for (int a = 0; a < agents; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      const AgentPolicy& ap = team.agents[ai];
      const BlueActionSpace& space = env.action_space(a);
      auto& h = hist[ai];
      std::vector<double> obs = encode_observation(h, view);
      records[ai].host_ioc = host_ioc(h);
      if (team.flags.communication) joint[ai].message = outgoing_message(h, env.topology());
      records[ai].message = joint[ai].message;
      decided[ai] = 0;
      if (env.pending(a)) {
        // Waiting on a multi-step action: only Sleep is allowed.
        mark_in_progress(obs);
        h.last_observation = std::move(obs);
        joint[ai].action = ActionSpec::sleep();
        records[ai].action = joint[ai].action;
        records[ai].in_progress = true;
        records[ai].subpolicy = active_unit[ai];
        chosen[ai] = space.index(BlueAction::Sleep);
        continue;
      }

      DecisionRecord d;
      d.step = step;
      int unit = 0;
      if (hier) {
        if (ap.master) {
          const std::vector<std::uint8_t> all(team.spec.registry.size(), 1);
          const Choice m = choose(ap.master->actor.net, obs, all, opt.greedy, rng);
          unit = m.index;
          if (opt.record) {
            Transition mt;
            mt.actor_input = obs;
            mt.critic_input = obs;
            mt.mask = all;
            mt.action = m.index;
            mt.logprob = m.logprob;
            mt.value = value_of(ap.master->critic->net, obs);
            d.master = std::move(mt);
          }
        } else {
          unit = team.unit_index(expert_select(h, team.spec.registry, team.spec.master, rng));
          if (unit < 0) throw ContractError("expert selected an unregistered sub-policy");
        }
      }
      const PolicyUnit& u = ap.units[static_cast<std::size_t>(unit)];
      std::vector<double> input =
          hier ? transform_for_subpolicy(obs, ap.layout, u.id) : obs;
      std::vector<std::uint8_t> mask(u.actions.size());
      for (std::size_t k = 0; k < u.actions.size(); ++k)
        mask[k] = valid[ai][static_cast<std::size_t>(u.actions[k])];
      const Choice c = choose(u.actor.net, input, mask, opt.greedy, rng);
      const int global = u.actions[static_cast<std::size_t>(c.index)];
      joint[ai].action = space.decode(global);
      chosen[ai] = global;
      decided[ai] = 1;
      active_unit[ai] = hier ? unit : -1;
      records[ai].action = joint[ai].action;
      records[ai].subpolicy = active_unit[ai];
      if (opt.record) {
        d.unit = unit;
        d.sub.action = c.index;
        d.sub.logprob = c.logprob;
        d.sub.mask = std::move(mask);
        if (u.critic) {
          d.sub.value = value_of(u.critic->net, input);
          d.sub.critic_input = input;
        }
        d.sub.actor_input = std::move(input);
        out.decisions[ai].push_back(std::move(d));
      }
      h.last_observation = std::move(obs);
    }

    if (central && opt.record) {
      std::vector<double> g = global_state(env.state());
      for (int a = 0; a < agents; ++a) {
        std::vector<double> onehot(static_cast<std::size_t>(env.action_space(a).size()), 0.0);
        onehot[static_cast<std::size_t>(chosen[static_cast<std::size_t>(a)])] = 1.0;
        g.insert(g.end(), onehot.begin(), onehot.end());
      }
      const double v = value_of(team.central_critic->net, g);
      for (int a = 0; a < agents; ++a) {
        if (!decided[static_cast<std::size_t>(a)]) continue;
        auto& d = out.decisions[static_cast<std::size_t>(a)].back();
        d.sub.critic_input = g;
        d.sub.value = v;
      }
    }

    TruthRecord before;
    if (opt.trace) before = env.truth_snapshot();
    const Phase phase = env.state().mission_phase;
    const StepResult r = env.step(joint);
    out.total_reward += r.reward;
    for (int a = 0; a < agents; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      update_history(hist[ai], r.agent_events[ai]);
      if (opt.record && !out.decisions[ai].empty()) {
        auto& d = out.decisions[ai].back();
        d.sub.reward += r.reward * opt.reward_scale;
        if (d.master) d.master->reward += r.reward * opt.reward_scale;
      }
    }
    if (opt.trace) record_step(*out.trace, before, phase, std::move(records), r);
  }
  for (auto& ds : out.decisions)
    if (!ds.empty()) {
      ds.back().sub.done = true;
      if (ds.back().master) ds.back().master->done = true;
    }
  return out;
}

std::vector<EpisodeOutput> run_episodes(const ScenarioConfig& scenario, const Team& team,
                                        std::span<const std::uint64_t> seeds,
                                        const RolloutOptions& options, int workers) {
  std::vector<EpisodeOutput> out(seeds.size());
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(seeds.size())));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  auto work = [&](int w) {
    try {
      NetworkEnv env(scenario);
      for (std::size_t i = static_cast<std::size_t>(w); i < seeds.size(); i += static_cast<std::size_t>(n))
        out[i] = run_episode(env, team, seeds[i], options, static_cast<int>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (n == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double EvalResult::mean() const { return summarize(rewards).mean; }
double EvalResult::std() const { return summarize(rewards).std; }

EvalResult evaluate(const ScenarioConfig& scenario, const Team& team, std::uint64_t seed,
                    int episodes, bool greedy, bool traces, int workers) {
  std::vector<std::uint64_t> seeds;
  for (int e = 0; e < episodes; ++e) seeds.push_back(episode_seed(seed, -1, e));
  RolloutOptions opt;
  opt.record = false;
  opt.greedy = greedy;
  opt.trace = traces;
  EvalResult r;
  for (auto& o : run_episodes(scenario, team, seeds, opt, workers)) {
    r.rewards.push_back(o.total_reward);
    if (o.trace) r.traces.push_back(std::move(*o.trace));
  }
  return r;
}

}  // namespace cyberdef
