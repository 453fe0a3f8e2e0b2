#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "cyberdef/adversaries.hpp"
#include "cyberdef/experiment.hpp"
#include "cyberdef/hmarl.hpp"
#include "cyberdef/metrics.hpp"
#include "cyberdef/rollout.hpp"
#include "cyberdef/trace.hpp"

using namespace cyberdef;

namespace {

// Tolerances pinned by the acceptance criteria.
constexpr double kGaeTol = 1e-10;
constexpr double kGradTol = 1e-4;
constexpr long kMaskDraws = 1'000'000;
constexpr long kRedDraws = 100'000;
constexpr double kFreqTol = 0.01;
constexpr int kMetricTraces = 1000;
constexpr int kAuditEpisodes = 50;
constexpr int kFuzzSteps = 10'000;
constexpr int kEvalEpisodes = 20;
constexpr int kReplicates = 3;
constexpr int kRequired = 2;
constexpr double kFineTuneFraction = 0.1;
constexpr double kFineTuneTol = 0.15;
constexpr double kConvergenceBand = 0.05;
constexpr int kSmoothing = 5;

std::ostream& detail = std::cerr;

struct Verdict {
  bool pass = true;
  std::string note;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note += (note.empty() ? "" : "; ") + what;
    }
  }
};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- numerical core

std::vector<double> gae_oracle(const std::vector<double>& r, const std::vector<double>& v,
                               const std::vector<std::uint8_t>& done, double g, double l, double boot) {
  const std::size_t n = r.size();
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double w = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      double next = 0.0;
      if (!done[k]) next = k + 1 < n ? v[k + 1] : boot;
      adv[t] += w * (r[k] + g * next - v[k]);
      if (done[k]) break;
      w *= g * l;
    }
  }
  return adv;
}

Verdict numerical_core() {
  Verdict v;
  Rng rng(101);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int n = rng.uniform_int(1, 50);
    std::vector<double> r(n), val(n);
    std::vector<std::uint8_t> d(n);
    for (int t = 0; t < n; ++t) {
      r[t] = rng.normal();
      val[t] = rng.normal();
      d[t] = rng.bernoulli(0.1);
    }
    const double boot = rng.normal();
    const GaeResult g = compute_gae(r, val, d, 0.99, 0.95, boot);
    const auto o = gae_oracle(r, val, d, 0.99, 0.95, boot);
    for (int t = 0; t < n; ++t) worst = std::max(worst, std::abs(g.advantages[t] - o[t]));
  }
  detail << "  gae max abs error " << worst << "\n";
  v.require(worst <= kGaeTol, "gae error " + std::to_string(worst));

  PolicyNet actor({3, 4, 3});
  PolicyNet critic({3, 4, 1});
  actor.initialize(rng);
  critic.initialize(rng);
  TrainConfig cfg;
  cfg.entropy_coef = 0.05;
  std::vector<Transition> samples;
  for (int k = 0; k < 8; ++k) {
    Transition t;
    t.actor_input = {rng.normal(), rng.normal(), rng.normal()};
    t.critic_input = t.actor_input;
    t.mask = {1, 1, static_cast<std::uint8_t>(k % 3 != 0)};
    t.action = k % 2;
    const Vec p = masked_softmax(actor.forward(t.actor_input), t.mask);
    t.logprob = std::log(p[t.action]) + (k < 4 ? 0.05 : (k % 2 ? 0.6 : -0.6));
    t.advantage = rng.normal();
    t.ret = rng.normal();
    samples.push_back(t);
  }
  std::vector<const Transition*> batch;
  for (const auto& s : samples) batch.push_back(&s);
  Vec ga = Vec::Zero(actor.parameter_count());
  Vec gc = Vec::Zero(critic.parameter_count());
  ppo_loss(actor, &critic, batch, cfg, &ga, &gc);
  double worst_rel = 0.0;
  auto check = [&](PolicyNet& net, const Vec& analytic) {
    for (std::size_t i = 0; i < net.parameter_count(); ++i) {
      const double h = 1e-6, keep = net.parameters()[i];
      net.parameters()[i] = keep + h;
      const double up = ppo_loss(actor, &critic, batch, cfg, nullptr, nullptr).total();
      net.parameters()[i] = keep - h;
      const double down = ppo_loss(actor, &critic, batch, cfg, nullptr, nullptr).total();
      net.parameters()[i] = keep;
      const double numeric = (up - down) / (2 * h);
      const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-3});
      worst_rel = std::max(worst_rel, std::abs(numeric - analytic[i]) / scale);
    }
  };
  check(actor, ga);
  check(critic, gc);
  detail << "  gradient max relative error " << worst_rel << "\n";
  v.require(worst_rel <= kGradTol, "gradient error " + std::to_string(worst_rel));

  Rng sample_rng(6), pick(7);
  long violations = 0;
  for (long k = 0; k < kMaskDraws; ++k) {
    Vec logits(8);
    for (int i = 0; i < 8; ++i) logits[i] = pick.normal() * 3.0;
    const int bits = pick.uniform_int(1, 255);
    std::uint8_t mask[8];
    for (int i = 0; i < 8; ++i) mask[i] = (bits >> i) & 1;
    if (!mask[sample_masked(logits, mask, sample_rng).action]) ++violations;
  }
  detail << "  masked draws " << kMaskDraws << " violations " << violations << "\n";
  v.require(violations == 0, std::to_string(violations) + " disallowed samples");
  return v;
}

// ---------------------------------------------------------------- adversaries

ScenarioConfig quiet(ScenarioConfig c) {
  c.green.activity = 0.0;
  return c;
}

struct RedBench {
  NetworkEnv env;
  int source = -1, target = -1;
  explicit RedBench(const ScenarioConfig& sc) : env(quiet(sc)) {
    env.reset(1);
    auto& s = env.mutable_state();
    for (auto& m : s.red) {
      std::fill(m.states.begin(), m.states.end(), AttackState::Unknown);
      m.pending.reset();
    }
    for (const auto& h : s.hosts)
      if (h.foothold == Foothold::Root) source = h.host_id;
    target = env.topology().subnet_hosts.at(1).front();
    s.red[0] = make_red_machine(0, RedVariant::Default, builtin_matrix(RedVariant::Default),
                                env.topology().host_count());
    s.red[0].states[source] = AttackState::RootFoothold;
    s.red[0].states[target] = AttackState::ServicesKnown;
  }
};

Verdict adversary_statistics(const ScenarioConfig& sc) {
  Verdict v;
  RedBench b(sc);
  Rng rng(2024);
  std::map<RedAction, long> counts;
  long n = 0;
  while (n < kRedDraws) {
    const auto c = red_select_action(b.env.mutable_state().red[0], b.env.mutable_state(), 0.1, rng);
    if (!c || c->row_host != b.target) continue;
    ++counts[c->action.red_kind()];
    ++n;
  }
  const double drs = counts[RedAction::DiscoverRemoteSystems] / double(n);
  const double dd = counts[RedAction::DiscoverDeception] / double(n);
  const double ex = counts[RedAction::ExploitNetworkServices] / double(n);
  char buf[160];
  std::snprintf(buf, sizeof buf, "  services-known row %.4f %.4f %.4f over %ld draws\n", drs, dd, ex, n);
  detail << buf;
  v.require(counts.size() == 3, "unexpected actions in the services-known row");
  v.require(std::abs(drs - 0.25) <= kFreqTol && std::abs(dd - 0.25) <= kFreqTol && std::abs(ex - 0.5) <= kFreqTol,
            "row frequencies off");

  auto alert_rate = [&](RedAction a) {
    Rng r(12 + static_cast<int>(a));
    long alerts = 0;
    for (long k = 0; k < kRedDraws; ++k) {
      RedChoice c;
      c.action = ActionSpec::red(a, Target::host(b.target));
      c.source_host = b.source;
      for (const auto& e : red_apply_outcome(b.env.mutable_state(), b.env.mutable_state().red[0], c,
                                             b.env.config(), r))
        if (e.type == EventType::Alert) ++alerts;
    }
    return alerts / double(kRedDraws);
  };
  const double stealth = alert_rate(RedAction::StealthServiceDiscovery);
  const double aggressive = alert_rate(RedAction::AggressiveServiceDiscovery);
  std::snprintf(buf, sizeof buf, "  discovery alert rates stealthy %.4f aggressive %.4f\n", stealth, aggressive);
  detail << buf;
  v.require(std::abs(stealth - 0.25) <= kFreqTol, "stealthy alert rate off");
  v.require(std::abs(aggressive - 0.75) <= kFreqTol, "aggressive alert rate off");
  return v;
}

// ---------------------------------------------------------------- metrics

std::vector<EpisodeTrace> random_traces(const ScenarioConfig& sc, int episodes, std::uint64_t seed) {
  NetworkEnv env(sc);
  Rng rng(seed);
  std::vector<EpisodeTrace> out;
  for (int ep = 0; ep < episodes; ++ep) {
    env.reset(derive_seed(seed, static_cast<std::uint64_t>(ep)));
    EpisodeTrace tr = begin_trace(env, "random", seed, ep);
    while (!env.done()) {
      JointAction j(static_cast<std::size_t>(env.agent_count()));
      std::vector<AgentStepRecord> recs(j.size());
      for (int a = 0; a < env.agent_count(); ++a) {
        if (env.pending(a)) {
          recs[static_cast<std::size_t>(a)].in_progress = true;
          continue;
        }
        const auto& space = env.action_space(a);
        j[static_cast<std::size_t>(a)].action = space.decode(rng.uniform_int(0, space.size() - 1));
        recs[static_cast<std::size_t>(a)].action = j[static_cast<std::size_t>(a)].action;
      }
      const TruthRecord before = env.truth_snapshot();
      const Phase phase = env.state().mission_phase;
      const StepResult r = env.step(j);
      record_step(tr, before, phase, std::move(recs), r);
    }
    out.push_back(std::move(tr));
  }
  return out;
}

Verdict metrics_arithmetic(const ScenarioConfig& sc) {
  Verdict v;
  MetricsReport r;
  r.episodes = 100;
  r.useful_recoveries.mean = 6.07;
  r.wasted_recoveries.mean = 2.2;
  finalize_precision(r);
  const std::string csv = report_table({{"H-MARL Expert", r}}).csv;
  detail << "  precision " << *r.precision << " error " << *r.error << "\n";
  v.require(csv.find(",0.73,0.27,") != std::string::npos, "precision/error cells differ from 0.73/0.27");

  const auto traces = random_traces(sc, kMetricTraces, 42);
  long events = 0, counted = 0, mismatched = 0;
  for (const auto& t : traces) {
    const auto m = episode_metrics(t);
    int tp = 0, fp = 0;
    for (const auto& st : t.steps)
      for (const auto& e : st.events)
        if (e.type == EventType::RecoveryCompleted) {
          ++events;
          const auto& truth = t.steps[static_cast<std::size_t>(e.submitted_step - t.steps.front().step)].truth;
          (truth.footholds[static_cast<std::size_t>(e.host)] != Foothold::None ? tp : fp)++;
        }
    if (m.useful_recoveries != tp || m.wasted_recoveries != fp || m.recoveries != tp + fp) ++mismatched;
    counted += m.recoveries;
  }
  detail << "  recoveries " << events << " counted " << counted << " mismatched traces " << mismatched << "\n";
  v.require(events == counted && mismatched == 0 && events > 0, "accounting identity broken");
  return v;
}

// ---------------------------------------------------------------- hierarchy

Verdict hierarchy_contracts(const ScenarioConfig& sc) {
  Verdict v;
  TrainConfig cfg = TrainConfig::desk();
  cfg.iterations = 3;
  NetworkEnv env(sc);
  Rng rng(5);
  Team meta = make_team(env, TeamSpec::for_strategy(StrategyKind::HmarlMeta), cfg, rng);
  meta.freeze_all_units(true);
  const std::string subs = meta.subpolicy_hash(), master = meta.master_hash();
  train_master(meta, sc, cfg, 5);
  detail << "  sub-policy hash " << subs << " -> " << meta.subpolicy_hash() << "\n";
  v.require(meta.subpolicy_hash() == subs, "master training changed sub-policy parameters");
  v.require(meta.master_hash() != master, "master did not learn");

  long audited = 0, unsound = 0, bypassed = 0;
  Rng trng(6);
  Team expert = make_team(env, TeamSpec::for_strategy(StrategyKind::HmarlExpert), cfg, trng);
  RolloutOptions opt;
  opt.trace = true;
  opt.record = false;
  for (int ep = 0; ep < kAuditEpisodes; ++ep) {
    const Team& team = ep % 2 ? meta : expert;
    const EpisodeOutput out = run_episode(env, team, derive_seed(77, static_cast<std::uint64_t>(ep)), opt, ep);
    for (const auto& st : out.trace->steps)
      for (int a = 0; a < env.agent_count(); ++a) {
        const auto& r = st.actions[static_cast<std::size_t>(a)];
        if (r.in_progress) continue;
        ++audited;
        const SubPolicyId id = team.spec.registry.at(static_cast<std::size_t>(r.subpolicy));
        const auto acts = subpolicy_actions(env.action_space(a), id);
        if (std::find(acts.begin(), acts.end(), env.action_space(a).encode(r.action)) == acts.end()) ++unsound;
        if (&team == &expert && r.host_ioc && id != SubPolicyId::Recover) ++bypassed;
      }
  }
  detail << "  audited decisions " << audited << " unsound " << unsound << " rule bypasses " << bypassed << "\n";
  v.require(unsound == 0, "primitive outside the selected sub-policy's action set");
  v.require(bypassed == 0, "expert skipped Recover despite a host IOC");
  return v;
}

// ---------------------------------------------------------------- determinism

Verdict environment_determinism(const ScenarioConfig& sc) {
  Verdict v;
  auto serialized = [&](std::uint64_t seed) {
    NetworkEnv env(sc);
    env.reset(seed);
    Rng rng(seed + 1);
    EpisodeTrace tr = begin_trace(env, "fuzz", seed);
    while (!env.done()) {
      JointAction j(static_cast<std::size_t>(env.agent_count()));
      std::vector<AgentStepRecord> recs(j.size());
      for (int a = 0; a < env.agent_count(); ++a) {
        if (env.pending(a)) continue;
        const auto& space = env.action_space(a);
        j[static_cast<std::size_t>(a)].action = space.decode(rng.uniform_int(0, space.size() - 1));
        recs[static_cast<std::size_t>(a)].action = j[static_cast<std::size_t>(a)].action;
      }
      const TruthRecord before = env.truth_snapshot();
      const Phase phase = env.state().mission_phase;
      const StepResult r = env.step(j);
      record_step(tr, before, phase, std::move(recs), r);
    }
    return serialize_trace(tr);
  };
  int identical = 0;
  for (std::uint64_t s = 0; s < 10; ++s) identical += serialized(900 + s) == serialized(900 + s);
  detail << "  identical serialized traces " << identical << "/10\n";
  v.require(identical == 10, "repeated episodes differ");
  v.require(serialized(900) != serialized(901), "different seeds gave identical traces");

  NetworkEnv env(sc);
  Rng rng(17);
  long steps = 0, completions = 0, violations = 0;
  for (std::uint64_t ep = 0; steps < kFuzzSteps; ++ep) {
    env.reset(3000 + ep);
    std::vector<int> due(static_cast<std::size_t>(env.agent_count()), -1);
    while (!env.done() && steps < kFuzzSteps) {
      const int t = env.state().step_index;
      JointAction j(static_cast<std::size_t>(env.agent_count()));
      for (int a = 0; a < env.agent_count(); ++a) {
        if (env.pending(a)) continue;
        const auto& space = env.action_space(a);
        j[static_cast<std::size_t>(a)].action = space.decode(rng.uniform_int(0, space.size() - 1));
        if (!j[static_cast<std::size_t>(a)].action.is_sleep())
          due[static_cast<std::size_t>(a)] = t + j[static_cast<std::size_t>(a)].action.duration - 1;
      }
      const StepResult r = env.step(j);
      ++steps;
      for (int a = 0; a < env.agent_count(); ++a) {
        bool completed = false;
        for (const auto& e : r.agent_events[static_cast<std::size_t>(a)])
          if (e.type != EventType::Alert && e.type != EventType::DecoyAccess && e.type != EventType::Message)
            completed = true;
        const bool expected = due[static_cast<std::size_t>(a)] == t;
        if (completed != expected || (expected && env.pending(a))) ++violations;
        completions += expected;
      }
    }
  }
  detail << "  fuzz steps " << steps << " completions " << completions << " violations " << violations << "\n";
  v.require(violations == 0, std::to_string(violations) + " duration accounting violations");
  return v;
}

// ---------------------------------------------------------------- orderings

struct Replicate {
  std::map<std::string, double> eval;
  std::map<std::string, TrainResult> curves;
  int ippo_converged = -1;
  int meta_converged = -1;
  double threshold = 0.0;
};

std::vector<double> smoothed(const TrainResult& r) {
  std::vector<double> out;
  for (std::size_t i = 0; i < r.curve.size(); ++i) {
    const std::size_t lo = i + 1 >= kSmoothing ? i + 1 - kSmoothing : 0;
    double s = 0.0;
    for (std::size_t k = lo; k <= i; ++k) s += r.curve[k].mean_return;
    out.push_back(s / static_cast<double>(i + 1 - lo));
  }
  return out;
}

int first_reaching(const TrainResult& r, double threshold) {
  const auto s = smoothed(r);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] >= threshold) return static_cast<int>(i) + 1;
  return -1;
}

double eval_mean(const ExperimentConfig& cfg, const Team& team) {
  return evaluate_team(cfg, team, "").report.reward.mean;
}

Replicate run_replicate(const ExperimentConfig& base, const std::string& target_red, std::ostream& csv) {
  Replicate rep;
  auto note = [&](const std::string& label, double value) {
    rep.eval[label] = value;
    csv << base.seed << ',' << label << ',' << value << '\n';
    char buf[160];
    std::snprintf(buf, sizeof buf, "  seed %llu %-22s eval %.2f\n", static_cast<unsigned long long>(base.seed),
                  label.c_str(), value);
    detail << buf << std::flush;
  };

  Team ippo_full;
  for (const auto& arm : ablation_arms(base.scenario.features.communication)) {
    ExperimentConfig c = base;
    c.strategy = StrategyKind::MarlDecentralized;
    c.scenario.features = arm.flags;
    TrainedRun run = train_strategy(c);
    note("ablation " + arm.label, eval_mean(c, run.team));
    rep.curves["ablation " + arm.label] = run.curves.back().second;
    if (arm.flags == base.scenario.features) {
      rep.curves["ippo"] = run.curves.back().second;
      ippo_full = std::move(run.team);
    }
  }
  if (ippo_full.agents.empty()) {
    ExperimentConfig c = base;
    c.strategy = StrategyKind::MarlDecentralized;
    TrainedRun run = train_strategy(c);
    rep.curves["ippo"] = run.curves.back().second;
    ippo_full = std::move(run.team);
  }
  note("ippo", eval_mean(base, ippo_full));

  ExperimentConfig ec = base;
  ec.strategy = StrategyKind::HmarlExpert;
  TrainedRun expert = train_strategy(ec);
  note("expert", eval_mean(ec, expert.team));

  ExperimentConfig cc = base;
  cc.strategy = StrategyKind::HmarlCollective;
  TrainedRun collective = train_strategy(cc);
  note("collective", eval_mean(cc, collective.team));

  // Meta over the expert's trained sub-policies.
  Team meta = fresh_team(base, StrategyKind::HmarlMeta, base.seed);
  adopt_subpolicies(meta, expert.team);
  meta.freeze_all_units(true);
  const TrainResult master = train_master(meta, base.scenario, base.train, derive_seed(base.seed, 0x3e7aULL));
  note("meta", eval_mean(base, meta));
  const auto ippo_s = smoothed(rep.curves["ippo"]);
  const double final_ippo = ippo_s.back();
  rep.threshold = final_ippo - kConvergenceBand * std::abs(final_ippo);
  rep.ippo_converged = first_reaching(rep.curves["ippo"], rep.threshold);
  rep.meta_converged = first_reaching(master, rep.threshold);
  detail << "  seed " << base.seed << " threshold " << rep.threshold << " ippo reaches at " << rep.ippo_converged
         << " meta master at " << rep.meta_converged << "\n";

  ExperimentConfig tc = base;
  tc.set_red(target_red);
  tc.strategy = StrategyKind::HmarlExpert;
  TrainedRun scratch = train_strategy(tc);
  note("transfer scratch", eval_mean(tc, scratch.team));
  Team tuned = fresh_team(tc, StrategyKind::HmarlExpert, base.seed);
  adopt_subpolicies(tuned, expert.team);
  const int budget = static_cast<int>(std::lround(kFineTuneFraction * tc.train.iterations));
  fine_tune_subpolicy(tuned, SubPolicyId::Investigate, tc.scenario, tc.train, budget, base.seed);
  note("transfer fine-tuned", eval_mean(tc, tuned));
  return rep;
}

struct OrderingOutcome {
  Verdict verdict;
  std::string summary;
};

OrderingOutcome orderings(const ExperimentConfig& base, int replicates, const std::string& target_red,
                          const std::filesystem::path& details) {
  std::ofstream csv;
  if (!details.empty()) {
    std::filesystem::create_directories(details.parent_path().empty() ? "." : details.parent_path());
    csv.open(details);
  }
  std::ostringstream sink;
  std::ostream& out = csv.is_open() ? static_cast<std::ostream&>(csv) : sink;
  out << "seed,label,value\n";

  int a = 0, b = 0, c = 0, d = 0;
  for (int k = 0; k < replicates; ++k) {
    ExperimentConfig cfg = base;
    cfg.seed = static_cast<std::uint64_t>(k + 1);
    const Replicate r = run_replicate(cfg, target_red, out);
    const auto& e = r.eval;
    const bool ok_a = e.at("ablation basic") <= e.at("ablation +history") &&
                      e.at("ablation +history") <= e.at("ablation +ioc") &&
                      e.at("ablation +ioc") <= e.at("ablation +decoys");
    const bool ok_b = e.at("expert") >= e.at("ippo") && e.at("ippo") >= e.at("collective");
    const bool ok_c = r.meta_converged > 0 && r.ippo_converged > 0 && 2 * r.meta_converged <= r.ippo_converged;
    const double scratch = e.at("transfer scratch");
    const bool ok_d = e.at("transfer fine-tuned") >= scratch - kFineTuneTol * std::abs(scratch);
    a += ok_a;
    b += ok_b;
    c += ok_c;
    d += ok_d;
    detail << "  seed " << cfg.seed << " holds: a=" << ok_a << " b=" << ok_b << " c=" << ok_c << " d=" << ok_d
           << "\n";
  }
  OrderingOutcome o;
  o.verdict.require(a >= kRequired, "(a) ablation ordering");
  o.verdict.require(b >= kRequired, "(b) strategy ordering");
  o.verdict.require(c >= kRequired, "(c) meta convergence");
  o.verdict.require(d >= kRequired, "(d) fine-tune tolerance");
  std::ostringstream s;
  s << "a " << a << "/" << replicates << ", b " << b << "/" << replicates << ", c " << c << "/" << replicates
    << ", d " << d << "/" << replicates;
  o.summary = s.str();
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  std::string scenario_path = std::string(CYBERDEF_SOURCE_DIR) + "/data/scenarios/desk.yaml";
  std::string profile = "desk";
  std::string target_red = "Aggressive";
  std::string details;
  int replicates = kReplicates;
  int iterations = -1;
  int workers = 1;
  app.add_option("--only", only, "Criteria to run (default all)");
  app.add_option("--config", scenario_path, "Experiment YAML for the ordering runs");
  app.add_option("--profile", profile, "Training profile for the ordering runs");
  app.add_option("--replicates", replicates, "Seed replicates for the ordering runs");
  app.add_option("--iterations", iterations, "Override training iterations");
  app.add_option("--transfer-red", target_red, "Red variant for the fine-tuning check");
  app.add_option("--workers", workers, "Rollout worker threads");
  app.add_option("--details", details, "CSV file receiving every ordering measurement");
  CLI11_PARSE(app, argc, argv);

  ExperimentConfig base = load_experiment(scenario_path);
  base.set_profile(profile);
  if (iterations >= 0) base.train.iterations = iterations;
  base.train.workers = workers;
  base.episodes = kEvalEpisodes;
  base.set_red("Default");
  const ScenarioConfig& sc = base.scenario;

  auto wanted = [&](int k) { return only.empty() || std::find(only.begin(), only.end(), k) != only.end(); };
  bool all = true;
  auto report = [&](int k, const std::string& name, const std::function<Verdict()>& run) {
    if (!wanted(k)) return;
    const auto t0 = std::chrono::steady_clock::now();
    detail << "criterion " << k << ": " << name << "\n";
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    all = all && v.pass;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1fs", elapsed(t0));
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << k << "  " << name << "  [" << buf << "]"
              << (v.note.empty() ? "" : "  " + v.note) << std::endl;
  };

  report(1, "numerical core", numerical_core);
  report(2, "adversary statistics", [&] { return adversary_statistics(sc); });
  report(3, "metrics arithmetic", [&] { return metrics_arithmetic(sc); });
  report(4, "hierarchy contracts", [&] { return hierarchy_contracts(sc); });
  report(5, "ordering reproductions", [&] {
    OrderingOutcome o = orderings(base, replicates, target_red, details);
    detail << "  " << o.summary << "\n";
    o.verdict.note = o.summary + (o.verdict.note.empty() ? "" : "; failing " + o.verdict.note);
    return o.verdict;
  });
  report(6, "environment determinism", [&] { return environment_determinism(sc); });
  return all ? 0 : 1;
}
