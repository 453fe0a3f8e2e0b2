#include "cyberdef/experiment.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "cyberdef/errors.hpp"
#include "cyberdef/hmarl.hpp"
#include "cyberdef/red_machine.hpp"
#include "cyberdef/rollout.hpp"
#include "cyberdef/trace.hpp"

#ifndef CYBERDEF_COMMIT
#define CYBERDEF_COMMIT "unknown"
#endif

namespace cyberdef {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

template <typename T>
void read_key(const YAML::Node& node, const char* key, T& out, const std::string& section) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(section + "." + key + ": malformed value");
  }
}

void apply_training(TrainConfig& t, const std::string& overrides) {
  if (overrides.empty()) return;
  const YAML::Node n = YAML::Load(overrides);
  if (!n || n.IsNull()) return;
  if (!n.IsMap()) throw ConfigError("training: expected a map");
  static const std::vector<std::string> known = {
      "learning_rate", "gamma",  "gae_lambda", "clip_epsilon", "entropy_coef", "value_coef",
      "max_grad_norm", "normalize_advantages", "optimizer", "buffer_capacity", "minibatch",
      "sgd_iters", "hidden", "iterations", "reward_scale", "workers"};
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("training: unknown key '" + key + "'");
  }
  const std::string s = "training";
  read_key(n, "learning_rate", t.learning_rate, s);
  read_key(n, "gamma", t.gamma, s);
  read_key(n, "gae_lambda", t.gae_lambda, s);
  read_key(n, "clip_epsilon", t.clip_epsilon, s);
  read_key(n, "entropy_coef", t.entropy_coef, s);
  read_key(n, "value_coef", t.value_coef, s);
  read_key(n, "max_grad_norm", t.max_grad_norm, s);
  read_key(n, "normalize_advantages", t.normalize_advantages, s);
  read_key(n, "buffer_capacity", t.buffer_capacity, s);
  read_key(n, "minibatch", t.minibatch, s);
  read_key(n, "sgd_iters", t.sgd_iters, s);
  read_key(n, "hidden", t.hidden, s);
  read_key(n, "iterations", t.iterations, s);
  read_key(n, "reward_scale", t.reward_scale, s);
  read_key(n, "workers", t.workers, s);
  if (n["optimizer"]) {
    const auto o = n["optimizer"].as<std::string>();
    if (o == "adam")
      t.optimizer = OptimizerKind::Adam;
    else if (o == "sgd")
      t.optimizer = OptimizerKind::Sgd;
    else
      throw ConfigError("training.optimizer: expected adam or sgd, got '" + o + "'");
  }
}

json training_json(const TrainConfig& t) {
  return json{{"profile", t.profile},
              {"learning_rate", t.learning_rate},
              {"gamma", t.gamma},
              {"gae_lambda", t.gae_lambda},
              {"clip_epsilon", t.clip_epsilon},
              {"entropy_coef", t.entropy_coef},
              {"value_coef", t.value_coef},
              {"max_grad_norm", t.max_grad_norm},
              {"normalize_advantages", t.normalize_advantages},
              {"optimizer", t.optimizer == OptimizerKind::Adam ? "adam" : "sgd"},
              {"buffer_capacity", t.buffer_capacity},
              {"minibatch", t.minibatch},
              {"sgd_iters", t.sgd_iters},
              {"hidden", t.hidden},
              {"iterations", t.iterations},
              {"reward_scale", t.reward_scale},
              {"workers", t.workers}};
}

SubPolicyId parse_subpolicy(const std::string& name) {
  for (auto id : {SubPolicyId::Investigate, SubPolicyId::Recover, SubPolicyId::ControlTraffic})
    if (to_string(id) == name) return id;
  throw LoadError("checkpoint names unknown sub-policy '" + name + "'");
}

std::uint64_t eval_seed(const ExperimentConfig& cfg) { return derive_seed(cfg.seed, 0xe7a1ULL); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_curve(const fs::path& path, const TrainResult& r) {
  std::ostringstream ss;
  write_curve_csv(ss, r);
  write_text(path, ss.str());
}

void write_labeled_curves(const fs::path& path,
                          const std::vector<std::pair<std::string, TrainResult>>& curves) {
  std::ostringstream ss;
  ss << "label,iteration,mean_return,std_return\n";
  char buf[256];
  for (const auto& [label, r] : curves)
    for (const auto& row : r.curve) {
      std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f\n", row.iteration, row.mean_return, row.std_return);
      ss << label << ',' << buf;
    }
  write_text(path, ss.str());
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json base_manifest(const std::string& command, const ExperimentConfig& cfg) {
  json m;
  m["tool"] = "cyberdef";
  m["command"] = command;
  m["commit"] = build_commit();
  m["created"] = utc_now();
  m["strategy"] = std::string(to_string(cfg.strategy));
  m["red"] = cfg.scenario.red.variant;
  m["profile"] = cfg.profile;
  m["seeds"] = {{"train", cfg.seed}, {"eval", eval_seed(cfg)}};
  m["episodes"] = cfg.episodes;
  m["greedy"] = cfg.greedy;
  m["training"] = training_json(cfg.train);
  m["config"] = dump_experiment(cfg);
  return m;
}

void write_manifest(const fs::path& out, const json& m) {
  write_text(out / "manifest.json", m.dump(2) + "\n");
}

void write_traces(const fs::path& path, const std::vector<EpisodeTrace>& traces) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& t : traces) write_trace(out, t);
}

void write_report(const fs::path& out, const std::string& stem,
                  const std::vector<std::pair<std::string, MetricsReport>>& rows, std::ostream& log) {
  const ReportTable table = report_table(rows);
  write_text(out / (stem + ".csv"), table.csv);
  write_text(out / (stem + ".txt"), table.text);
  log << table.text;
}

Checkpoint labeled_checkpoint(const Team& team, const ExperimentConfig& cfg, std::int64_t iteration) {
  Checkpoint c = team_checkpoint(team, iteration);
  c.meta["red"] = cfg.scenario.red.variant;
  c.meta["profile"] = cfg.profile;
  c.meta["seed"] = std::to_string(cfg.seed);
  return c;
}

void log_config(const ExperimentConfig& cfg, std::ostream& log) {
  log << "# effective config\n" << dump_experiment(cfg) << "\n";
}

TrainHooks progress_hooks(const std::string& stage, int total, std::ostream& log,
                          std::function<void(const CurveRow&, const Team&)> extra = {}) {
  TrainHooks h;
  h.on_iteration = [stage, total, &log, extra](const CurveRow& row, const Team& team) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "[%s] iteration %d/%d return %.2f +/- %.2f\n", stage.c_str(),
                  row.iteration + 1, total, row.mean_return, row.std_return);
    log << buf << std::flush;
    if (extra) extra(row, team);
  };
  return h;
}

}  // namespace

void ExperimentConfig::set_profile(const std::string& name) {
  const int workers = train.workers;
  TrainConfig t = train_profile(name);
  apply_training(t, training_overrides);
  if (!YAML::Load(training_overrides.empty() ? "{}" : training_overrides)["workers"]) t.workers = workers;
  t.validate();
  train = t;
  profile = name;
}

void ExperimentConfig::set_red(const std::string& variant) {
  const auto v = parse_red_variant(variant);
  if (!v)
    throw ConfigError("unknown red variant '" + variant +
                      "' (expected Default, Aggressive, Stealthy, Impact or ExternalScan)");
  ScenarioConfig s = scenario;
  s.red.variant = std::string(to_string(*v));
  s.validate();
  scenario = s;
}

int ExperimentConfig::fine_tune_budget() const {
  if (fine_tune_iterations >= 0) return fine_tune_iterations;
  return static_cast<int>(std::lround(fine_tune_fraction * train.iterations));
}

ExperimentConfig parse_experiment(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.scenario = parse_scenario(yaml_text, ScenarioConfig::desk());
  if (!root || root.IsNull()) {
    cfg.set_red(cfg.scenario.red.variant);
    return cfg;
  }
  if (auto t = root["training"]) {
    YAML::Emitter e;
    e << t;
    cfg.training_overrides = e.c_str();
  }
  std::string profile = "desk";
  const YAML::Node x = root["experiment"];
  const std::string s = "experiment";
  if (x) {
    if (!x.IsMap()) throw ConfigError("experiment: expected a map");
    static const std::vector<std::string> known = {
        "strategy", "red", "profile", "seed", "episodes", "greedy", "checkpoint_every", "checkpoint",
        "pretrained", "fine_tune_iterations", "fine_tune_fraction", "sweep", "workers"};
    for (const auto& kv : x) {
      const auto key = kv.first.as<std::string>();
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigError("experiment: unknown key '" + key + "'");
    }
    if (x["strategy"]) cfg.strategy = parse_strategy(x["strategy"].as<std::string>());
    if (x["red"]) cfg.set_red(x["red"].as<std::string>());
    read_key(x, "profile", profile, s);
    read_key(x, "seed", cfg.seed, s);
    read_key(x, "episodes", cfg.episodes, s);
    read_key(x, "greedy", cfg.greedy, s);
    read_key(x, "checkpoint_every", cfg.checkpoint_every, s);
    read_key(x, "checkpoint", cfg.checkpoint, s);
    read_key(x, "pretrained", cfg.pretrained, s);
    read_key(x, "fine_tune_iterations", cfg.fine_tune_iterations, s);
    read_key(x, "fine_tune_fraction", cfg.fine_tune_fraction, s);
    read_key(x, "sweep", cfg.sweep, s);
    read_key(x, "workers", cfg.train.workers, s);
  }
  cfg.set_profile(profile);
  cfg.set_red(cfg.scenario.red.variant);
  if (cfg.episodes < 1) throw ConfigError("experiment.episodes must be >= 1");
  if (cfg.checkpoint_every < 0) throw ConfigError("experiment.checkpoint_every must be >= 0");
  if (cfg.fine_tune_fraction < 0.0 || cfg.fine_tune_fraction > 1.0)
    throw ConfigError("experiment.fine_tune_fraction must be in [0,1]");
  for (const auto& v : cfg.sweep)
    if (!parse_red_variant(v)) throw ConfigError("experiment.sweep: unknown red variant '" + v + "'");
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse_experiment(ss.str());
  cfg.config_path = path;
  return cfg;
}

std::string dump_experiment(const ExperimentConfig& cfg) {
  YAML::Node root = YAML::Load(dump_scenario(cfg.scenario));
  YAML::Node x;
  x["strategy"] = std::string(to_string(cfg.strategy));
  x["red"] = cfg.scenario.red.variant;
  x["profile"] = cfg.profile;
  x["seed"] = cfg.seed;
  x["episodes"] = cfg.episodes;
  x["greedy"] = cfg.greedy;
  x["checkpoint_every"] = cfg.checkpoint_every;
  if (!cfg.checkpoint.empty()) x["checkpoint"] = cfg.checkpoint;
  if (!cfg.pretrained.empty()) x["pretrained"] = cfg.pretrained;
  x["fine_tune_iterations"] = cfg.fine_tune_iterations;
  x["fine_tune_fraction"] = cfg.fine_tune_fraction;
  if (!cfg.sweep.empty()) x["sweep"] = cfg.sweep;
  root["experiment"] = x;
  const TrainConfig& t = cfg.train;
  YAML::Node tr;
  tr["learning_rate"] = t.learning_rate;
  tr["gamma"] = t.gamma;
  tr["gae_lambda"] = t.gae_lambda;
  tr["clip_epsilon"] = t.clip_epsilon;
  tr["entropy_coef"] = t.entropy_coef;
  tr["value_coef"] = t.value_coef;
  tr["max_grad_norm"] = t.max_grad_norm;
  tr["normalize_advantages"] = t.normalize_advantages;
  tr["optimizer"] = t.optimizer == OptimizerKind::Adam ? "adam" : "sgd";
  tr["buffer_capacity"] = t.buffer_capacity;
  tr["minibatch"] = t.minibatch;
  tr["sgd_iters"] = t.sgd_iters;
  tr["hidden"] = t.hidden;
  tr["iterations"] = t.iterations;
  tr["reward_scale"] = t.reward_scale;
  tr["workers"] = t.workers;
  root["training"] = tr;
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << root;
  return std::string(e.c_str()) + "\n";
}

OutputLock::OutputLock(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  path_ = dir / ".cyberdef.lock";
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    const int err = errno;
    path_.clear();
    if (err == EEXIST)
      throw std::runtime_error("output directory " + dir.string() +
                               " is in use by another run (remove .cyberdef.lock if it is stale)");
    throw std::runtime_error("cannot lock " + dir.string() + ": " + std::strerror(err));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

OutputLock::~OutputLock() {
  if (path_.empty()) return;
  std::error_code ec;
  fs::remove(path_, ec);
}

std::string build_commit() { return CYBERDEF_COMMIT; }

Team fresh_team(const ExperimentConfig& cfg, StrategyKind strategy, std::uint64_t seed) {
  NetworkEnv env(cfg.scenario);
  Rng rng(derive_seed(seed, 0x7ea5ULL));
  return make_team(env, TeamSpec::for_strategy(strategy), cfg.train, rng);
}

namespace {

TrainedRun train_with(const ExperimentConfig& cfg,
                      const std::function<TrainHooks(const std::string&)>& hooks_for) {
  auto hooks = [&](const std::string& stage) { return hooks_for ? hooks_for(stage) : TrainHooks{}; };
  const ScenarioConfig& sc = cfg.scenario;
  switch (cfg.strategy) {
    case StrategyKind::MarlDecentralized: {
      Team team = fresh_team(cfg, cfg.strategy, cfg.seed);
      auto r = train_ippo(team, sc, cfg.train, cfg.seed, hooks("train"));
      return {std::move(team), {{"train", std::move(r)}}};
    }
    case StrategyKind::MarlCentralizedCritic: {
      Team team = fresh_team(cfg, cfg.strategy, cfg.seed);
      auto r = train_centralized_critic(team, sc, cfg.train, cfg.seed, hooks("train"));
      return {std::move(team), {{"train", std::move(r)}}};
    }
    case StrategyKind::HmarlExpert: {
      Team team = fresh_team(cfg, cfg.strategy, cfg.seed);
      auto r = train_subpolicies(team, sc, cfg.train, cfg.seed, hooks("train"));
      return {std::move(team), {{"train", std::move(r)}}};
    }
    case StrategyKind::HmarlCollective: {
      Team team = fresh_team(cfg, cfg.strategy, cfg.seed);
      auto r = train_collective(team, sc, cfg.train, cfg.seed, hooks("train"));
      return {std::move(team), {{"train", std::move(r)}}};
    }
    case StrategyKind::HmarlMeta: {
      Team meta = fresh_team(cfg, StrategyKind::HmarlMeta, cfg.seed);
      if (!cfg.pretrained.empty()) {
        restore_subpolicies(meta, load_checkpoint(cfg.pretrained));
        meta.freeze_all_units(true);
        auto r = train_master(meta, sc, cfg.train, derive_seed(cfg.seed, 0x3e7aULL), hooks("master"));
        return {std::move(meta), {{"master", std::move(r)}}};
      }
      Team expert = fresh_team(cfg, StrategyKind::HmarlExpert, cfg.seed);
      auto r = train_meta_curriculum(meta, expert, sc, cfg.train, cfg.seed, hooks("subpolicies"),
                                     hooks("master"));
      return {std::move(meta), {{"subpolicies", std::move(r.subpolicies)}, {"master", std::move(r.master)}}};
    }
  }
  throw ContractError("unhandled strategy");
}

}  // namespace

TrainedRun train_strategy(const ExperimentConfig& cfg, const TrainHooks& hooks) {
  return train_with(cfg, [&](const std::string&) { return hooks; });
}

Team team_from_checkpoint(const ExperimentConfig& cfg, const Checkpoint& ckpt) {
  auto meta = [&](const std::string& key) -> std::string {
    auto it = ckpt.meta.find(key);
    return it == ckpt.meta.end() ? std::string() : it->second;
  };
  StrategyKind strategy = cfg.strategy;
  if (!meta("strategy").empty()) {
    try {
      strategy = parse_strategy(meta("strategy"));
    } catch (const ConfigError& e) {
      throw LoadError(std::string("checkpoint: ") + e.what());
    }
  }
  TeamSpec spec = TeamSpec::for_strategy(strategy);
  const std::string reg = meta("registry");
  if (!reg.empty() && reg != "-") {
    spec.registry.clear();
    std::stringstream ss(reg);
    std::string name;
    while (std::getline(ss, name, ',')) spec.registry.push_back(parse_subpolicy(name));
  }
  TrainConfig t = cfg.train;
  if (!meta("hidden").empty()) t.hidden = std::stoi(meta("hidden"));
  NetworkEnv env(cfg.scenario);
  Rng rng(0);
  Team team = make_team(env, spec, t, rng);
  restore_team(team, ckpt, true);
  return team;
}

EvalOutcome evaluate_team(const ExperimentConfig& cfg, const Team& team, const std::string& label) {
  EvalResult r = evaluate(cfg.scenario, team, eval_seed(cfg), cfg.episodes, cfg.greedy, true, cfg.train.workers);
  EvalOutcome out;
  out.label = label;
  out.report = compute_metrics(r.traces);
  out.traces = std::move(r.traces);
  return out;
}

std::vector<AblationArm> ablation_arms(bool communication) {
  auto flags = [&](bool history, bool ioc, bool decoy) {
    ObsFlags f;
    f.history = history;
    f.ioc = ioc;
    f.decoy_ioc = decoy;
    f.communication = communication;
    return f;
  };
  return {{"basic", flags(false, false, false)},
          {"+history", flags(true, false, false)},
          {"+ioc", flags(true, true, false)},
          {"+decoys", flags(true, true, true)}};
}

void cmd_train(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  OutputLock lock(out);
  const auto started = std::chrono::steady_clock::now();
  log_config(cfg, log);
  fs::create_directories(out / "checkpoints");
  write_text(out / "config.yaml", dump_experiment(cfg));

  json checkpoints = json::array();
  auto hooks_for = [&](const std::string& stage) {
    return progress_hooks(stage, cfg.train.iterations, log, [&, stage](const CurveRow& row, const Team& team) {
      const int done = row.iteration + 1;
      if (cfg.checkpoint_every <= 0 || done % cfg.checkpoint_every != 0) return;
      char name[64];
      std::snprintf(name, sizeof name, "%s_%04d.ckpt", stage.c_str(), done);
      save_checkpoint((out / "checkpoints" / name).string(), labeled_checkpoint(team, cfg, done));
      checkpoints.push_back(std::string("checkpoints/") + name);
    });
  };
  TrainedRun run = train_with(cfg, hooks_for);

  json curves = json::array();
  for (const auto& [stage, r] : run.curves) {
    const std::string file = run.curves.size() == 1 ? "curve.csv" : "curve_" + stage + ".csv";
    write_curve(out / file, r);
    curves.push_back({{"stage", stage}, {"file", file}, {"iterations", r.curve.size()},
                      {"final_mean_return", r.final_mean()}});
  }
  int total = 0;
  for (const auto& c : run.curves) total += static_cast<int>(c.second.curve.size());
  save_checkpoint((out / "final.ckpt").string(), labeled_checkpoint(run.team, cfg, total));

  json m = base_manifest("train", cfg);
  m["curves"] = curves;
  m["checkpoints"] = checkpoints;
  m["final_checkpoint"] = {{"file", "final.ckpt"}, {"digest", file_digest((out / "final.ckpt").string())}};
  m["rerun"] = "cyberdef train --config config.yaml --workers 1 --out <dir>";
  m["elapsed_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_manifest(out, m);
}

void cmd_eval(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  if (cfg.checkpoint.empty()) throw ConfigError("eval needs a checkpoint (--checkpoint)");
  if (!fs::exists(cfg.checkpoint)) throw LoadError("checkpoint not found: expected " + cfg.checkpoint);
  OutputLock lock(out);
  log_config(cfg, log);
  write_text(out / "config.yaml", dump_experiment(cfg));
  const std::string before = file_digest(cfg.checkpoint);
  const Checkpoint ckpt = load_checkpoint(cfg.checkpoint);

  std::vector<std::string> variants = cfg.sweep;
  const bool sweep = !variants.empty();
  if (!sweep) variants.push_back(cfg.scenario.red.variant);
  std::vector<std::pair<std::string, MetricsReport>> rows;
  json evals = json::array();
  for (const auto& v : variants) {
    ExperimentConfig c = cfg;
    c.set_red(v);
    const Team team = team_from_checkpoint(c, ckpt);
    const std::string label = std::string(to_string(team.spec.strategy)) + (sweep ? " vs " + c.scenario.red.variant : "");
    log << "evaluating " << label << " over " << c.episodes << " episodes\n" << std::flush;
    EvalOutcome e = evaluate_team(c, team, label);
    const std::string file = sweep ? "traces_" + c.scenario.red.variant + ".jsonl" : "traces.jsonl";
    write_traces(out / file, e.traces);
    evals.push_back({{"red", c.scenario.red.variant}, {"traces", file},
                     {"reward_mean", e.report.reward.mean}, {"reward_std", e.report.reward.std}});
    rows.emplace_back(label, e.report);
  }
  write_report(out, "metrics", rows, log);
  const std::string after = file_digest(cfg.checkpoint);
  if (after != before) throw std::runtime_error("checkpoint changed during evaluation");

  json m = base_manifest("eval", cfg);
  m["checkpoint"] = {{"file", fs::absolute(cfg.checkpoint).string()}, {"digest", before}};
  m["evaluations"] = evals;
  m["report"] = {"metrics.csv", "metrics.txt"};
  write_manifest(out, m);
}

void cmd_ablate_obs(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  OutputLock lock(out);
  log_config(cfg, log);
  write_text(out / "config.yaml", dump_experiment(cfg));
  std::vector<std::pair<std::string, TrainResult>> curves;
  std::vector<std::pair<std::string, MetricsReport>> rows;
  json arms = json::array();
  for (const auto& arm : ablation_arms(cfg.scenario.features.communication)) {
    ExperimentConfig c = cfg;
    c.scenario.features = arm.flags;
    TrainedRun run = train_with(c, [&](const std::string& stage) {
      return progress_hooks(arm.label + " " + stage, c.train.iterations, log);
    });
    const TrainResult& last = run.curves.back().second;
    curves.emplace_back(arm.label, last);
    EvalOutcome e = evaluate_team(c, run.team, arm.label);
    rows.emplace_back(arm.label, e.report);
    arms.push_back({{"label", arm.label},
                    {"history", arm.flags.history},
                    {"ioc", arm.flags.ioc},
                    {"decoy_ioc", arm.flags.decoy_ioc},
                    {"train_seed", c.seed},
                    {"eval_seed", eval_seed(c)},
                    {"final_train_return", last.final_mean()},
                    {"eval_mean", e.report.reward.mean},
                    {"eval_std", e.report.reward.std}});
  }
  write_labeled_curves(out / "ablation_curves.csv", curves);
  write_report(out, "metrics", rows, log);
  json m = base_manifest("ablate-obs", cfg);
  m["arms"] = arms;
  m["curves"] = "ablation_curves.csv";
  write_manifest(out, m);
}

void cmd_transfer(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  if (cfg.pretrained.empty()) throw ConfigError("transfer needs a pretrained checkpoint (--pretrained)");
  if (!fs::exists(cfg.pretrained))
    throw LoadError("pretrained checkpoint not found: expected " + cfg.pretrained +
                    " holding the Investigate and Recover sub-policies of an HMARL-Expert run "
                    "(final.ckpt in its output directory)");
  OutputLock lock(out);
  log_config(cfg, log);
  write_text(out / "config.yaml", dump_experiment(cfg));
  const std::string digest = file_digest(cfg.pretrained);
  const Checkpoint source = load_checkpoint(cfg.pretrained);

  ExperimentConfig expert_cfg = cfg;
  expert_cfg.strategy = StrategyKind::HmarlExpert;
  Team tuned = fresh_team(expert_cfg, StrategyKind::HmarlExpert, cfg.seed);
  restore_subpolicies(tuned, source);

  const int budget = cfg.fine_tune_budget();
  const int full = cfg.train.iterations;
  std::vector<std::pair<std::string, TrainResult>> curves;
  std::vector<std::pair<std::string, MetricsReport>> rows;

  Team scratch = fresh_team(expert_cfg, StrategyKind::HmarlExpert, cfg.seed);
  TrainResult from_scratch =
      train_subpolicies(scratch, cfg.scenario, cfg.train, cfg.seed, progress_hooks("scratch", full, log));
  write_curve(out / "curve_scratch.csv", from_scratch);
  curves.emplace_back("scratch", from_scratch);

  TrainResult fine = fine_tune_subpolicy(tuned, SubPolicyId::Investigate, cfg.scenario, cfg.train, budget,
                                         cfg.seed, progress_hooks("fine-tune", budget, log));
  write_curve(out / "curve_finetune.csv", fine);
  curves.emplace_back("fine-tune", fine);
  save_checkpoint((out / "finetuned.ckpt").string(), labeled_checkpoint(tuned, expert_cfg, budget));

  Team meta = fresh_team(cfg, StrategyKind::HmarlMeta, cfg.seed);
  adopt_subpolicies(meta, tuned);
  meta.freeze_all_units(true);
  TrainResult master = train_master(meta, cfg.scenario, cfg.train, derive_seed(cfg.seed, 0x3e7aULL),
                                    progress_hooks("master", full, log));
  write_curve(out / "curve_master.csv", master);
  curves.emplace_back("master", master);
  ExperimentConfig meta_cfg = cfg;
  meta_cfg.strategy = StrategyKind::HmarlMeta;
  save_checkpoint((out / "meta.ckpt").string(), labeled_checkpoint(meta, meta_cfg, full));
  write_labeled_curves(out / "transfer_curves.csv", curves);

  EvalOutcome es = evaluate_team(cfg, scratch, "HMARL-Expert from scratch");
  EvalOutcome ef = evaluate_team(cfg, tuned, "HMARL-Expert fine-tuned");
  EvalOutcome em = evaluate_team(cfg, meta, "HMARL-Meta with fine-tuning");
  write_traces(out / "traces.jsonl", em.traces);
  for (auto* e : {&es, &ef, &em}) rows.emplace_back(e->label, e->report);
  write_report(out, "metrics", rows, log);

  json m = base_manifest("transfer", cfg);
  auto src_meta = [&](const std::string& k) {
    auto it = source.meta.find(k);
    return it == source.meta.end() ? std::string("unknown") : it->second;
  };
  m["source_checkpoint"] = {{"file", fs::absolute(cfg.pretrained).string()},
                            {"digest", digest},
                            {"red", src_meta("red")},
                            {"strategy", src_meta("strategy")}};
  m["fine_tune_iterations"] = budget;
  m["scratch_iterations"] = full;
  m["curves"] = {"curve_scratch.csv", "curve_finetune.csv", "curve_master.csv", "transfer_curves.csv"};
  m["final"] = {{"scratch", from_scratch.final_mean()},
                {"fine_tune", fine.curve.empty() ? json(nullptr) : json(fine.final_mean())},
                {"meta_eval_mean", em.report.reward.mean},
                {"meta_eval_std", em.report.reward.std}};
  write_manifest(out, m);
}

void cmd_report(const std::vector<std::string>& inputs, const fs::path& out, std::ostream& log) {
  if (inputs.empty()) throw ConfigError("report needs at least one trace file or run directory");
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(p)) {
        const auto name = e.path().filename().string();
        if (name.rfind("traces", 0) == 0 && e.path().extension() == ".jsonl") found.push_back(e.path().string());
      }
      if (found.empty()) throw InputError("no traces*.jsonl files in " + in);
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      files.push_back(in);
    } else {
      throw InputError("report input not found: " + in);
    }
  }
  std::vector<std::pair<std::string, std::vector<EpisodeTrace>>> groups;
  for (const auto& f : files)
    for (auto& t : load_traces(f)) {
      const std::string key = t.strategy + " vs " + t.red;
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
      if (it == groups.end()) {
        groups.emplace_back(key, std::vector<EpisodeTrace>{});
        it = std::prev(groups.end());
      }
      it->second.push_back(std::move(t));
    }
  if (groups.empty()) throw InputError("report inputs hold no episodes");
  std::vector<std::pair<std::string, MetricsReport>> rows;
  for (const auto& [key, traces] : groups) rows.emplace_back(key, compute_metrics(traces));
  if (out.empty()) {
    log << report_table(rows).text;
    return;
  }
  OutputLock lock(out);
  write_report(out, "report", rows, log);
  json m;
  m["tool"] = "cyberdef";
  m["command"] = "report";
  m["commit"] = build_commit();
  m["created"] = utc_now();
  json in = json::array();
  for (const auto& f : files) in.push_back({{"file", fs::absolute(f).string()}, {"digest", file_digest(f)}});
  m["inputs"] = in;
  m["report"] = {"report.csv", "report.txt"};
  write_manifest(out, m);
}

}  // namespace cyberdef
