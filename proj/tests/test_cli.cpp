#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "cyberdef/errors.hpp"
#include "cyberdef/experiment.hpp"

using namespace cyberdef;
namespace fs = std::filesystem;

namespace {

const char* kTiny = R"(
episode: {length: 30, phase_boundaries: [10, 20]}
experiment: {profile: quick, checkpoint_every: 1, episodes: 3}
training: {buffer_capacity: 300, minibatch: 128, sgd_iters: 2, iterations: 2}
)";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cyberdef_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

int run_cli(const std::string& args) {
  const int status = std::system((std::string(CYBERDEF_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config file values apply and flags win") {
  ExperimentConfig cfg = parse_experiment(std::string(kTiny) + "red: {variant: Stealthy}\n");
  CHECK(cfg.profile == "quick");
  CHECK(cfg.train.buffer_capacity == 300);
  CHECK(cfg.train.iterations == 2);
  CHECK(cfg.scenario.episode_length == 30);
  CHECK(cfg.scenario.red.variant == "Stealthy");
  cfg.set_profile("paper");
  CHECK(cfg.train.learning_rate == doctest::Approx(5e-5));
  CHECK(cfg.train.buffer_capacity == 300);
  cfg.set_red("impact");
  CHECK(cfg.scenario.red.variant == "Impact");
  CHECK(parse_experiment("").scenario.red.variant == "Default");
}

TEST_CASE("unknown names and keys are config errors") {
  CHECK_THROWS_AS(parse_experiment("experiment: {strategy: Bogus}"), ConfigError);
  CHECK_THROWS_AS(parse_experiment("experiment: {red: Nope}"), ConfigError);
  CHECK_THROWS_AS(parse_experiment("experiment: {colour: blue}"), ConfigError);
  CHECK_THROWS_AS(parse_experiment("training: {learning_rat: 1}"), ConfigError);
  CHECK_THROWS_AS(parse_experiment("experiment: {profile: huge}"), ConfigError);
  CHECK_THROWS_AS(parse_experiment("experiment: {sweep: [Default, Sneaky]}"), ConfigError);
}

TEST_CASE("dumped config reproduces the effective config") {
  ExperimentConfig cfg = parse_experiment(kTiny);
  cfg.strategy = StrategyKind::HmarlCollective;
  cfg.seed = 99;
  cfg.set_red("Aggressive");
  const std::string dump = dump_experiment(cfg);
  const ExperimentConfig back = parse_experiment(dump);
  CHECK(dump_experiment(back) == dump);
  CHECK(back.strategy == StrategyKind::HmarlCollective);
  CHECK(back.seed == 99);
  CHECK(back.scenario.red.variant == "Aggressive");
}

TEST_CASE("output lock excludes a second run") {
  TempDir t;
  {
    OutputLock first(t.path);
    CHECK(fs::exists(t.path / ".cyberdef.lock"));
    CHECK_THROWS_AS(OutputLock(t.path), std::runtime_error);
  }
  CHECK_FALSE(fs::exists(t.path / ".cyberdef.lock"));
  CHECK_NOTHROW(OutputLock(t.path));
}

TEST_CASE("train writes checkpoints, curves and a manifest, reproducibly") {
  TempDir t;
  ExperimentConfig cfg = parse_experiment(kTiny);
  cfg.strategy = StrategyKind::MarlDecentralized;
  std::ostringstream log;
  cmd_train(cfg, t.path / "a", log);
  cmd_train(cfg, t.path / "b", log);
  CHECK(slurp(t.path / "a" / "curve.csv") == slurp(t.path / "b" / "curve.csv"));
  CHECK(fs::exists(t.path / "a" / "checkpoints" / "train_0001.ckpt"));
  CHECK(fs::exists(t.path / "a" / "checkpoints" / "train_0002.ckpt"));
  CHECK(fs::exists(t.path / "a" / "final.ckpt"));
  const auto m = manifest(t.path / "a");
  CHECK(m["commit"].get<std::string>() == build_commit());
  CHECK(m["strategy"] == "MARL-Decentralized");
  CHECK(m["seeds"]["train"] == 1);
  CHECK(m["training"]["iterations"] == 2);
  CHECK(log.str().find("# effective config") != std::string::npos);

  // The stored config alone reruns the experiment.
  ExperimentConfig again = load_experiment((t.path / "a" / "config.yaml").string());
  cmd_train(again, t.path / "c", log);
  CHECK(slurp(t.path / "a" / "curve.csv") == slurp(t.path / "c" / "curve.csv"));
}

TEST_CASE("full-size profile hyperparameters land in the manifest") {
  TempDir t;
  ExperimentConfig cfg = parse_experiment(kTiny);
  cfg.training_overrides.clear();
  cfg.set_profile("paper");
  cfg.train.iterations = 0;
  std::ostringstream log;
  cmd_train(cfg, t.path, log);
  const auto tr = manifest(t.path)["training"];
  CHECK(tr["learning_rate"].get<double>() == doctest::Approx(5e-5));
  CHECK(tr["gamma"].get<double>() == doctest::Approx(0.99));
  CHECK(tr["gae_lambda"].get<double>() == doctest::Approx(0.95));
  CHECK(tr["clip_epsilon"].get<double>() == doctest::Approx(0.2));
  CHECK(tr["buffer_capacity"] == 1000000);
  CHECK(tr["minibatch"] == 32768);
  CHECK(tr["sgd_iters"] == 30);
  CHECK(tr["hidden"] == 256);
}

TEST_CASE("meta training writes both curriculum stages") {
  TempDir t;
  ExperimentConfig cfg = parse_experiment(kTiny);
  cfg.strategy = StrategyKind::HmarlMeta;
  std::ostringstream log;
  cmd_train(cfg, t.path, log);
  CHECK(fs::exists(t.path / "curve_subpolicies.csv"));
  CHECK(fs::exists(t.path / "curve_master.csv"));
  CHECK(manifest(t.path)["curves"].size() == 2);
}

TEST_CASE("eval leaves the checkpoint untouched and sweeps variants") {
  TempDir t;
  ExperimentConfig cfg = parse_experiment(kTiny);
  std::ostringstream log;
  cmd_train(cfg, t.path / "run", log);
  const std::string ckpt = (t.path / "run" / "final.ckpt").string();
  const std::string before = file_digest(ckpt);
  cfg.checkpoint = ckpt;
  cfg.sweep = {"Default", "Aggressive", "Stealthy"};
  cmd_eval(cfg, t.path / "eval", log);
  CHECK(file_digest(ckpt) == before);
  const std::string csv = slurp(t.path / "eval" / "metrics.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("HMARL-Expert vs Stealthy") != std::string::npos);
  CHECK(slurp(t.path / "eval" / "metrics.txt").find("+/-") != std::string::npos);
  CHECK(manifest(t.path / "eval")["checkpoint"]["digest"] == before);
  CHECK(fs::exists(t.path / "eval" / "traces_Aggressive.jsonl"));

  std::ostringstream out;
  cmd_report({(t.path / "eval").string()}, t.path / "report", out);
  const std::string report = slurp(t.path / "report" / "report.csv");
  CHECK(std::count(report.begin(), report.end(), '\n') == 4);
}

TEST_CASE("eval of a checkpoint from another layout names the dimensions") {
  TempDir t;
  ExperimentConfig cfg = parse_experiment(kTiny);
  std::ostringstream log;
  cmd_train(cfg, t.path / "run", log);
  ExperimentConfig other = parse_experiment(std::string(kTiny) + "topology: {hosts_per_subnet: [7, 7]}\n");
  other.checkpoint = (t.path / "run" / "final.ckpt").string();
  try {
    cmd_eval(other, t.path / "eval", log);
    FAIL("expected a load error");
  } catch (const LoadError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("expected") != std::string::npos);
    CHECK(msg.find("checkpoint has") != std::string::npos);
  }
}

TEST_CASE("ablation emits four labeled curves on shared seeds") {
  TempDir t;
  ExperimentConfig cfg = parse_experiment(kTiny);
  cfg.strategy = StrategyKind::MarlDecentralized;
  std::ostringstream log;
  cmd_ablate_obs(cfg, t.path, log);
  const auto m = manifest(t.path);
  REQUIRE(m["arms"].size() == 4);
  std::set<std::string> labels;
  for (const auto& arm : m["arms"]) {
    labels.insert(arm["label"].get<std::string>());
    CHECK(arm["train_seed"] == m["arms"][0]["train_seed"]);
    CHECK(arm["eval_seed"] == m["arms"][0]["eval_seed"]);
  }
  CHECK(labels == std::set<std::string>{"basic", "+history", "+ioc", "+decoys"});
  const std::string curves = slurp(t.path / "ablation_curves.csv");
  CHECK(std::count(curves.begin(), curves.end(), '\n') == 1 + 4 * 2);
}

TEST_CASE("transfer records the source digest and survives a zero budget") {
  TempDir t;
  ExperimentConfig cfg = parse_experiment(kTiny);
  std::ostringstream log;
  cmd_train(cfg, t.path / "source", log);
  ExperimentConfig tc = cfg;
  tc.set_red("Aggressive");
  tc.pretrained = (t.path / "source" / "final.ckpt").string();
  tc.fine_tune_iterations = 0;
  cmd_transfer(tc, t.path / "transfer", log);
  const auto m = manifest(t.path / "transfer");
  CHECK(m["source_checkpoint"]["digest"] == file_digest(tc.pretrained));
  CHECK(m["source_checkpoint"]["red"] == "Default");
  CHECK(m["fine_tune_iterations"] == 0);
  CHECK(fs::exists(t.path / "transfer" / "curve_scratch.csv"));
  CHECK(fs::exists(t.path / "transfer" / "curve_finetune.csv"));
  CHECK(slurp(t.path / "transfer" / "metrics.csv").find("HMARL-Meta with fine-tuning") != std::string::npos);

  tc.pretrained = (t.path / "missing.ckpt").string();
  try {
    cmd_transfer(tc, t.path / "transfer2", log);
    FAIL("expected a load error");
  } catch (const LoadError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("missing.ckpt") != std::string::npos);
    CHECK(msg.find("Investigate") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(t.path / "transfer2"));
}

TEST_CASE("cli exit codes") {
  TempDir t;
  const std::string out = (t.path / "x").string();
  CHECK(run_cli("") == 2);
  CHECK(run_cli("train --strategy Bogus --out " + out) == 2);
  CHECK(run_cli("train --red Nope --out " + out) == 2);
  CHECK(run_cli("train --profile huge --out " + out) == 2);
  CHECK(run_cli("train --episodes 0 --out " + out) == 2);
  CHECK_FALSE(fs::exists(t.path / "x"));
  CHECK(run_cli("eval --checkpoint " + (t.path / "none.ckpt").string() + " --out " + out) == 3);
  CHECK(run_cli("report " + (t.path / "nothing.jsonl").string()) == 3);
  fs::create_directories(t.path / "busy");
  std::ofstream(t.path / "busy" / ".cyberdef.lock") << "1\n";
  CHECK(run_cli("train --profile quick --iterations 0 --out " + (t.path / "busy").string()) == 3);
}
