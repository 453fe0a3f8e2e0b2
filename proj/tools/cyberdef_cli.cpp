#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cyberdef/errors.hpp"
#include "cyberdef/experiment.hpp"
#include "cyberdef/red_machine.hpp"

namespace {

constexpr int kUsage = 2;
constexpr int kRuntime = 3;

struct Flags {
  std::string config;
  std::optional<std::string> strategy, red, profile, checkpoint, pretrained;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes, workers, iterations, fine_tune_iterations;
  std::vector<std::string> sweep;
  bool greedy = false;
  std::string out;
  std::vector<std::string> inputs;
};

void add_common(CLI::App* cmd, Flags& f, bool training) {
  cmd->add_option("--config", f.config, "Experiment YAML (scenario, experiment and training sections)");
  cmd->add_option("--strategy", f.strategy,
                  "MARL-Decentralized, MARL-CentralizedCritic, HMARL-Expert, HMARL-Meta or HMARL-Collective");
  cmd->add_option("--red", f.red, "Default, Aggressive, Stealthy, Impact or ExternalScan");
  cmd->add_option("--profile", f.profile, "Training profile: paper, desk or quick");
  cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_option("--out", f.out, "Output directory")->required();
  cmd->add_option("--episodes", f.episodes, "Evaluation episodes (default 100)");
  cmd->add_option("--workers", f.workers, "Rollout worker threads");
  if (training) cmd->add_option("--iterations", f.iterations, "Training iterations per stage");
}

cyberdef::ExperimentConfig resolve(const Flags& f) {
  cyberdef::ExperimentConfig cfg =
      f.config.empty() ? cyberdef::parse_experiment("") : cyberdef::load_experiment(f.config);
  if (f.profile) cfg.set_profile(*f.profile);
  if (f.strategy) cfg.strategy = cyberdef::parse_strategy(*f.strategy);
  if (f.red) cfg.set_red(*f.red);
  if (f.seed) cfg.seed = *f.seed;
  if (f.episodes) {
    if (*f.episodes < 1) throw cyberdef::ConfigError("--episodes must be >= 1");
    cfg.episodes = *f.episodes;
  }
  if (f.workers) {
    if (*f.workers < 1) throw cyberdef::ConfigError("--workers must be >= 1");
    cfg.train.workers = *f.workers;
  }
  if (f.iterations) {
    if (*f.iterations < 0) throw cyberdef::ConfigError("--iterations must be >= 0");
    cfg.train.iterations = *f.iterations;
  }
  if (f.fine_tune_iterations) {
    if (*f.fine_tune_iterations < 0) throw cyberdef::ConfigError("--fine-tune-iterations must be >= 0");
    cfg.fine_tune_iterations = *f.fine_tune_iterations;
  }
  if (f.checkpoint) cfg.checkpoint = *f.checkpoint;
  if (f.pretrained) cfg.pretrained = *f.pretrained;
  if (f.greedy) cfg.greedy = true;
  if (!f.sweep.empty()) {
    for (const auto& v : f.sweep)
      if (!cyberdef::parse_red_variant(v)) throw cyberdef::ConfigError("--sweep: unknown red variant '" + v + "'");
    cfg.sweep = f.sweep;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent cyber defense experiments"};
  app.require_subcommand(1);
  Flags f;

  auto* train = app.add_subcommand("train", "Train a strategy and write checkpoints and curves");
  add_common(train, f, true);

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint and write traces and metrics");
  add_common(eval, f, false);
  eval->add_option("--checkpoint", f.checkpoint, "Checkpoint to evaluate")->required();
  eval->add_flag("--greedy", f.greedy, "Pick the most likely action instead of sampling");
  eval->add_option("--sweep", f.sweep, "Evaluate against each listed red variant")->expected(1, -1);

  auto* ablate = app.add_subcommand("ablate-obs", "Train the four observation-space arms");
  add_common(ablate, f, true);

  auto* transfer = app.add_subcommand("transfer", "Fine-tune pretrained sub-policies and train a fresh master");
  add_common(transfer, f, true);
  transfer->add_option("--pretrained", f.pretrained, "HMARL-Expert checkpoint trained against another variant")
      ->required();
  transfer->add_option("--fine-tune-iterations", f.fine_tune_iterations,
                       "Fine-tuning budget (default 10% of --iterations)");

  auto* report = app.add_subcommand("report", "Summarize trace files or run directories");
  report->add_option("inputs", f.inputs, "Trace files or run directories")->required();
  report->add_option("--out", f.out, "Directory for report.csv and report.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  cyberdef::ExperimentConfig cfg;
  try {
    if (!report->parsed()) cfg = resolve(f);
  } catch (const cyberdef::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    const std::filesystem::path out(f.out);
    if (train->parsed()) cyberdef::cmd_train(cfg, out, std::cerr);
    if (eval->parsed()) cyberdef::cmd_eval(cfg, out, std::cout);
    if (ablate->parsed()) cyberdef::cmd_ablate_obs(cfg, out, std::cerr);
    if (transfer->parsed()) cyberdef::cmd_transfer(cfg, out, std::cerr);
    if (report->parsed()) cyberdef::cmd_report(f.inputs, out, std::cout);
  } catch (const cyberdef::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return 0;
}
