#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cyberdef/nn.hpp"
#include "cyberdef/rng.hpp"

namespace cyberdef {

struct TrainConfig {
  std::string profile = "paper";
  double learning_rate = 5e-5;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_epsilon = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  bool normalize_advantages = true;
  OptimizerKind optimizer = OptimizerKind::Adam;
  std::size_t buffer_capacity = 1'000'000;
  std::size_t minibatch = 32'768;
  int sgd_iters = 30;
  int hidden = 256;
  int iterations = 200;
  /// Rewards are multiplied by this before advantage estimation.
  double reward_scale = 1.0;
  int workers = 1;

  static TrainConfig paper();
  static TrainConfig desk();
  /// Reduced budget used by the ordering checks.
  static TrainConfig quick();
  void validate() const;
};

/// "paper", "desk" or "quick"; throws ConfigError otherwise.
TrainConfig train_profile(const std::string& name);

/// Softmax restricted to allowed entries; disallowed entries get probability 0.
/// Throws ContractError when nothing is allowed.
Vec masked_softmax(const Vec& logits, std::span<const std::uint8_t> mask);

struct ActionSample {
  int action = 0;
  double logprob = 0.0;
};
ActionSample sample_masked(const Vec& logits, std::span<const std::uint8_t> mask, Rng& rng);
ActionSample greedy_masked(const Vec& logits, std::span<const std::uint8_t> mask);

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};
/// `dones[t]` marks the last step of an episode. `bootstrap` is the value
/// after the final step when it is not terminal.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const std::uint8_t> dones, double gamma, double lambda,
                      double bootstrap = 0.0);

struct Transition {
  std::vector<double> actor_input;
  std::vector<double> critic_input;
  std::vector<std::uint8_t> mask;
  int action = 0;
  double logprob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;
  double advantage = 0.0;
  double ret = 0.0;
};

class ReplayMemory {
 public:
  void push(Transition t) { items_.push_back(std::move(t)); }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  void clear() { items_.clear(); }
  std::vector<Transition>& items() { return items_; }
  const std::vector<Transition>& items() const { return items_; }

 private:
  std::vector<Transition> items_;
};

/// A network plus its optimizer state.
struct Learner {
  PolicyNet net;
  Optimizer opt;

  static Learner make(std::vector<int> sizes, OptimizerKind kind, Rng& rng, double output_gain);
};

Learner make_actor(int inputs, int actions, const TrainConfig& cfg, Rng& rng);
Learner make_critic(int inputs, const TrainConfig& cfg, Rng& rng);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  std::size_t samples = 0;
  int minibatches = 0;
};

/// d(surrogate)/d(log-prob) for one sample under the clipped objective.
double surrogate_grad(double ratio, double advantage, double epsilon);

struct LossValue {
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  double kl = 0.0;
  double clipped = 0.0;
  double total() const { return policy + value; }
};
/// Minibatch loss and gradients (accumulated into the given vectors when not
/// null). Advantages are taken as stored in the transitions.
LossValue ppo_loss(const PolicyNet& actor, const PolicyNet* critic,
                   std::span<const Transition* const> batch, const TrainConfig& cfg,
                   Vec* actor_grad, Vec* critic_grad);

/// Clipped PPO over `memory` for cfg.sgd_iters epochs of shuffled minibatches.
/// `critic` may be null when the value function is trained elsewhere.
/// Throws ContractError on an empty memory, NumericalError on a non-finite
/// loss (before touching parameters). Clears the memory.
UpdateStats ppo_update(Learner& actor, Learner* critic, ReplayMemory& memory,
                       const TrainConfig& cfg, Rng& rng);

/// Value regression only; used by the shared centralized critic.
double value_update(Learner& critic, std::span<const Transition* const> samples,
                    const TrainConfig& cfg, Rng& rng);

}  // namespace cyberdef
