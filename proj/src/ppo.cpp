#include "cyberdef/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cyberdef/errors.hpp"

namespace cyberdef {

TrainConfig TrainConfig::paper() { return TrainConfig{}; }

TrainConfig TrainConfig::desk() {
  TrainConfig c;
  c.profile = "desk";
  c.learning_rate = 3e-4;
  c.buffer_capacity = 16'384;
  c.minibatch = 1'024;
  c.sgd_iters = 10;
  c.hidden = 64;
  c.iterations = 60;
  c.reward_scale = 0.1;
  return c;
}

TrainConfig TrainConfig::quick() {
  TrainConfig c = desk();
  c.profile = "quick";
  c.buffer_capacity = 4'096;
  c.minibatch = 512;
  c.sgd_iters = 6;
  c.iterations = 40;
  return c;
}

void TrainConfig::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_unit(gamma)) throw ConfigError("gamma must be in (0,1]");
  if (!in_unit(gae_lambda)) throw ConfigError("gae_lambda must be in (0,1]");
  if (clip_epsilon < 0.0 || clip_epsilon > 1.0) throw ConfigError("clip_epsilon must be in [0,1]");
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (minibatch == 0 || buffer_capacity == 0) throw ConfigError("buffer and minibatch must be positive");
  if (sgd_iters < 1) throw ConfigError("sgd_iters must be >= 1");
  if (hidden < 1) throw ConfigError("hidden width must be >= 1");
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

TrainConfig train_profile(const std::string& name) {
  if (name == "paper") return TrainConfig::paper();
  if (name == "desk") return TrainConfig::desk();
  if (name == "quick") return TrainConfig::quick();
  throw ConfigError("unknown training profile '" + name + "' (expected paper, desk or quick)");
}

Vec masked_softmax(const Vec& logits, std::span<const std::uint8_t> mask) {
  if (static_cast<Eigen::Index>(mask.size()) != logits.size())
    throw ShapeError("masked_softmax: mask length " + std::to_string(mask.size()) +
                     " does not match " + std::to_string(logits.size()) + " logits");
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) hi = std::max(hi, logits[static_cast<Eigen::Index>(i)]);
  if (!std::isfinite(hi)) {
    if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }))
      throw ContractError("masked_softmax: no action is allowed");
    throw NumericalError("masked_softmax: non-finite logits");
  }
  Vec p = Vec::Zero(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const auto k = static_cast<Eigen::Index>(i);
    p[k] = std::exp(logits[k] - hi);
    z += p[k];
  }
  return p / z;
}

ActionSample sample_masked(const Vec& logits, std::span<const std::uint8_t> mask, Rng& rng) {
  const Vec p = masked_softmax(logits, mask);
  const double u = rng.uniform();
  double acc = 0.0;
  int last = -1;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    last = static_cast<int>(i);
    acc += p[i];
    if (u < acc) return {last, std::log(p[i])};
  }
  return {last, std::log(p[last])};
}

ActionSample greedy_masked(const Vec& logits, std::span<const std::uint8_t> mask) {
  const Vec p = masked_softmax(logits, mask);
  Eigen::Index best = 0;
  double bp = -1.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (mask[static_cast<std::size_t>(i)] && p[i] > bp) {
      bp = p[i];
      best = i;
    }
  return {static_cast<int>(best), std::log(bp)};
}

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const std::uint8_t> dones, double gamma, double lambda,
                      double bootstrap) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n)
    throw ShapeError("compute_gae: rewards, values and dones must have equal length");
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_value = bootstrap;
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double cont = dones[k] ? 0.0 : 1.0;
    const double delta = rewards[k] + gamma * next_value * cont - values[k];
    running = delta + gamma * lambda * cont * running;
    out.advantages[k] = running;
    out.returns[k] = running + values[k];
    next_value = values[k];
  }
  return out;
}

Learner Learner::make(std::vector<int> sizes, OptimizerKind kind, Rng& rng, double output_gain) {
  Learner l;
  l.net = PolicyNet(std::move(sizes));
  l.net.initialize(rng, output_gain);
  l.opt = Optimizer(kind, l.net.parameter_count());
  return l;
}

Learner make_actor(int inputs, int actions, const TrainConfig& cfg, Rng& rng) {
  return Learner::make({inputs, cfg.hidden, cfg.hidden, actions}, cfg.optimizer, rng, 0.01);
}

Learner make_critic(int inputs, const TrainConfig& cfg, Rng& rng) {
  return Learner::make({inputs, cfg.hidden, cfg.hidden, 1}, cfg.optimizer, rng, 1.0);
}

double surrogate_grad(double ratio, double advantage, double epsilon) {
  if (advantage >= 0.0 && ratio > 1.0 + epsilon) return 0.0;
  if (advantage < 0.0 && ratio < 1.0 - epsilon) return 0.0;
  return ratio * advantage;
}

namespace {

Mat stack_inputs(std::span<const Transition* const> batch, bool critic, int rows) {
  Mat x(rows, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto& v = critic ? batch[j]->critic_input : batch[j]->actor_input;
    if (static_cast<int>(v.size()) != rows)
      throw ShapeError("ppo: input length " + std::to_string(v.size()) + " does not match network input " +
                       std::to_string(rows));
    x.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Vec>(v.data(), rows);
  }
  return x;
}

}  // namespace

LossValue ppo_loss(const PolicyNet& actor, const PolicyNet* critic,
                   std::span<const Transition* const> batch, const TrainConfig& cfg,
                   Vec* actor_grad, Vec* critic_grad) {
  LossValue loss;
  const auto b = static_cast<double>(batch.size());
  if (batch.empty()) return loss;

  PolicyNet::Cache cache;
  const Mat logits = actor.forward_batch(stack_inputs(batch, false, actor.input_size()), &cache);
  Mat dlogits = Mat::Zero(logits.rows(), logits.cols());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Transition& t = *batch[j];
    const auto col = static_cast<Eigen::Index>(j);
    const Vec p = masked_softmax(logits.col(col), t.mask);
    double entropy = 0.0;
    Vec logp = Vec::Zero(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (t.mask[static_cast<std::size_t>(i)] && p[i] > 0.0) {
        logp[i] = std::log(p[i]);
        entropy -= p[i] * logp[i];
      }
    const double lp = logp[t.action];
    const double ratio = std::exp(lp - t.logprob);
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
    loss.policy -= std::min(ratio * t.advantage, clipped * t.advantage) / b;
    loss.policy -= cfg.entropy_coef * entropy / b;
    loss.entropy += entropy / b;
    loss.kl += (t.logprob - lp) / b;
    if (std::abs(ratio - 1.0) > cfg.clip_epsilon) loss.clipped += 1.0 / b;
    if (actor_grad) {
      const double g = surrogate_grad(ratio, t.advantage, cfg.clip_epsilon);
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!t.mask[static_cast<std::size_t>(i)]) continue;
        const double dlogp = (i == t.action ? 1.0 : 0.0) - p[i];
        const double dent = p[i] > 0.0 ? -p[i] * (logp[i] + entropy) : 0.0;
        dlogits(i, col) = (-g * dlogp - cfg.entropy_coef * dent) / b;
      }
    }
  }
  if (actor_grad) actor.backward(cache, dlogits, *actor_grad);

  if (critic) {
    PolicyNet::Cache ccache;
    const Mat values = critic->forward_batch(stack_inputs(batch, true, critic->input_size()), &ccache);
    Mat dv(1, values.cols());
    for (std::size_t j = 0; j < batch.size(); ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      const double err = values(0, col) - batch[j]->ret;
      loss.value += cfg.value_coef * err * err / b;
      dv(0, col) = 2.0 * cfg.value_coef * err / b;
    }
    if (critic_grad) critic->backward(ccache, dv, *critic_grad);
  }
  return loss;
}

namespace {

void check_finite(const LossValue& l, int epoch, int minibatch) {
  if (std::isfinite(l.policy) && std::isfinite(l.value) && std::isfinite(l.entropy)) return;
  std::ostringstream os;
  os << "ppo_update: non-finite loss at epoch " << epoch << ", minibatch " << minibatch
     << " (policy=" << l.policy << ", value=" << l.value << ", entropy=" << l.entropy
     << "); parameters left unchanged for this step";
  throw NumericalError(os.str());
}

std::vector<std::vector<const Transition*>> shuffled_batches(const std::vector<const Transition*>& all,
                                                             std::size_t minibatch, Rng& rng) {
  std::vector<const Transition*> order = all;
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  const std::size_t mb = std::min(minibatch, order.size());
  std::vector<std::vector<const Transition*>> out;
  for (std::size_t s = 0; s < order.size(); s += mb)
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(s),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), s + mb)));
  return out;
}

}  // namespace

UpdateStats ppo_update(Learner& actor, Learner* critic, ReplayMemory& memory,
                       const TrainConfig& cfg, Rng& rng) {
  if (memory.empty()) throw ContractError("ppo_update: replay memory is empty");
  auto& items = memory.items();
  if (cfg.normalize_advantages && items.size() > 1) {
    double mean = 0.0;
    for (const auto& t : items) mean += t.advantage;
    mean /= static_cast<double>(items.size());
    double var = 0.0;
    for (const auto& t : items) var += (t.advantage - mean) * (t.advantage - mean);
    const double sd = std::sqrt(var / static_cast<double>(items.size()));
    for (auto& t : items) t.advantage = (t.advantage - mean) / (sd + 1e-8);
  }
  std::vector<const Transition*> all;
  all.reserve(items.size());
  for (const auto& t : items) all.push_back(&t);

  UpdateStats stats;
  stats.samples = items.size();
  Vec ga, gc;
  for (int epoch = 0; epoch < cfg.sgd_iters; ++epoch) {
    int index = 0;
    for (const auto& batch : shuffled_batches(all, cfg.minibatch, rng)) {
      ga = Vec::Zero(actor.net.parameters().size());
      if (critic) gc = Vec::Zero(critic->net.parameters().size());
      const LossValue l = ppo_loss(actor.net, critic ? &critic->net : nullptr, batch, cfg, &ga,
                                   critic ? &gc : nullptr);
      check_finite(l, epoch, index);
      if (!ga.allFinite() || (critic && !gc.allFinite()))
        throw NumericalError("ppo_update: non-finite gradient at epoch " + std::to_string(epoch));
      clip_grad_norm(ga, cfg.max_grad_norm);
      actor.opt.step(actor.net.parameters(), ga, cfg.learning_rate);
      if (critic) {
        clip_grad_norm(gc, cfg.max_grad_norm);
        critic->opt.step(critic->net.parameters(), gc, cfg.learning_rate);
      }
      stats.policy_loss += l.policy;
      stats.value_loss += l.value;
      stats.entropy += l.entropy;
      stats.approx_kl += l.kl;
      stats.clip_fraction += l.clipped;
      ++stats.minibatches;
      ++index;
    }
  }
  if (stats.minibatches > 0) {
    const double m = stats.minibatches;
    stats.policy_loss /= m;
    stats.value_loss /= m;
    stats.entropy /= m;
    stats.approx_kl /= m;
    stats.clip_fraction /= m;
  }
  memory.clear();
  return stats;
}

double value_update(Learner& critic, std::span<const Transition* const> samples,
                    const TrainConfig& cfg, Rng& rng) {
  if (samples.empty()) throw ContractError("value_update: no samples");
  std::vector<const Transition*> all(samples.begin(), samples.end());
  double total = 0.0;
  int count = 0;
  Vec gc;
  for (int epoch = 0; epoch < cfg.sgd_iters; ++epoch) {
    for (const auto& batch : shuffled_batches(all, cfg.minibatch, rng)) {
      gc = Vec::Zero(critic.net.parameters().size());
      Mat x = stack_inputs(batch, true, critic.net.input_size());
      PolicyNet::Cache cache;
      const Mat v = critic.net.forward_batch(x, &cache);
      Mat dv(1, v.cols());
      double loss = 0.0;
      const auto b = static_cast<double>(batch.size());
      for (std::size_t j = 0; j < batch.size(); ++j) {
        const double err = v(0, static_cast<Eigen::Index>(j)) - batch[j]->ret;
        loss += cfg.value_coef * err * err / b;
        dv(0, static_cast<Eigen::Index>(j)) = 2.0 * cfg.value_coef * err / b;
      }
      if (!std::isfinite(loss)) throw NumericalError("value_update: non-finite value loss");
      critic.net.backward(cache, dv, gc);
      clip_grad_norm(gc, cfg.max_grad_norm);
      critic.opt.step(critic.net.parameters(), gc, cfg.learning_rate);
      total += loss;
      ++count;
    }
  }
  return total / count;
}

}  // namespace cyberdef
