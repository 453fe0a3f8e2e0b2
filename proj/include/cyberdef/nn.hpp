#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cyberdef/rng.hpp"

namespace cyberdef {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Activation : std::uint8_t { Tanh, Relu };

/// Fully connected network with a linear output layer. Parameters live in one
/// flat vector: per layer, the weight matrix (column-major, out x in) followed
/// by the bias.
class PolicyNet {
 public:
  PolicyNet() = default;
  PolicyNet(std::vector<int> sizes, Activation act = Activation::Tanh);

  /// Xavier-uniform weights, zero biases; the output layer is scaled by
  /// `output_gain` (small for actor heads).
  void initialize(Rng& rng, double output_gain = 1.0);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int layer_count() const { return static_cast<int>(sizes_.size()) - 1; }
  const std::vector<int>& sizes() const { return sizes_; }
  Activation activation() const { return act_; }
  std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }

  Vec& parameters() { return params_; }
  const Vec& parameters() const { return params_; }

  /// Throws ShapeError on a length mismatch.
  Vec forward(std::span<const double> input) const;

  struct Cache {
    /// Post-activation outputs of every layer, inputs first.
    std::vector<Mat> activations;
  };
  /// Columns are samples.
  Mat forward_batch(const Mat& inputs, Cache* cache = nullptr) const;
  /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(outputs).
  void backward(const Cache& cache, const Mat& output_grad, Vec& grad) const;

  bool finite() const { return params_.allFinite(); }
  /// Hex digest of the raw parameter bytes.
  std::string parameter_hash() const;

 private:
  std::size_t weight_offset(int layer) const { return offsets_[layer]; }
  std::size_t bias_offset(int layer) const {
    return offsets_[layer] + static_cast<std::size_t>(sizes_[layer + 1]) * sizes_[layer];
  }

  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  Activation act_ = Activation::Tanh;
  Vec params_;
};

enum class OptimizerKind : std::uint8_t { Adam, Sgd };

class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerKind kind, std::size_t size, double beta1 = 0.9,
            double beta2 = 0.999, double eps = 1e-8);

  void step(Vec& params, const Vec& grad, double lr);
  OptimizerKind kind() const { return kind_; }
  std::int64_t steps() const { return t_; }

 private:
  OptimizerKind kind_ = OptimizerKind::Adam;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::int64_t t_ = 0;
  Vec m_, v_;
};

/// Rescales `grad` in place so its norm is at most `max_norm` (no-op if <= 0).
double clip_grad_norm(Vec& grad, double max_norm);

/// Hash over several networks, for frozen-parameter audits.
std::string combined_hash(std::span<const PolicyNet* const> nets);

}  // namespace cyberdef
