#include "cyberdef/nn.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "cyberdef/errors.hpp"

namespace cyberdef {

namespace {

std::uint64_t fnv_bytes(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void activate(Mat& z, Activation act) {
  if (act == Activation::Tanh)
    z = z.array().tanh();
  else
    z = z.array().max(0.0);
}

// Derivative expressed through the activation output.
Mat activation_grad(const Mat& out, Activation act) {
  if (act == Activation::Tanh) return 1.0 - out.array().square();
  return (out.array() > 0.0).cast<double>();
}

}  // namespace

PolicyNet::PolicyNet(std::vector<int> sizes, Activation act)
    : sizes_(std::move(sizes)), act_(act) {
  if (sizes_.size() < 2) throw ShapeError("PolicyNet needs at least input and output sizes");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] <= 0 || sizes_[l + 1] <= 0) throw ShapeError("PolicyNet layer sizes must be positive");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_ = Vec::Zero(static_cast<Eigen::Index>(total));
}

void PolicyNet::initialize(Rng& rng, double output_gain) {
  for (int l = 0; l < layer_count(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const double bound = std::sqrt(6.0 / (in + out)) * (l + 1 == layer_count() ? output_gain : 1.0);
    double* w = params_.data() + weight_offset(l);
    for (int i = 0; i < in * out; ++i) w[i] = rng.uniform(-bound, bound);
    double* b = params_.data() + bias_offset(l);
    for (int i = 0; i < out; ++i) b[i] = 0.0;
  }
}

Vec PolicyNet::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_size())
    throw ShapeError("PolicyNet::forward: expected input of length " + std::to_string(input_size()) +
                     ", got " + std::to_string(input.size()));
  Mat x = Eigen::Map<const Mat>(input.data(), input_size(), 1);
  return forward_batch(x).col(0);
}

Mat PolicyNet::forward_batch(const Mat& inputs, Cache* cache) const {
  if (inputs.rows() != input_size())
    throw ShapeError("PolicyNet::forward_batch: expected " + std::to_string(input_size()) +
                     " rows, got " + std::to_string(inputs.rows()));
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(inputs);
  }
  Mat x = inputs;
  for (int l = 0; l < layer_count(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    Eigen::Map<const Mat> w(params_.data() + weight_offset(l), out, in);
    Eigen::Map<const Vec> b(params_.data() + bias_offset(l), out);
    Mat z = w * x;
    z.colwise() += b;
    if (l + 1 < layer_count()) activate(z, act_);
    x = std::move(z);
    if (cache) cache->activations.push_back(x);
  }
  return x;
}

void PolicyNet::backward(const Cache& cache, const Mat& output_grad, Vec& grad) const {
  if (grad.size() != params_.size()) grad = Vec::Zero(params_.size());
  Mat delta = output_grad;
  for (int l = layer_count() - 1; l >= 0; --l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const Mat& x = cache.activations[l];
    Eigen::Map<Mat> gw(grad.data() + weight_offset(l), out, in);
    Eigen::Map<Vec> gb(grad.data() + bias_offset(l), out);
    gw.noalias() += delta * x.transpose();
    gb += delta.rowwise().sum();
    if (l > 0) {
      Eigen::Map<const Mat> w(params_.data() + weight_offset(l), out, in);
      Mat back = w.transpose() * delta;
      delta = back.cwiseProduct(activation_grad(x, act_));
    }
  }
}

std::string PolicyNet::parameter_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int s : sizes_) h = fnv_bytes(&s, sizeof s, h);
  h = fnv_bytes(params_.data(), sizeof(double) * params_.size(), h);
  return hex64(h);
}

std::string combined_hash(std::span<const PolicyNet* const> nets) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto* n : nets) {
    const auto part = n->parameter_hash();
    h = fnv_bytes(part.data(), part.size(), h);
  }
  return hex64(h);
}

Optimizer::Optimizer(OptimizerKind kind, std::size_t size, double beta1, double beta2, double eps)
    : kind_(kind), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (kind_ == OptimizerKind::Adam) {
    m_ = Vec::Zero(static_cast<Eigen::Index>(size));
    v_ = Vec::Zero(static_cast<Eigen::Index>(size));
  }
}

void Optimizer::step(Vec& params, const Vec& grad, double lr) {
  if (grad.size() != params.size()) throw ShapeError("Optimizer::step: gradient size mismatch");
  ++t_;
  if (kind_ == OptimizerKind::Sgd) {
    params.noalias() -= lr * grad;
    return;
  }
  if (m_.size() != params.size()) {
    m_ = Vec::Zero(params.size());
    v_ = Vec::Zero(params.size());
  }
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

double clip_grad_norm(Vec& grad, double max_norm) {
  const double norm = grad.norm();
  if (max_norm > 0.0 && norm > max_norm) grad *= max_norm / norm;
  return norm;
}

}  // namespace cyberdef
