#pragma once

// Fully connected rectifier network with a linear head, trained on the
// squared TD error of the taken action only.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pricelab/errors.hpp"
#include "pricelab/rng.hpp"

namespace pricelab {

template <typename Scalar>
struct MlpParameters {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::vector<Matrix> weights;  // layer l: dims[l+1] x dims[l]
  std::vector<Vector> biases;

  void set_zero() {
    for (auto& w : weights) w.setZero();
    for (auto& b : biases) b.setZero();
  }
  double squared_norm() const {
    double total = 0.0;
    for (const auto& w : weights) total += static_cast<double>(w.squaredNorm());
    for (const auto& b : biases) total += static_cast<double>(b.squaredNorm());
    return total;
  }
  void scale(Scalar factor) {
    for (auto& w : weights) w *= factor;
    for (auto& b : biases) b *= factor;
  }
  bool operator==(const MlpParameters& other) const {
    if (weights.size() != other.weights.size()) return false;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      if (weights[l].rows() != other.weights[l].rows() ||
          weights[l].cols() != other.weights[l].cols() ||
          weights[l] != other.weights[l] || biases[l] != other.biases[l]) {
        return false;
      }
    }
    return true;
  }
};

template <typename Scalar>
class Mlp {
 public:
  using Params = MlpParameters<Scalar>;
  using Matrix = typename Params::Matrix;
  using Vector = typename Params::Vector;

  Mlp() = default;

  /// Zero-initialized network with layer widths `dims` (input first).
  explicit Mlp(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw InvalidInput("an MLP needs at least two layer widths");
    for (int d : dims_) {
      if (d < 1) throw InvalidInput("layer widths must be positive");
    }
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      params_.weights.push_back(Matrix::Zero(dims_[l + 1], dims_[l]));
      params_.biases.push_back(Vector::Zero(dims_[l + 1]));
    }
  }

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static Mlp glorot(std::vector<int> dims, Rng& rng) {
    Mlp net(std::move(dims));
    for (auto& w : net.params_.weights) {
      const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
          w(r, c) = static_cast<Scalar>((2.0 * rng.uniform() - 1.0) * limit);
        }
      }
    }
    return net;
  }

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  std::size_t layer_count() const { return params_.weights.size(); }
  std::size_t parameter_count() const {
    std::size_t total = 0;
    for (std::size_t l = 0; l < layer_count(); ++l) {
      total += static_cast<std::size_t>(params_.weights[l].size() + params_.biases[l].size());
    }
    return total;
  }

  Params& parameters() { return params_; }
  const Params& parameters() const { return params_; }

  /// Q-values for one observation.
  std::vector<double> forward(std::span<const double> obs) const {
    if (static_cast<int>(obs.size()) != input_dim()) {
      throw InvalidInput("observation length does not match network input");
    }
    Matrix x(input_dim(), 1);
    for (int i = 0; i < input_dim(); ++i) x(i, 0) = static_cast<Scalar>(obs[i]);
    const Matrix out = forward_batch(x);
    std::vector<double> q(static_cast<std::size_t>(output_dim()));
    for (int a = 0; a < output_dim(); ++a) q[a] = static_cast<double>(out(a, 0));
    return q;
  }

  /// Columns of `inputs` are observations; returns one column of Q per input.
  Matrix forward_batch(const Matrix& inputs) const {
    Matrix h = inputs;
    for (std::size_t l = 0; l < layer_count(); ++l) {
      Matrix z = params_.weights[l] * h;
      z.colwise() += params_.biases[l];
      if (l + 1 < layer_count()) z = z.cwiseMax(Scalar(0));
      h = std::move(z);
    }
    return h;
  }

  /// Mean over the batch of (Q(x_j, a_j) - y_j)^2; writes d loss / d params.
  double loss_and_gradients(const Matrix& inputs, std::span<const int> actions,
                            std::span<const double> targets, Params& grads) const {
    const Eigen::Index batch = inputs.cols();
    if (batch == 0) throw InvalidInput("empty minibatch");
    if (static_cast<std::size_t>(batch) != actions.size() ||
        actions.size() != targets.size()) {
      throw InvalidInput("minibatch component sizes differ");
    }
    // Keep every pre-activation for the backward pass.
    std::vector<Matrix> activations;
    activations.reserve(layer_count() + 1);
    activations.push_back(inputs);
    std::vector<Matrix> pre;
    pre.reserve(layer_count());
    for (std::size_t l = 0; l < layer_count(); ++l) {
      Matrix z = params_.weights[l] * activations.back();
      z.colwise() += params_.biases[l];
      pre.push_back(z);
      if (l + 1 < layer_count()) {
        activations.push_back(z.cwiseMax(Scalar(0)));
      } else {
        activations.push_back(std::move(z));
      }
    }
    const Matrix& q = activations.back();
    Matrix delta = Matrix::Zero(q.rows(), batch);
    double loss = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch);
    for (Eigen::Index j = 0; j < batch; ++j) {
      const int a = actions[static_cast<std::size_t>(j)];
      if (a < 0 || a >= output_dim()) throw InvalidInput("action index out of range");
      const double err = static_cast<double>(q(a, j)) - targets[static_cast<std::size_t>(j)];
      loss += err * err;
      delta(a, j) = static_cast<Scalar>(2.0 * err * inv_batch);
    }
    loss *= inv_batch;

    if (grads.weights.size() != layer_count()) grads = params_;
    for (std::size_t l = layer_count(); l-- > 0;) {
      grads.weights[l].noalias() = delta * activations[l].transpose();
      grads.biases[l] = delta.rowwise().sum();
      if (l > 0) {
        Matrix back = params_.weights[l].transpose() * delta;
        delta = back.cwiseProduct((pre[l - 1].array() > Scalar(0)).template cast<Scalar>().matrix());
      }
    }
    return loss;
  }

  /// Parameters flattened layer by layer: row-major weights (output neuron
  /// major), then biases.
  std::vector<double> flatten() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (std::size_t l = 0; l < layer_count(); ++l) {
      const auto& w = params_.weights[l];
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(static_cast<double>(w(r, c)));
      }
      const auto& b = params_.biases[l];
      for (Eigen::Index r = 0; r < b.size(); ++r) flat.push_back(static_cast<double>(b(r)));
    }
    return flat;
  }

  void unflatten(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
      throw InvalidInput("flat parameter vector has the wrong length");
    }
    std::size_t k = 0;
    for (std::size_t l = 0; l < layer_count(); ++l) {
      auto& w = params_.weights[l];
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = static_cast<Scalar>(flat[k++]);
      }
      auto& b = params_.biases[l];
      for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = static_cast<Scalar>(flat[k++]);
    }
  }

  bool all_finite() const {
    for (std::size_t l = 0; l < layer_count(); ++l) {
      if (!params_.weights[l].allFinite() || !params_.biases[l].allFinite()) return false;
    }
    return true;
  }

 private:
  std::vector<int> dims_;
  Params params_;
};

/// Adam with bias-corrected moments.
template <typename Scalar>
class Adam {
 public:
  using Params = MlpParameters<Scalar>;

  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  Adam() = default;
  explicit Adam(const Params& shape) : first_(shape), second_(shape) {
    first_.set_zero();
    second_.set_zero();
  }

  std::int64_t steps() const { return steps_; }
  const Params& first_moment() const { return first_; }
  const Params& second_moment() const { return second_; }

  void step(Params& params, const Params& grads, double lr) {
    if (first_.weights.size() != params.weights.size()) *this = Adam(params);
    ++steps_;
    const double correction1 = 1.0 - std::pow(beta1, static_cast<double>(steps_));
    const double correction2 = 1.0 - std::pow(beta2, static_cast<double>(steps_));
    auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
      m = Scalar(beta1) * m + Scalar(1.0 - beta1) * g;
      v = Scalar(beta2) * v + Scalar(1.0 - beta2) * g.cwiseProduct(g);
      theta.array() -= Scalar(lr) * (m.array() / Scalar(correction1)) /
                       ((v.array() / Scalar(correction2)).sqrt() + Scalar(epsilon));
    };
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
      update(params.weights[l], grads.weights[l], first_.weights[l], second_.weights[l]);
      update(params.biases[l], grads.biases[l], first_.biases[l], second_.biases[l]);
    }
  }

 private:
  Params first_;
  Params second_;
  std::int64_t steps_ = 0;
};

}  // namespace pricelab
