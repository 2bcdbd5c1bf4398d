#pragma once

// Deep Q-learning agent: online and target networks, Adam, uniform replay
// and exponentially decaying epsilon-greedy exploration.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pricelab/mlp.hpp"
#include "pricelab/replay_buffer.hpp"
#include "pricelab/rng.hpp"

namespace pricelab {

using Real = float;
using QNetwork = Mlp<Real>;

struct DqnConfig {
  int input_dim = 4;
  int hidden = 256;
  int hidden_layers = 2;
  int actions = 15;
  double gamma = 0.95;
  double beta = 0.00005;
  double lr = 0.01;
  std::size_t batch_size = 256;
  std::size_t buffer_capacity = 20000;
  std::int64_t target_update_period = 200;
  double grad_clip = 10.0;  // global L2 norm; <= 0 disables

  std::vector<int> layer_dims() const;
  void validate() const;
};

/// e^{-beta t}.
double epsilon(std::int64_t t, double beta);

/// Index of the largest value; ties go to the lowest index.
int argmax_lowest(std::span<const double> values);

/// Seeds for the agent's independent random streams.
struct AgentSeeds {
  std::uint64_t init = 0;
  std::uint64_t explore = 0;
  std::uint64_t replay = 0;
};

class DqnAgent {
 public:
  DqnAgent(const DqnConfig& config, const AgentSeeds& seeds);

  const DqnConfig& config() const { return config_; }
  const QNetwork& online() const { return online_; }
  const QNetwork& target() const { return target_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const Adam<Real>& optimizer() const { return adam_; }
  std::int64_t learn_steps() const { return learn_steps_; }

  std::vector<double> q_values(std::span<const double> obs) const;

  /// Random index when u < epsilon(t), else greedy on the online network.
  int select_action(std::span<const double> obs, std::int64_t t, double u,
                    Rng& tie_rng) const;
  /// select_action driven by the agent's own exploration stream.
  int act(std::span<const double> obs, std::int64_t t);
  int greedy_action(std::span<const double> obs) const;

  void remember(Transition transition) { buffer_.push(std::move(transition)); }

  /// One TD step on a sampled minibatch; nullopt while the buffer holds
  /// fewer than batch_size transitions. Returns the minibatch loss.
  std::optional<double> learn();

  /// Replaces both networks, e.g. from a checkpoint. Clears the optimizer.
  void load_weights(const QNetwork& network);

 private:
  DqnConfig config_;
  QNetwork online_;
  QNetwork target_;
  Adam<Real> adam_;
  ReplayBuffer buffer_;
  Rng explore_rng_;
  Rng replay_rng_;
  QNetwork::Params grads_;
  std::int64_t learn_steps_ = 0;
};

}  // namespace pricelab
