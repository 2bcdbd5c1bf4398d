#include "pricelab/dqn_agent.hpp"

#include <cmath>

#include "pricelab/errors.hpp"

namespace pricelab {

std::vector<int> DqnConfig::layer_dims() const {
  std::vector<int> dims{input_dim};
  for (int l = 0; l < hidden_layers; ++l) dims.push_back(hidden);
  dims.push_back(actions);
  return dims;
}

void DqnConfig::validate() const {
  if (input_dim < 1 || hidden < 1 || hidden_layers < 0 || actions < 2) {
    throw InvalidInput("invalid network dimensions");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("gamma must lie in [0, 1)");
  if (!(beta > 0.0)) throw InvalidInput("beta must be > 0");
  if (!(lr > 0.0)) throw InvalidInput("lr must be > 0");
  if (batch_size == 0 || buffer_capacity < batch_size) {
    throw InvalidInput("buffer capacity must be >= batch size > 0");
  }
  if (target_update_period < 1) throw InvalidInput("target update period must be >= 1");
}

double epsilon(std::int64_t t, double beta) {
  return std::exp(-beta * static_cast<double>(t));
}

int argmax_lowest(std::span<const double> values) {
  int best = 0;
  for (std::size_t a = 1; a < values.size(); ++a) {
    if (values[a] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(a);
  }
  return best;
}

DqnAgent::DqnAgent(const DqnConfig& config, const AgentSeeds& seeds)
    : config_(config),
      buffer_(config.buffer_capacity),
      explore_rng_(seeds.explore),
      replay_rng_(seeds.replay) {
  config_.validate();
  Rng init_rng(seeds.init);
  online_ = QNetwork::glorot(config_.layer_dims(), init_rng);
  target_ = online_;
  adam_ = Adam<Real>(online_.parameters());
}

std::vector<double> DqnAgent::q_values(std::span<const double> obs) const {
  return online_.forward(obs);
}

int DqnAgent::select_action(std::span<const double> obs, std::int64_t t, double u,
                            Rng& tie_rng) const {
  if (u < epsilon(t, config_.beta)) {
    return static_cast<int>(tie_rng.uniform_index(static_cast<std::size_t>(config_.actions)));
  }
  return greedy_action(obs);
}

int DqnAgent::act(std::span<const double> obs, std::int64_t t) {
  const double u = explore_rng_.uniform();
  return select_action(obs, t, u, explore_rng_);
}

int DqnAgent::greedy_action(std::span<const double> obs) const {
  return argmax_lowest(q_values(obs));
}

std::optional<double> DqnAgent::learn() {
  auto batch = buffer_.sample(config_.batch_size, replay_rng_);
  if (!batch) return std::nullopt;
  const auto& samples = *batch;
  const auto b = static_cast<Eigen::Index>(samples.size());
  const int in = config_.input_dim;

  QNetwork::Matrix obs(in, b);
  QNetwork::Matrix next_obs(in, b);
  std::vector<int> actions(samples.size());
  for (Eigen::Index j = 0; j < b; ++j) {
    const Transition& tr = *samples[static_cast<std::size_t>(j)];
    if (static_cast<int>(tr.obs.size()) != in || static_cast<int>(tr.next_obs.size()) != in) {
      throw InvalidInput("stored transition has the wrong observation length");
    }
    for (int i = 0; i < in; ++i) {
      obs(i, j) = static_cast<Real>(tr.obs[static_cast<std::size_t>(i)]);
      next_obs(i, j) = static_cast<Real>(tr.next_obs[static_cast<std::size_t>(i)]);
    }
    actions[static_cast<std::size_t>(j)] = tr.action;
  }

  // Continuing task: every transition bootstraps from the target network.
  const QNetwork::Matrix next_q = target_.forward_batch(next_obs);
  std::vector<double> targets(samples.size());
  for (Eigen::Index j = 0; j < b; ++j) {
    targets[static_cast<std::size_t>(j)] =
        samples[static_cast<std::size_t>(j)]->reward +
        config_.gamma * static_cast<double>(next_q.col(j).maxCoeff());
  }

  const double loss = online_.loss_and_gradients(obs, actions, targets, grads_);
  if (config_.grad_clip > 0.0) {
    const double norm = std::sqrt(grads_.squared_norm());
    if (norm > config_.grad_clip) grads_.scale(static_cast<Real>(config_.grad_clip / norm));
  }
  adam_.step(online_.parameters(), grads_, config_.lr);

  ++learn_steps_;
  if (learn_steps_ % config_.target_update_period == 0) target_ = online_;
  return loss;
}

void DqnAgent::load_weights(const QNetwork& network) {
  if (network.dims() != config_.layer_dims()) {
    throw InvalidInput("network dimensions do not match the agent configuration");
  }
  online_ = network;
  target_ = network;
  adam_ = Adam<Real>(online_.parameters());
}

}  // namespace pricelab
