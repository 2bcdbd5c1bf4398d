#pragma once

// The repeated pricing game: agents pick margin indices, the market clears,
// rewards are deflated profits, and a possible inflation shock moves the
// next period's cost.

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "pricelab/market.hpp"
#include "pricelab/rng.hpp"

namespace pricelab {

struct EnvConfig {
  std::size_t memory = 1;          // k past periods in the state
  std::size_t norm_window = 1000;  // trailing cost-average window

  /// round(1/rho) for rho > 0, else 1000.
  static std::size_t window_for_rho(double rho);
  void validate() const;
};

struct EnvState {
  MarketState market;
  InflationProcess inflation;
  std::deque<double> recent_costs;  // up to norm_window costs, current last
};

using Observation = std::vector<double>;

/// n*k + k + 1.
std::size_t observation_length(std::size_t n_agents, std::size_t memory);

/// [c_t / m_t, margins of t-k..t-1 (agent-major within a period),
///  c_{t-k} / m_t .. c_{t-1} / m_t], m_t the trailing mean cost.
/// Throws NotReady before the history holds k periods.
Observation build_observation(const EnvState& state, const EnvConfig& config);

struct StepOutcome {
  std::vector<double> prices;
  std::vector<double> quantities;
  std::vector<double> rewards;
  std::vector<double> margins;  // (p - c) / c as recorded in the history
  double cost = 0.0;            // cost of the priced period
  double price_index = 1.0;     // lambda of the priced period
  double omega = 0.0;           // shock applied after pricing
  EnvState next;
  Observation next_observation;  // empty while the history is not yet full
};

/// Price -> demand -> reward -> shock -> history, then t advances by one.
StepOutcome env_step(const EnvState& state, std::span<const int> actions,
                     const MarketParams& params, const EnvConfig& config,
                     Rng& shock_rng);

struct ResetResult {
  EnvState state;
  Observation observation;
};

/// Fresh market at (c0, lambda = 1, alpha_init) followed by k steps of
/// uniformly random actions to fill the history.
ResetResult reset_and_warmup(const MarketParams& params, const EnvConfig& config,
                             InflationProcess inflation, Rng& action_rng,
                             Rng& shock_rng);

}  // namespace pricelab
