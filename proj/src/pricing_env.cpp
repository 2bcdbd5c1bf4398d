#include "pricelab/pricing_env.hpp"

#include <cmath>

#include "pricelab/errors.hpp"

namespace pricelab {

std::size_t EnvConfig::window_for_rho(double rho) {
  if (rho <= 0.0) return 1000;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / rho)));
}

void EnvConfig::validate() const {
  if (memory < 1) throw InvalidInput("memory must be >= 1");
  if (norm_window < 1) throw InvalidInput("normalization window must be >= 1");
}

std::size_t observation_length(std::size_t n_agents, std::size_t memory) {
  return n_agents * memory + memory + 1;
}

Observation build_observation(const EnvState& state, const EnvConfig& config) {
  const MarketState& market = state.market;
  if (market.cost_history.size() < config.memory ||
      market.margin_history.size() < config.memory) {
    throw NotReady("history holds fewer than k periods");
  }
  if (state.recent_costs.empty()) throw NotReady("no cost observations yet");
  double sum = 0.0;
  for (double c : state.recent_costs) sum += c;
  const double mean = sum / static_cast<double>(state.recent_costs.size());

  const std::size_t n = market.alpha.size();
  Observation obs;
  obs.reserve(observation_length(n, config.memory));
  obs.push_back(market.cost / mean);
  for (const auto& margins : market.margin_history) {
    obs.insert(obs.end(), margins.begin(), margins.end());
  }
  for (double c : market.cost_history) obs.push_back(c / mean);
  return obs;
}

StepOutcome env_step(const EnvState& state, std::span<const int> actions,
                     const MarketParams& params, const EnvConfig& config,
                     Rng& shock_rng) {
  const MarketState& market = state.market;
  const std::size_t n = market.alpha.size();
  if (actions.size() != n) throw InvalidInput("one action per agent is required");
  const auto grid = margin_grid(params);

  StepOutcome out;
  out.cost = market.cost;
  out.price_index = market.price_index;
  out.prices.resize(n);
  out.margins.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = actions[i];
    if (a < 0 || a >= params.m_actions) throw InvalidInput("action index out of range");
    out.prices[i] = price_from_margin(market.cost, grid[static_cast<std::size_t>(a)]);
    out.margins[i] = (out.prices[i] - market.cost) / market.cost;
  }
  out.quantities = logit_demand(out.prices, market, params);
  out.rewards.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.rewards[i] =
        deflated_profit(out.prices[i], market.cost, out.quantities[i], market.price_index);
  }

  ShockDraw draw = draw_shock(state.inflation, shock_rng.uniform());
  out.omega = draw.omega;
  out.next.inflation = std::move(draw.process);
  out.next.market = apply_shock(market, draw.omega);
  out.next.market.record(out.margins, market.cost);
  out.next.market.t = market.t + 1;
  out.next.recent_costs = state.recent_costs;
  out.next.recent_costs.push_back(out.next.market.cost);
  while (out.next.recent_costs.size() > config.norm_window) {
    out.next.recent_costs.pop_front();
  }
  if (out.next.market.history_full()) {
    out.next_observation = build_observation(out.next, config);
  }
  return out;
}

ResetResult reset_and_warmup(const MarketParams& params, const EnvConfig& config,
                             InflationProcess inflation, Rng& action_rng,
                             Rng& shock_rng) {
  config.validate();
  EnvState state;
  state.market = MarketState::initial(params, config.memory);
  state.inflation = std::move(inflation);
  state.recent_costs.push_back(state.market.cost);
  std::vector<int> actions(static_cast<std::size_t>(params.n_agents));
  for (std::size_t step = 0; step < config.memory; ++step) {
    for (int& a : actions) {
      a = static_cast<int>(action_rng.uniform_index(static_cast<std::size_t>(params.m_actions)));
    }
    state = env_step(state, actions, params, config, shock_rng).next;
  }
  Observation obs = build_observation(state, config);
  return {std::move(state), std::move(obs)};
}

}  // namespace pricelab
