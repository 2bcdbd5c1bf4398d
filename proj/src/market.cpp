#include "pricelab/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pricelab/errors.hpp"

namespace pricelab {

void MarketParams::validate() const {
  if (n_agents < 1) throw InvalidInput("n_agents must be >= 1");
  if (!(mu > 0.0)) throw InvalidInput("mu must be > 0");
  if (!(c0 > 0.0)) throw InvalidInput("c0 must be > 0");
  if (m_actions < 2) throw InvalidInput("m_actions must be >= 2");
  if (!(eta_min < eta_max)) throw InvalidInput("eta_min must be < eta_max");
  if (!(eta_min > -1.0)) throw InvalidInput("eta_min must be > -1 (positive prices)");
  if (!std::isfinite(alpha0) || !std::isfinite(alpha_init)) {
    throw InvalidInput("alpha0 and alpha_init must be finite");
  }
}

InflationProcess::InflationProcess(double rho, std::vector<double> series)
    : rho_(rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidInput("rho must lie in [0, 1]");
  for (double rate : series) {
    if (!std::isfinite(rate) || rate <= -1.0) {
      throw InvalidInput("inflation rates must be finite and > -1");
    }
  }
  series_ = std::make_shared<const std::vector<double>>(std::move(series));
}

std::span<const double> InflationProcess::series() const {
  if (!series_) return {};
  return *series_;
}

ShockDraw draw_shock(const InflationProcess& process, double u) {
  if (!(u < process.rho_)) return {0.0, process};
  if (process.remaining() == 0) {
    throw SeriesExhausted("inflation series exhausted after " +
                          std::to_string(process.cursor_) + " shocks");
  }
  InflationProcess next = process;
  const double omega = (*next.series_)[next.cursor_];
  ++next.cursor_;
  return {omega, std::move(next)};
}

MarketState MarketState::initial(const MarketParams& params, std::size_t memory) {
  params.validate();
  if (memory < 1) throw InvalidInput("memory must be >= 1");
  MarketState state;
  state.cost = params.c0;
  state.price_index = 1.0;
  state.alpha.assign(static_cast<std::size_t>(params.n_agents), params.alpha_init);
  state.memory = memory;
  return state;
}

void MarketState::record(std::vector<double> margins, double period_cost) {
  margin_history.push_back(std::move(margins));
  cost_history.push_back(period_cost);
  while (cost_history.size() > memory) {
    cost_history.pop_front();
    margin_history.pop_front();
  }
}

DemandShares logit_shares(std::span<const double> prices,
                          std::span<const double> alpha, double alpha0,
                          double scale) {
  if (prices.size() != alpha.size()) {
    throw InvalidInput("price and quality vectors differ in length");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidInput("demand scale (lambda * mu) must be positive and finite");
  }
  const std::size_t n = prices.size();
  std::vector<double> args(n);
  const double outside_arg = alpha0 / scale;
  double top = outside_arg;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(prices[i])) throw InvalidInput("non-finite price");
    args[i] = (alpha[i] - prices[i]) / scale;
    top = std::max(top, args[i]);
  }
  DemandShares shares;
  shares.inside.resize(n);
  const double outside_weight = std::exp(outside_arg - top);
  double denom = outside_weight;
  for (std::size_t i = 0; i < n; ++i) {
    shares.inside[i] = std::exp(args[i] - top);
    denom += shares.inside[i];
  }
  for (double& q : shares.inside) q /= denom;
  shares.outside = outside_weight / denom;
  return shares;
}

std::vector<double> logit_demand(std::span<const double> prices,
                                 const MarketState& state,
                                 const MarketParams& params) {
  if (!(state.price_index > 0.0)) throw InvalidInput("price index must be > 0");
  return logit_shares(prices, state.alpha, params.alpha0,
                      state.price_index * params.mu)
      .inside;
}

MarketState apply_shock(MarketState state, double omega) {
  if (!(omega > -1.0) || !std::isfinite(omega)) {
    throw InvalidInput("shock rate must be finite and > -1");
  }
  if (omega == 0.0) return state;
  const double growth = 1.0 + omega;
  state.cost *= growth;
  state.price_index *= growth;
  for (double& a : state.alpha) a *= growth;
  return state;
}

std::vector<double> margin_grid(const MarketParams& params) {
  if (params.m_actions < 2) throw InvalidInput("m_actions must be >= 2");
  const auto m = static_cast<std::size_t>(params.m_actions);
  const double step = (params.eta_max - params.eta_min) / static_cast<double>(m - 1);
  std::vector<double> grid(m);
  for (std::size_t a = 0; a < m; ++a) {
    grid[a] = params.eta_min + static_cast<double>(a) * step;
  }
  grid.back() = params.eta_max;
  return grid;
}

double deflated_profit(double price, double cost, double quantity,
                       double price_index) {
  if (!(price_index > 0.0)) throw InvalidInput("price index must be > 0");
  return (price - cost) * quantity / price_index;
}

}  // namespace pricelab
