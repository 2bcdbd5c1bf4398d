#include "pricelab/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pricelab/errors.hpp"

namespace pricelab {
namespace {

double demand_scale(const MarketState& state, const MarketParams& params) {
  if (!(state.price_index > 0.0)) throw InvalidInput("price index must be > 0");
  return state.price_index * params.mu;
}

double own_share(std::size_t firm, std::vector<double>& prices, double price,
                 const MarketState& state, const MarketParams& params) {
  prices[firm] = price;
  return logit_shares(prices, state.alpha, params.alpha0,
                      demand_scale(state, params))
      .inside[firm];
}

// Root of an increasing function on [lo, hi] with f(lo) < 0 <= f(hi).
template <typename F>
double bisect(F&& f, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double monopoly_foc(double price, double alpha, const MarketState& state,
                    const MarketParams& params) {
  const double s = demand_scale(state, params);
  return price - state.cost - s / (1.0 - monopoly_share(price, alpha, state, params));
}

}  // namespace

double EquilibriumSolution::mean_profit() const {
  if (deflated_profits.empty()) return 0.0;
  return std::accumulate(deflated_profits.begin(), deflated_profits.end(), 0.0) /
         static_cast<double>(deflated_profits.size());
}

double best_response(std::size_t firm, std::span<const double> prices,
                     const MarketState& state, const MarketParams& params) {
  const double s = demand_scale(state, params);
  const double c = state.cost;
  std::vector<double> trial(prices.begin(), prices.end());
  auto foc = [&](double p) { return p - c - s / (1.0 - own_share(firm, trial, p, state, params)); };
  // The FOC is increasing in p, and since q_i(p) <= q_i(c) for p >= c the
  // root is at most c + s / (1 - q_i(c)).
  const double hi = c + s / (1.0 - own_share(firm, trial, c, state, params));
  return bisect(foc, c, hi * (1.0 + 1e-12));
}

double nash_foc_residual(std::span<const double> prices, const MarketState& state,
                         const MarketParams& params) {
  const double s = demand_scale(state, params);
  const auto q = logit_shares(prices, state.alpha, params.alpha0, s).inside;
  double worst = 0.0;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    worst = std::max(worst, std::abs(prices[i] - state.cost - s / (1.0 - q[i])));
  }
  return worst;
}

double monopoly_share(double price, double alpha, const MarketState& state,
                      const MarketParams& params) {
  const double s = demand_scale(state, params);
  const double own = (alpha - price) / s;
  const double outside = params.alpha0 / s;
  // Logistic form of e^own / (e^own + e^outside).
  return 1.0 / (1.0 + std::exp(outside - own));
}

double mean_deflated_profit(std::span<const double> prices, const MarketState& state,
                            const MarketParams& params) {
  const auto q = logit_demand(prices, state, params);
  double total = 0.0;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    total += deflated_profit(prices[i], state.cost, q[i], state.price_index);
  }
  return total / static_cast<double>(prices.size());
}

namespace {

EquilibriumSolution evaluate(std::vector<double> prices, const MarketState& state,
                             const MarketParams& params) {
  EquilibriumSolution sol;
  sol.quantities = logit_demand(prices, state, params);
  sol.deflated_profits.resize(prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i) {
    sol.deflated_profits[i] =
        deflated_profit(prices[i], state.cost, sol.quantities[i], state.price_index);
  }
  sol.prices = std::move(prices);
  return sol;
}

}  // namespace

EquilibriumSolution solve_nash(const MarketState& state, const MarketParams& params,
                               const SolverOptions& options) {
  const std::size_t n = state.alpha.size();
  std::vector<double> prices(n, state.cost * 1.5);
  std::vector<double> next(n);
  double residual = nash_foc_residual(prices, state, params);
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    double step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double br = best_response(i, prices, state, params);
      next[i] = (1.0 - options.damping) * br + options.damping * prices[i];
      step = std::max(step, std::abs(next[i] - prices[i]));
    }
    prices.swap(next);
    residual = nash_foc_residual(prices, state, params);
    if (step < options.step_tolerance && residual <= options.foc_tolerance) {
      auto sol = evaluate(std::move(prices), state, params);
      sol.foc_residual = residual;
      sol.iterations = iter;
      return sol;
    }
  }
  throw SolverFailure("Nash iteration did not converge; residual " +
                          std::to_string(residual),
                      residual);
}

EquilibriumSolution solve_monopoly(const MarketState& state,
                                   const MarketParams& params,
                                   const SolverOptions& options) {
  const std::size_t n = state.alpha.size();
  const double c = state.cost;
  std::vector<double> prices(n);
  double residual = 0.0;
  int iterations = 0;
  constexpr double kInvPhi = 0.6180339887498949;

  for (std::size_t i = 0; i < n; ++i) {
    const double alpha = state.alpha[i];
    auto profit = [&](double p) {
      return (p - c) * monopoly_share(p, alpha, state, params);
    };
    double upper = 10.0 * c;
    double best = 0.0;
    double lo = c, hi = upper;
    for (int attempt = 0; attempt < 2; ++attempt) {
      lo = c;
      hi = upper;
      double x1 = hi - kInvPhi * (hi - lo);
      double x2 = lo + kInvPhi * (hi - lo);
      double f1 = profit(x1), f2 = profit(x2);
      while (hi - lo > options.bracket_width * std::max(1.0, c)) {
        ++iterations;
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + kInvPhi * (hi - lo);
          f2 = profit(x2);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - kInvPhi * (hi - lo);
          f1 = profit(x1);
        }
      }
      best = 0.5 * (lo + hi);
      if (upper - best > 1e-6 * upper) break;
      if (attempt == 1) {
        throw SolverFailure("monopoly maximizer at bracket endpoint", 0.0);
      }
      upper = 100.0 * c;
    }
    // Golden section resolves the flat optimum only to ~sqrt(eps); finish on
    // the first-order condition, which is monotone in p.
    auto foc = [&](double p) { return monopoly_foc(p, alpha, state, params); };
    const double pad = 1e-6 * std::max(1.0, c);
    const double a = std::max(c, best - pad);
    const double b = best + pad;
    if (foc(a) < 0.0 && foc(b) >= 0.0) best = bisect(foc, a, b);
    prices[i] = best;
    residual = std::max(residual, std::abs(foc(best)));
  }
  if (residual > options.foc_tolerance) {
    throw SolverFailure("monopoly FOC residual " + std::to_string(residual), residual);
  }
  auto sol = evaluate(std::move(prices), state, params);
  sol.foc_residual = residual;
  sol.iterations = iterations;
  return sol;
}

BenchmarkProfits static_benchmark_profits(const MarketState& state,
                                          const EquilibriumSolution& nash0,
                                          const EquilibriumSolution& monopoly0,
                                          const MarketParams& params) {
  return {mean_deflated_profit(nash0.prices, state, params),
          mean_deflated_profit(monopoly0.prices, state, params)};
}

ForcedEquilibriumPath::ForcedEquilibriumPath(const EquilibriumSolution& nash0,
                                             const EquilibriumSolution& monopoly0)
    : base_nash_prices(nash0.prices), base_monopoly_prices(monopoly0.prices) {}

void ForcedEquilibriumPath::advance(double omega) {
  if (omega != 0.0) growth_factor *= 1.0 + omega;
}

std::vector<double> ForcedEquilibriumPath::nash_prices() const {
  std::vector<double> out(base_nash_prices);
  for (double& p : out) p *= growth_factor;
  return out;
}

std::vector<double> ForcedEquilibriumPath::monopoly_prices() const {
  std::vector<double> out(base_monopoly_prices);
  for (double& p : out) p *= growth_factor;
  return out;
}

BenchmarkProfits forced_benchmark_profits(const MarketState& state,
                                          const ForcedEquilibriumPath& path,
                                          const MarketParams& params) {
  if (std::abs(path.growth_factor - state.price_index) > 1e-9) {
    throw ConsistencyError("forced path growth factor " +
                           std::to_string(path.growth_factor) +
                           " out of sync with price index " +
                           std::to_string(state.price_index));
  }
  return {mean_deflated_profit(path.nash_prices(), state, params),
          mean_deflated_profit(path.monopoly_prices(), state, params)};
}

}  // namespace pricelab
