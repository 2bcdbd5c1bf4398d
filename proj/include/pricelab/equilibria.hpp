#pragma once

// Nash and monopoly benchmarks of the logit market, and the profit
// benchmarks derived from them along an inflation path.

#include <span>
#include <vector>

#include "pricelab/market.hpp"

namespace pricelab {

struct EquilibriumSolution {
  std::vector<double> prices;
  std::vector<double> quantities;        // under the full n-firm demand
  std::vector<double> deflated_profits;  // (p - c) q / lambda per firm
  double foc_residual = 0.0;
  int iterations = 0;

  double mean_profit() const;
};

struct SolverOptions {
  double foc_tolerance = 1e-8;
  double step_tolerance = 1e-10;
  int max_iterations = 10000;
  double damping = 0.5;
  double bracket_width = 1e-10;  // golden-section stopping width
};

/// Unique root of p - c = s / (1 - q_i(p)) with rivals' prices held fixed.
double best_response(std::size_t firm, std::span<const double> prices,
                     const MarketState& state, const MarketParams& params);

/// max_i |p_i - c - lambda mu / (1 - q_i)| with q from the n-firm demand.
double nash_foc_residual(std::span<const double> prices, const MarketState& state,
                         const MarketParams& params);

/// Single-product monopoly share e^{(a-p)/s} / (e^{(a-p)/s} + e^{a0/s}).
double monopoly_share(double price, double alpha, const MarketState& state,
                      const MarketParams& params);

EquilibriumSolution solve_nash(const MarketState& state, const MarketParams& params,
                               const SolverOptions& options = {});

/// Per-firm monopoly price from the single-product demand; quantities and
/// profits are then evaluated in the full market at that price vector.
EquilibriumSolution solve_monopoly(const MarketState& state,
                                   const MarketParams& params,
                                   const SolverOptions& options = {});

struct BenchmarkProfits {
  double nash = 0.0;
  double monopoly = 0.0;
};

/// Mean deflated profit of a fixed price vector in the market `state`.
double mean_deflated_profit(std::span<const double> prices, const MarketState& state,
                            const MarketParams& params);

/// t=0 equilibrium prices held fixed and re-evaluated in the time-t market.
BenchmarkProfits static_benchmark_profits(const MarketState& state,
                                          const EquilibriumSolution& nash0,
                                          const EquilibriumSolution& monopoly0,
                                          const MarketParams& params);

/// t=0 equilibrium prices indexed by the realized cumulative inflation.
struct ForcedEquilibriumPath {
  std::vector<double> base_nash_prices;
  std::vector<double> base_monopoly_prices;
  double growth_factor = 1.0;

  ForcedEquilibriumPath() = default;
  ForcedEquilibriumPath(const EquilibriumSolution& nash0,
                        const EquilibriumSolution& monopoly0);

  void advance(double omega);
  std::vector<double> nash_prices() const;
  std::vector<double> monopoly_prices() const;
};

/// Throws ConsistencyError unless growth_factor matches lambda_t / lambda_0
/// (lambda_0 = 1) within 1e-9.
BenchmarkProfits forced_benchmark_profits(const MarketState& state,
                                          const ForcedEquilibriumPath& path,
                                          const MarketParams& params);

}  // namespace pricelab
