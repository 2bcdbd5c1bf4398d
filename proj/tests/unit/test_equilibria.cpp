#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pricelab/equilibria.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/market.hpp"
#include "pricelab/rng.hpp"

using namespace pricelab;

namespace {

MarketState state_with(const MarketParams& params, double cost, double lambda,
                       std::vector<double> alpha) {
  MarketState s = MarketState::initial(params, 1);
  s.cost = cost;
  s.price_index = lambda;
  s.alpha = std::move(alpha);
  return s;
}

}  // namespace

TEST_CASE("base Nash matches the grid best-response oracle") {
  MarketParams params;
  const MarketState s = MarketState::initial(params, 1);
  const auto nash = solve_nash(s, params);
  const oracle::Grid grid{1.0, 4.0 / 1e5, 100001};
  const auto ref = oracle::grid_nash(s.alpha, 0.0, 1.0, 1.0, 0.25, grid);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(nash.prices[i] - ref[i]) <= grid.step);
  CHECK(nash.foc_residual < 1e-8);
  CHECK(nash_foc_residual(nash.prices, s, params) < 1e-8);
  CHECK(nash.prices[0] == doctest::Approx(nash.prices[1]).epsilon(1e-12));
  // Frozen from the oracle run above.
  CHECK(std::abs(nash.prices[0] - 1.306688) < 1e-6);
  CHECK(std::abs(nash.deflated_profits[0] - 0.0566877) < 1e-7);
}

TEST_CASE("base monopoly matches the dense grid oracle") {
  MarketParams params;
  const MarketState s = MarketState::initial(params, 1);
  const auto mono = solve_monopoly(s, params);
  const oracle::Grid grid{1.0, 9.0 / 1e6, 1000001};
  const double ref = oracle::grid_monopoly(1.0, 0.0, 1.0, 1.0, 0.25, grid);
  CHECK(std::abs(mono.prices[0] - ref) <= grid.step);
  CHECK(mono.foc_residual < 1e-8);
  CHECK(std::abs(mono.prices[0] - 1.319616) < 1e-6);
  // Monopoly profit evaluated in the duopoly exceeds the Nash profit.
  const auto nash = solve_nash(s, params);
  CHECK(mono.mean_profit() > nash.mean_profit());
}

TEST_CASE("Nash prices approach cost as differentiation vanishes") {
  MarketParams params;
  params.mu = 0.001;
  const MarketState s = MarketState::initial(params, 1);
  const auto nash = solve_nash(s, params);
  for (double p : nash.prices) {
    CHECK(p - 1.0 < 0.01);
    CHECK(p > 1.0);
  }
}

TEST_CASE("equilibria scale with the market") {
  MarketParams params;
  const MarketState base = MarketState::initial(params, 1);
  const MarketState scaled = state_with(params, 2.0, 2.0, {2.0, 2.0});
  const auto n1 = solve_nash(base, params), n2 = solve_nash(scaled, params);
  const auto m1 = solve_monopoly(base, params), m2 = solve_monopoly(scaled, params);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(n2.prices[i] - 2.0 * n1.prices[i]) < 1e-9);
    CHECK(std::abs(m2.prices[i] - 2.0 * m1.prices[i]) < 1e-9);
    CHECK(n2.deflated_profits[i] == doctest::Approx(n1.deflated_profits[i]).epsilon(1e-9));
  }
}

TEST_CASE("best response solves the firm's first-order condition") {
  MarketParams params;
  const MarketState s = MarketState::initial(params, 1);
  const std::vector<double> rivals{1.4, 1.7};
  const double br = best_response(0, rivals, s, params);
  std::vector<double> p{br, 1.7};
  const auto q = logit_demand(p, s, params);
  CHECK(std::abs(br - 1.0 - 0.25 / (1.0 - q[0])) < 1e-9);
  // And it beats nearby prices.
  for (double d : {-1e-3, 1e-3}) {
    std::vector<double> alt{br + d, 1.7};
    CHECK(oracle::profit(0, alt, s.alpha, 0.0, 1.0, 1.0, 0.25) <
          oracle::profit(0, p, s.alpha, 0.0, 1.0, 1.0, 0.25));
  }
}

TEST_CASE("asymmetric oligopoly against the grid oracle") {
  MarketParams params;
  params.n_agents = 3;
  params.mu = 0.4;
  params.alpha0 = 0.2;
  const MarketState s = state_with(params, 1.2, 1.1, {1.0, 1.5, 2.0});
  const auto nash = solve_nash(s, params);
  const double upper = 1.2 + 10.0 * 1.1 * 0.4;
  const oracle::Grid grid{1.2, 5e-5, static_cast<std::size_t>((upper - 1.2) / 5e-5) + 1};
  const auto ref = oracle::grid_nash(s.alpha, 0.2, 1.2, 1.1, 0.4, grid);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(nash.prices[i] - ref[i]) <= grid.step);
  // Higher quality sells at a higher price.
  CHECK(nash.prices[0] < nash.prices[1]);
  CHECK(nash.prices[1] < nash.prices[2]);
}

TEST_CASE("static benchmarks at t = 0 return the base profits") {
  MarketParams params;
  const MarketState s = MarketState::initial(params, 1);
  const auto nash = solve_nash(s, params);
  const auto mono = solve_monopoly(s, params);
  const auto b = static_benchmark_profits(s, nash, mono, params);
  CHECK(b.nash == nash.mean_profit());
  CHECK(b.monopoly == mono.mean_profit());
}

TEST_CASE("forced benchmarks track inflation exactly when alpha0 = 0") {
  MarketParams params;
  const MarketState s0 = MarketState::initial(params, 1);
  const auto nash = solve_nash(s0, params);
  const auto mono = solve_monopoly(s0, params);
  Rng rng(4);
  for (int path_id = 0; path_id < 20; ++path_id) {
    MarketState s = s0;
    ForcedEquilibriumPath path(nash, mono);
    for (int step = 0; step < 50; ++step) {
      const double omega = rng.uniform() < 0.3 ? 0.05 * (rng.uniform() - 0.2) : 0.0;
      s = apply_shock(s, omega);
      path.advance(omega);
      const auto forced = forced_benchmark_profits(s, path, params);
      REQUIRE(std::abs(forced.nash - nash.mean_profit()) < 1e-10);
      REQUIRE(std::abs(forced.monopoly - mono.mean_profit()) < 1e-10);
    }
  }
}

TEST_CASE("forced and static benchmarks coincide without shocks") {
  MarketParams params;
  const MarketState s = MarketState::initial(params, 1);
  const auto nash = solve_nash(s, params);
  const auto mono = solve_monopoly(s, params);
  ForcedEquilibriumPath path(nash, mono);
  for (int t = 0; t < 10; ++t) path.advance(0.0);
  const auto forced = forced_benchmark_profits(s, path, params);
  const auto fixed = static_benchmark_profits(s, nash, mono, params);
  CHECK(forced.nash == fixed.nash);
  CHECK(forced.monopoly == fixed.monopoly);
}

TEST_CASE("static benchmarks erode under inflation while forced ones do not") {
  MarketParams params;
  const MarketState s0 = MarketState::initial(params, 1);
  const auto nash = solve_nash(s0, params);
  const auto mono = solve_monopoly(s0, params);
  const MarketState s = apply_shock(s0, 0.05);
  const auto fixed = static_benchmark_profits(s, nash, mono, params);
  // Fixed nominal prices below the new cost-plus-markup: profit per unit shrinks.
  CHECK(fixed.nash < nash.mean_profit());
}

TEST_CASE("desynchronized growth factor is a consistency error") {
  MarketParams params;
  const MarketState s0 = MarketState::initial(params, 1);
  ForcedEquilibriumPath path(solve_nash(s0, params), solve_monopoly(s0, params));
  const MarketState s = apply_shock(s0, 0.02);
  CHECK_THROWS_AS(forced_benchmark_profits(s, path, params), ConsistencyError);
  path.advance(0.02);
  CHECK_NOTHROW(forced_benchmark_profits(s, path, params));
}

TEST_CASE("an iteration cap that is too small raises SolverFailure") {
  MarketParams params;
  const MarketState s = MarketState::initial(params, 1);
  SolverOptions options;
  options.max_iterations = 1;
  try {
    solve_nash(s, params, options);
    FAIL("expected SolverFailure");
  } catch (const SolverFailure& e) {
    CHECK(e.residual() > 0.0);
  }
}
