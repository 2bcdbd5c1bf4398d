#pragma once

// Differentiated Bertrand market with logit demand, an outside good and a
// common inflation factor that scales cost, quality and the price index.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <vector>

namespace pricelab {

struct ShockDraw;

struct MarketParams {
  int n_agents = 2;
  double mu = 0.25;           // horizontal differentiation
  double alpha0 = 0.0;        // outside-good index
  double c0 = 1.0;            // initial marginal cost
  double alpha_init = 1.0;    // initial vertical differentiation
  double eta_min = -0.5;
  double eta_max = 2.0;
  int m_actions = 15;

  void validate() const;
};

/// Shock process: with probability rho the next unconsumed value of the
/// series is realized, otherwise zero. Copies share the series storage.
class InflationProcess {
 public:
  InflationProcess() = default;
  InflationProcess(double rho, std::vector<double> series);

  double rho() const { return rho_; }
  std::size_t cursor() const { return cursor_; }
  std::size_t size() const { return series_ ? series_->size() : 0; }
  std::size_t remaining() const { return size() - cursor_; }
  std::span<const double> series() const;

 private:
  friend ShockDraw draw_shock(const InflationProcess&, double);
  double rho_ = 0.0;
  std::shared_ptr<const std::vector<double>> series_;
  std::size_t cursor_ = 0;
};

struct ShockDraw {
  double omega;
  InflationProcess process;
};

ShockDraw draw_shock(const InflationProcess& process, double u);

struct MarketState {
  std::int64_t t = 0;
  double cost = 1.0;
  double price_index = 1.0;
  std::vector<double> alpha;
  std::size_t memory = 1;
  std::deque<std::vector<double>> margin_history;  // oldest first
  std::deque<double> cost_history;                 // oldest first

  static MarketState initial(const MarketParams& params, std::size_t memory);
  bool history_full() const { return cost_history.size() == memory; }
  /// Append one period's margins and cost, dropping the oldest past `memory`.
  void record(std::vector<double> margins, double period_cost);
};

struct DemandShares {
  std::vector<double> inside;
  double outside = 0.0;
};

/// Shares e^{(a_i - p_i)/s} / (sum_j e^{(a_j - p_j)/s} + e^{a0/s}) with
/// s = scale (lambda * mu), computed with max-exponent subtraction.
DemandShares logit_shares(std::span<const double> prices,
                          std::span<const double> alpha, double alpha0,
                          double scale);

std::vector<double> logit_demand(std::span<const double> prices,
                                 const MarketState& state,
                                 const MarketParams& params);

MarketState apply_shock(MarketState state, double omega);

std::vector<double> margin_grid(const MarketParams& params);

inline double price_from_margin(double cost, double eta) {
  return cost * (1.0 + eta);
}

double deflated_profit(double price, double cost, double quantity,
                       double price_index);

}  // namespace pricelab
