#pragma once

// Normalized profitability (Nash = 0, monopoly = 1), its inflation-aware
// variant, the decomposition linking the two, and run-level summaries.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pricelab {

inline constexpr double kDegenerateDenominator = 1e-12;

/// (mean - nash) / (monopoly - nash); nullopt when |monopoly - nash| <= 1e-12.
std::optional<double> normalized_profit(double mean_reward, double nash, double monopoly);

inline std::optional<double> delta(double mean_reward, double nash, double monopoly) {
  return normalized_profit(mean_reward, nash, monopoly);
}
inline std::optional<double> nabla(double mean_reward, double forced_nash,
                                   double forced_monopoly) {
  return normalized_profit(mean_reward, forced_nash, forced_monopoly);
}

struct MetricRow {
  std::int64_t t = 0;
  double mean_reward = 0.0;
  double static_nash = 0.0;
  double static_monopoly = 0.0;
  double forced_nash = 0.0;
  double forced_monopoly = 0.0;
  std::optional<double> delta;
  std::optional<double> nabla;
};

MetricRow make_metric_row(std::int64_t t, double mean_reward, double static_nash,
                          double static_monopoly, double forced_nash,
                          double forced_monopoly);

struct Decomposition {
  double inflation_effect = 0.0;  // (R^N - R^NF) / (R^MF - R^NF)
  double xi = 1.0;                // (R^MF - R^NF) / (R^M - R^N)
  double reconstructed_delta = 0.0;
};

/// Delta = (nabla - IE) * xi; nullopt if either denominator is degenerate.
std::optional<Decomposition> decompose(const MetricRow& row);

struct MuStatistic {
  double mu = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

/// Grand mean over runs x steps of the defined entries. Trajectories must
/// have equal length; throws InvalidInput on empty input.
MuStatistic mu_statistic(const std::vector<std::vector<std::optional<double>>>& runs);

enum class Punishment { kNone, kPunishment };

const char* to_string(Punishment outcome);

/// Punishment iff the responder's action index at any of the five steps after
/// `deviation_step` is strictly below its index at deviation_step - 1. The
/// margin grid is increasing, so index order is margin order.
Punishment punishment_classify(std::span<const int> responder_actions,
                               std::size_t deviation_step);

inline constexpr std::size_t kSupraWindow = 1000;

/// Elapsed-step count (window end index + 1) at which the trailing
/// `window`-step mean of nabla first exceeds zero. Undefined entries are not
/// allowed here; callers pass a filled trajectory.
std::optional<std::size_t> time_to_supra(std::span<const double> nabla_values,
                                         std::size_t window = kSupraWindow);

}  // namespace pricelab
