#include "pricelab/metrics.hpp"

#include <cmath>

#include "pricelab/errors.hpp"

namespace pricelab {

std::optional<double> normalized_profit(double mean_reward, double nash, double monopoly) {
  const double span = monopoly - nash;
  if (!(std::abs(span) > kDegenerateDenominator)) return std::nullopt;
  return (mean_reward - nash) / span;
}

MetricRow make_metric_row(std::int64_t t, double mean_reward, double static_nash,
                          double static_monopoly, double forced_nash,
                          double forced_monopoly) {
  MetricRow row;
  row.t = t;
  row.mean_reward = mean_reward;
  row.static_nash = static_nash;
  row.static_monopoly = static_monopoly;
  row.forced_nash = forced_nash;
  row.forced_monopoly = forced_monopoly;
  row.delta = delta(mean_reward, static_nash, static_monopoly);
  row.nabla = nabla(mean_reward, forced_nash, forced_monopoly);
  return row;
}

std::optional<Decomposition> decompose(const MetricRow& row) {
  const double static_span = row.static_monopoly - row.static_nash;
  const double forced_span = row.forced_monopoly - row.forced_nash;
  if (!(std::abs(static_span) > kDegenerateDenominator) ||
      !(std::abs(forced_span) > kDegenerateDenominator)) {
    return std::nullopt;
  }
  Decomposition d;
  d.inflation_effect = (row.static_nash - row.forced_nash) / forced_span;
  d.xi = forced_span / static_span;
  const double nabla_value = (row.mean_reward - row.forced_nash) / forced_span;
  d.reconstructed_delta = (nabla_value - d.inflation_effect) * d.xi;
  return d;
}

MuStatistic mu_statistic(const std::vector<std::vector<std::optional<double>>>& runs) {
  if (runs.empty()) throw InvalidInput("mu needs at least one trajectory");
  const std::size_t length = runs.front().size();
  MuStatistic out;
  double total = 0.0;
  for (const auto& run : runs) {
    if (run.size() != length) throw InvalidInput("trajectories differ in length");
    for (const auto& value : run) {
      if (value) {
        total += *value;
        ++out.used;
      } else {
        ++out.excluded;
      }
    }
  }
  if (out.used == 0) throw InvalidInput("no defined values to average");
  out.mu = total / static_cast<double>(out.used);
  return out;
}

const char* to_string(Punishment outcome) {
  return outcome == Punishment::kPunishment ? "punishment" : "none";
}

Punishment punishment_classify(std::span<const int> responder_actions,
                               std::size_t deviation_step) {
  constexpr std::size_t kResponseWindow = 5;
  if (deviation_step < 1 || deviation_step + kResponseWindow >= responder_actions.size()) {
    throw InvalidInput("trajectory must cover [deviation - 1, deviation + 5]");
  }
  const int before = responder_actions[deviation_step - 1];
  for (std::size_t s = deviation_step + 1; s <= deviation_step + kResponseWindow; ++s) {
    if (responder_actions[s] < before) return Punishment::kPunishment;
  }
  return Punishment::kNone;
}

namespace {

// Neumaier-compensated sum of a window, used when the running sum is too
// close to zero for its sign to be trusted.
double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

}  // namespace

std::optional<std::size_t> time_to_supra(std::span<const double> nabla_values,
                                         std::size_t window) {
  if (window == 0) throw InvalidInput("window must be positive");
  if (nabla_values.size() < window) return std::nullopt;
  double running = 0.0;
  for (std::size_t i = 0; i < window; ++i) running += nabla_values[i];
  const double guard = 1e-9 * static_cast<double>(window);
  for (std::size_t end = window;; ++end) {
    double sum = running;
    if (std::abs(sum) < guard) sum = compensated_sum(nabla_values.subspan(end - window, window));
    if (sum > 0.0) return end;
    if (end == nabla_values.size()) return std::nullopt;
    running += nabla_values[end] - nabla_values[end - window];
  }
}

}  // namespace pricelab
