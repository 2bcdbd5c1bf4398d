#pragma once

// Per-step trajectories and per-run summaries, with their CSV/JSON forms.
//
// CSV header: t,omega,c,lambda,action_0..action_{N-1},price_0..,qty_0..,
// reward_0..,delta,nabla. Floats use shortest round-trip formatting; an
// undefined delta or nabla is an empty field.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pricelab/checkpoint.hpp"
#include "pricelab/metrics.hpp"

namespace pricelab {

struct StepLog {
  std::int64_t t = 0;
  double omega = 0.0;
  double cost = 0.0;
  double price_index = 1.0;
  std::vector<int> actions;
  std::vector<double> prices;
  std::vector<double> quantities;
  std::vector<double> rewards;
  std::optional<double> delta;
  std::optional<double> nabla;

  bool operator==(const StepLog&) const = default;
};

struct RunSummary {
  std::size_t repetition = 0;
  std::string series;
  bool synthetic_series = false;
  std::int64_t steps = 0;
  double nabla_sum = 0.0;
  std::size_t nabla_defined = 0;
  std::size_t nabla_undefined = 0;
  std::size_t delta_undefined = 0;
  double mu = 0.0;                   // mean nabla over defined steps
  double final_window_nabla = 0.0;   // mean nabla over the last 10k steps
  std::optional<std::size_t> time_to_supra;
  std::optional<Punishment> punishment;
  std::optional<int> deviation_action;
  std::size_t shocks = 0;
  std::vector<std::size_t> source_repetitions;  // out-of-sample pairings
  bool failed = false;
  std::string failure;

  bool operator==(const RunSummary&) const = default;
};

struct RunRecord {
  RunSummary summary;
  std::vector<StepLog> log;
  std::vector<Checkpoint> agents;
};

std::string run_csv_header(int n_agents);
void write_run_csv(std::ostream& out, const std::vector<StepLog>& log, int n_agents);
/// Inverse of write_run_csv; throws ParseError on malformed rows.
std::vector<StepLog> read_run_csv(std::istream& in);

std::string summary_to_json(const RunSummary& summary);
RunSummary summary_from_json(const std::string& text);

}  // namespace pricelab
