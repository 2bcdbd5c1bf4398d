#pragma once

// Experiment protocols: joint training (in-sample), frozen evaluation of
// agents from distinct training runs (out-of-sample), forced deviation to the
// Nash price, and one-at-a-time parameter sweeps.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pricelab/checkpoint.hpp"
#include "pricelab/config.hpp"
#include "pricelab/inflation_data.hpp"
#include "pricelab/metrics.hpp"
#include "pricelab/run_record.hpp"
#include "pricelab/stats.hpp"

namespace pricelab {

using ProgressFn = std::function<void(std::size_t index, std::size_t total, std::int64_t t,
                                      double recent_nabla)>;

struct RunOptions {
  std::size_t jobs = 1;
  ProgressFn progress;
  std::int64_t progress_every = 10000;
};

/// Window for RunSummary::final_window_nabla.
inline constexpr std::int64_t kFinalWindow = 10000;

struct BatchResult {
  std::string protocol;
  std::vector<RunRecord> runs;
  std::vector<double> per_run_mu;  // NaN for failed runs
  std::optional<MuStatistic> mu;
  double sigma = 0.0;              // sample sd of per-run mu
  std::size_t failures = 0;
  std::size_t punished = 0;
};

/// Series from cfg.inflation_csv, or the synthetic reference pool.
std::vector<InflationSeries> resolve_series_pool(const RunConfig& cfg, std::int64_t steps);

/// Throws ConfigError unless every series has at least
/// rho T + 3 sqrt(rho T) values for T = steps + k warm-up steps.
void validate_series_length(const RunConfig& cfg, const std::vector<InflationSeries>& pool,
                            std::int64_t steps);

/// Index of the grid margin whose price c (1 + eta) is nearest `price`.
int nearest_margin_index(double price, double cost, const MarketParams& params);

/// Keeps every step in [0, 5000), within 100 of the deviation, in the final
/// 5000, every shock step, and every `stride`-th step otherwise.
bool keep_log_row(std::int64_t t, std::int64_t steps, int stride, bool shock,
                  std::optional<std::int64_t> deviation_step);

BatchResult run_in_sample(const RunConfig& cfg, const RunOptions& options = {});

/// run_in_sample with agent 0 forced to the static Nash price at
/// cfg.deviation_step; agent 1's response is classified.
BatchResult run_deviation(const RunConfig& cfg, const RunOptions& options = {});

/// `pool[r]` holds the per-agent checkpoints of training repetition r.
/// Each of cfg.repetitions pairings draws N distinct repetitions, loads agent
/// slot i from the i-th draw, and plays cfg.eval_timesteps greedy steps.
BatchResult run_out_of_sample(const std::vector<std::vector<Checkpoint>>& pool,
                              const RunConfig& cfg, const RunOptions& options = {});

struct SweepRow {
  std::string label;  // "base" or "key=value"
  RunConfig config;
  double in_mu = 0.0, in_sigma = 0.0;
  double out_mu = 0.0, out_sigma = 0.0;
  std::optional<CohensD> in_effect;   // paired against base, in-sample
  std::optional<CohensD> out_effect;  // paired against base, out-of-sample
  std::optional<double> p_value;      // Welch, in-sample vs out-of-sample
  bool partial = false;
};

using SweepGrid = std::vector<std::pair<std::string, std::vector<std::string>>>;

std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepGrid& grid,
                                const RunOptions& options = {});

/// Paired d over repetitions where both batches have a value.
std::optional<CohensD> paired_effect(const std::vector<double>& a, const std::vector<double>& b);

// Artifacts ------------------------------------------------------------------

/// config.cfg, summary.json, rep_XXX.csv, rep_XXX.json and
/// rep_XXX_agentI.ckpt under `dir`.
void write_batch(const BatchResult& batch, const RunConfig& cfg,
                 const std::filesystem::path& dir);

std::string batch_summary_json(const BatchResult& batch, const RunConfig& cfg);

/// Per-repetition checkpoints found in a batch directory. Throws
/// CheckpointError on corrupt files or dimension mismatch.
std::vector<std::vector<Checkpoint>> load_checkpoint_pool(
    const std::filesystem::path& dir, const std::optional<std::vector<int>>& expected_dims);

struct StoredBatch {
  std::string protocol;
  std::vector<RunSummary> runs;
  std::vector<double> per_run_mu;
};

/// Reads rep_XXX.json summaries; throws MissingArtifact if there are none.
StoredBatch read_batch(const std::filesystem::path& dir);

/// `<root>/<protocol>/<YYYYmmdd-HHMMSS>[-n]/`, created.
std::filesystem::path make_artifact_dir(const std::filesystem::path& root,
                                        const std::string& protocol);

/// Parallel map over [0, count) with at most `jobs` workers. Results are
/// placed by index, so output does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace pricelab
