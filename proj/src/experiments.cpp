#include "pricelab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <regex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pricelab/dqn_agent.hpp"
#include "pricelab/equilibria.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/pricing_env.hpp"

namespace pricelab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct EpisodeSpec {
  std::string stream;  // seed namespace: "train" or "eval"
  std::size_t index = 0;
  std::int64_t steps = 0;
  bool learning = true;
  std::optional<std::int64_t> deviation_step;
  std::vector<const Checkpoint*> frozen;  // one per agent when !learning
  std::vector<std::size_t> sources;
};

std::string stream_name(const std::string& base, const char* what, int agent = -1) {
  std::string name = base + "." + what;
  if (agent >= 0) name += "." + std::to_string(agent);
  return name;
}

RunRecord simulate(const RunConfig& cfg, const std::vector<InflationSeries>& pool,
                   const EpisodeSpec& spec, std::size_t total, const RunOptions& options) {
  const MarketParams params = market_params(cfg);
  const EnvConfig env_cfg = env_config(cfg);
  const DqnConfig dqn_cfg = dqn_config(cfg);
  const std::uint64_t seed = cfg.master_seed;
  const std::size_t n = static_cast<std::size_t>(cfg.n_agents);

  RunRecord record;
  RunSummary& summary = record.summary;
  summary.repetition = spec.index;
  summary.steps = spec.steps;
  summary.source_repetitions = spec.sources;

  Rng series_rng(derive_seed(seed, stream_name(spec.stream, "series"), spec.index));
  const InflationSeries& series = pool[series_rng.uniform_index(pool.size())];
  summary.series = series.country;
  summary.synthetic_series = series.synthetic;

  std::vector<DqnAgent> agents;
  agents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = static_cast<int>(i);
    AgentSeeds seeds{derive_seed(seed, stream_name(spec.stream, "init", a), spec.index),
                     derive_seed(seed, stream_name(spec.stream, "explore", a), spec.index),
                     derive_seed(seed, stream_name(spec.stream, "replay", a), spec.index)};
    agents.emplace_back(dqn_cfg, seeds);
    if (!spec.learning) agents.back().load_weights(spec.frozen.at(i)->to_network());
  }

  Rng warmup_rng(derive_seed(seed, stream_name(spec.stream, "warmup"), spec.index));
  Rng shock_rng(derive_seed(seed, stream_name(spec.stream, "shocks"), spec.index));

  const MarketState initial = MarketState::initial(params, env_cfg.memory);
  const EquilibriumSolution nash0 = solve_nash(initial, params);
  const EquilibriumSolution monopoly0 = solve_monopoly(initial, params);

  ResetResult reset = reset_and_warmup(
      params, env_cfg, InflationProcess(cfg.rho, series.rates), warmup_rng, shock_rng);
  EnvState state = std::move(reset.state);
  Observation obs = std::move(reset.observation);
  ForcedEquilibriumPath path(nash0, monopoly0);
  path.growth_factor = state.market.price_index;

  std::vector<double> nabla_full;
  nabla_full.reserve(static_cast<std::size_t>(spec.steps));
  bool all_defined = true;
  std::vector<int> responder_actions;
  std::vector<int> actions(n);
  double progress_sum = 0.0;
  std::int64_t progress_count = 0;

  try {
    for (std::int64_t s = 0; s < spec.steps; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        actions[i] = spec.learning ? agents[i].act(obs, s) : agents[i].greedy_action(obs);
      }
      if (spec.deviation_step && s == *spec.deviation_step) {
        const auto nash_now = solve_nash(state.market, params);
        actions[0] = nearest_margin_index(nash_now.prices[0], state.market.cost, params);
        summary.deviation_action = actions[0];
      }

      StepOutcome out = env_step(state, actions, params, env_cfg, shock_rng);
      const BenchmarkProfits fixed = static_benchmark_profits(state.market, nash0, monopoly0, params);
      const BenchmarkProfits forced = forced_benchmark_profits(state.market, path, params);
      const double mean_reward =
          std::accumulate(out.rewards.begin(), out.rewards.end(), 0.0) / static_cast<double>(n);
      const MetricRow row =
          make_metric_row(s, mean_reward, fixed.nash, fixed.monopoly, forced.nash, forced.monopoly);
      path.advance(out.omega);

      if (spec.learning) {
        for (std::size_t i = 0; i < n; ++i) {
          agents[i].remember({obs, actions[i], out.rewards[i], out.next_observation});
          for (int g = 0; g < cfg.gradient_steps; ++g) agents[i].learn();
        }
      }

      if (row.nabla) {
        summary.nabla_sum += *row.nabla;
        ++summary.nabla_defined;
        nabla_full.push_back(*row.nabla);
        progress_sum += *row.nabla;
        ++progress_count;
      } else {
        ++summary.nabla_undefined;
        all_defined = false;
        nabla_full.push_back(kNaN);
      }
      if (!row.delta) ++summary.delta_undefined;
      if (out.omega != 0.0) ++summary.shocks;
      if (n > 1) responder_actions.push_back(actions[1]);

      if (keep_log_row(s, spec.steps, cfg.log_stride, out.omega != 0.0, spec.deviation_step)) {
        StepLog log;
        log.t = s;
        log.omega = out.omega;
        log.cost = out.cost;
        log.price_index = out.price_index;
        log.actions = actions;
        log.prices = out.prices;
        log.quantities = out.quantities;
        log.rewards = out.rewards;
        log.delta = row.delta;
        log.nabla = row.nabla;
        record.log.push_back(std::move(log));
      }

      obs = std::move(out.next_observation);
      state = std::move(out.next);

      if (options.progress && options.progress_every > 0 &&
          (s + 1) % options.progress_every == 0) {
        options.progress(spec.index, total, s + 1,
                         progress_count > 0 ? progress_sum / static_cast<double>(progress_count)
                                            : kNaN);
        progress_sum = 0.0;
        progress_count = 0;
      }
    }
  } catch (const SeriesExhausted& e) {
    summary.failed = true;
    summary.failure = e.what();
  }

  summary.mu = summary.nabla_defined > 0
                   ? summary.nabla_sum / static_cast<double>(summary.nabla_defined)
                   : kNaN;
  const std::size_t tail = std::min<std::size_t>(nabla_full.size(), kFinalWindow);
  double tail_sum = 0.0;
  std::size_t tail_count = 0;
  for (std::size_t i = nabla_full.size() - tail; i < nabla_full.size(); ++i) {
    if (!std::isnan(nabla_full[i])) {
      tail_sum += nabla_full[i];
      ++tail_count;
    }
  }
  summary.final_window_nabla = tail_count > 0 ? tail_sum / static_cast<double>(tail_count) : kNaN;
  if (all_defined && !summary.failed) summary.time_to_supra = time_to_supra(nabla_full);
  if (spec.deviation_step && !summary.failed && n > 1) {
    summary.punishment =
        punishment_classify(responder_actions, static_cast<std::size_t>(*spec.deviation_step));
  }
  if (spec.learning) {
    const std::uint64_t digest = config_digest(cfg);
    for (const auto& agent : agents) record.agents.push_back(Checkpoint::from_agent(agent, digest));
  }
  return record;
}

BatchResult aggregate(std::string protocol, std::vector<RunRecord> runs) {
  BatchResult batch;
  batch.protocol = std::move(protocol);
  MuStatistic mu;
  double total = 0.0;
  std::vector<double> ok;
  for (const auto& run : runs) {
    const auto& s = run.summary;
    if (s.failed) {
      ++batch.failures;
      batch.per_run_mu.push_back(kNaN);
      continue;
    }
    batch.per_run_mu.push_back(s.mu);
    if (!std::isnan(s.mu)) ok.push_back(s.mu);
    total += s.nabla_sum;
    mu.used += s.nabla_defined;
    mu.excluded += s.nabla_undefined;
    if (s.punishment == Punishment::kPunishment) ++batch.punished;
  }
  if (mu.used > 0) {
    mu.mu = total / static_cast<double>(mu.used);
    batch.mu = mu;
  }
  batch.sigma = sample_stddev(ok);
  batch.runs = std::move(runs);
  return batch;
}

BatchResult run_training(const RunConfig& cfg, const RunOptions& options, bool deviate) {
  validate(cfg);
  if (deviate && cfg.deviation_step + 5 >= cfg.timesteps) {
    throw ConfigError("timesteps must exceed deviation_step + 5");
  }
  const auto pool = resolve_series_pool(cfg, cfg.timesteps);
  validate_series_length(cfg, pool, cfg.timesteps);
  const auto reps = static_cast<std::size_t>(cfg.repetitions);
  std::vector<RunRecord> runs(reps);
  parallel_for(reps, options.jobs, [&](std::size_t r) {
    EpisodeSpec spec;
    spec.stream = "train";
    spec.index = r;
    spec.steps = cfg.timesteps;
    spec.learning = true;
    if (deviate) spec.deviation_step = cfg.deviation_step;
    runs[r] = simulate(cfg, pool, spec, reps, options);
  });
  return aggregate(deviate ? "deviation" : "in_sample", std::move(runs));
}

}  // namespace

std::vector<InflationSeries> resolve_series_pool(const RunConfig& cfg, std::int64_t steps) {
  if (!cfg.inflation_csv.empty()) return load_inflation_csv(cfg.inflation_csv);
  return synthetic_pool(cfg.rho, steps + cfg.k, derive_seed(cfg.master_seed, "synthetic_pool"));
}

void validate_series_length(const RunConfig& cfg, const std::vector<InflationSeries>& pool,
                            std::int64_t steps) {
  if (pool.empty()) throw ConfigError("no inflation series available");
  if (cfg.rho <= 0.0) return;
  const std::size_t need = required_series_length(cfg.rho, steps + cfg.k);
  for (const auto& s : pool) {
    if (s.rates.size() < need) {
      throw ConfigError("inflation series '" + s.country + "' has " +
                        std::to_string(s.rates.size()) + " values; rho=" +
                        format_double(cfg.rho) + " over " + std::to_string(steps + cfg.k) +
                        " steps needs " + std::to_string(need));
    }
  }
}

int nearest_margin_index(double price, double cost, const MarketParams& params) {
  const auto grid = margin_grid(params);
  int best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double gap = std::abs(price_from_margin(cost, grid[a]) - price);
    if (gap < best_gap) {
      best_gap = gap;
      best = static_cast<int>(a);
    }
  }
  return best;
}

bool keep_log_row(std::int64_t t, std::int64_t steps, int stride, bool shock,
                  std::optional<std::int64_t> deviation_step) {
  if (stride <= 1 || shock) return true;
  if (t < 5000 || t >= steps - 5000) return true;
  if (deviation_step && std::abs(t - *deviation_step) <= 100) return true;
  return t % stride == 0;
}

BatchResult run_in_sample(const RunConfig& cfg, const RunOptions& options) {
  return run_training(cfg, options, false);
}

BatchResult run_deviation(const RunConfig& cfg, const RunOptions& options) {
  return run_training(cfg, options, true);
}

BatchResult run_out_of_sample(const std::vector<std::vector<Checkpoint>>& pool,
                              const RunConfig& cfg, const RunOptions& options) {
  validate(cfg);
  const auto n = static_cast<std::size_t>(cfg.n_agents);
  const auto expected = dqn_config(cfg).layer_dims();
  std::vector<std::size_t> usable;
  for (std::size_t r = 0; r < pool.size(); ++r) {
    if (pool[r].size() < n) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (pool[r][i].dims != expected) {
        throw ConfigError("checkpoint of repetition " + std::to_string(r) +
                          " does not match the configured network");
      }
    }
    usable.push_back(r);
  }
  if (usable.size() < std::max<std::size_t>(n, 2)) {
    throw PoolTooSmall("out-of-sample evaluation needs checkpoints from at least " +
                       std::to_string(std::max<std::size_t>(n, 2)) +
                       " distinct repetitions; found " + std::to_string(usable.size()));
  }
  const auto series_pool = resolve_series_pool(cfg, cfg.eval_timesteps);
  validate_series_length(cfg, series_pool, cfg.eval_timesteps);

  const auto pairings = static_cast<std::size_t>(cfg.repetitions);
  std::vector<RunRecord> runs(pairings);
  parallel_for(pairings, options.jobs, [&](std::size_t j) {
    Rng pairing_rng(derive_seed(cfg.master_seed, "eval.pairing", j));
    std::vector<std::size_t> candidates = usable;
    EpisodeSpec spec;
    spec.stream = "eval";
    spec.index = j;
    spec.steps = cfg.eval_timesteps;
    spec.learning = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pick = i + pairing_rng.uniform_index(candidates.size() - i);
      std::swap(candidates[i], candidates[pick]);
      spec.sources.push_back(candidates[i]);
      spec.frozen.push_back(&pool[candidates[i]][i]);
    }
    runs[j] = simulate(cfg, series_pool, spec, pairings, options);
  });
  return aggregate("out_of_sample", std::move(runs));
}

std::optional<CohensD> paired_effect(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> xa, xb;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (std::isnan(a[i]) || std::isnan(b[i])) continue;
    xa.push_back(a[i]);
    xb.push_back(b[i]);
  }
  if (xa.size() < 2) return std::nullopt;
  return cohens_d(xa, xb);
}

namespace {

std::vector<double> finite_only(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) {
    if (!std::isnan(x)) out.push_back(x);
  }
  return out;
}

std::vector<std::vector<Checkpoint>> checkpoint_pool(const BatchResult& batch) {
  std::vector<std::vector<Checkpoint>> pool;
  for (const auto& run : batch.runs) {
    pool.push_back(run.summary.failed ? std::vector<Checkpoint>{} : run.agents);
  }
  return pool;
}

}  // namespace

std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepGrid& grid,
                                const RunOptions& options) {
  std::vector<std::pair<std::string, RunConfig>> cells{{"base", base}};
  for (const auto& [key, values] : grid) {
    if (!is_config_key(key)) throw ConfigError("unknown configuration key '" + key + "'");
    for (const auto& value : values) {
      RunConfig cfg = base;
      apply_override(cfg, key + "=" + value);
      validate(cfg);
      validate_series_length(cfg, resolve_series_pool(cfg, cfg.timesteps), cfg.timesteps);
      cells.emplace_back(key + "=" + value, std::move(cfg));
    }
  }

  std::vector<SweepRow> rows;
  std::vector<double> base_in, base_out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& [label, cfg] = cells[c];
    SweepRow row;
    row.label = label;
    row.config = cfg;
    const BatchResult in = run_in_sample(cfg, options);
    row.in_mu = in.mu ? in.mu->mu : kNaN;
    row.in_sigma = in.sigma;
    row.partial = in.failures > 0;
    std::vector<double> out_mu;
    try {
      const BatchResult out = run_out_of_sample(checkpoint_pool(in), cfg, options);
      row.out_mu = out.mu ? out.mu->mu : kNaN;
      row.out_sigma = out.sigma;
      row.partial = row.partial || out.failures > 0;
      out_mu = out.per_run_mu;
    } catch (const PoolTooSmall&) {
      row.out_mu = kNaN;
      row.partial = true;
    }
    if (c == 0) {
      base_in = in.per_run_mu;
      base_out = out_mu;
    } else {
      row.in_effect = paired_effect(in.per_run_mu, base_in);
      row.out_effect = paired_effect(out_mu, base_out);
    }
    const auto a = finite_only(in.per_run_mu);
    const auto b = finite_only(out_mu);
    if (auto welch = welch_t_test(a, b)) row.p_value = welch->p;
    rows.push_back(std::move(row));
  }
  return rows;
}

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Artifacts ------------------------------------------------------------------

namespace {

std::string rep_name(std::size_t r) {
  std::ostringstream name;
  name << "rep_" << std::setw(3) << std::setfill('0') << r;
  return name.str();
}

nlohmann::ordered_json config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  for (const auto& f : config_fields()) j[std::string(f.key)] = f.get(cfg);
  j["overrides"] = cfg.overrides;
  return j;
}

nlohmann::ordered_json nullable(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

std::string batch_summary_json(const BatchResult& batch, const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["protocol"] = batch.protocol;
  j["config"] = config_json(cfg);
  j["repetitions"] = batch.runs.size();
  j["mu"] = batch.mu ? nlohmann::ordered_json(batch.mu->mu) : nullptr;
  j["sigma"] = batch.sigma;
  j["undefined_nabla"] = batch.mu ? batch.mu->excluded : 0;
  std::size_t undefined_delta = 0;
  std::vector<double> supra;
  nlohmann::ordered_json per_run = nlohmann::ordered_json::array();
  nlohmann::ordered_json supra_runs = nlohmann::ordered_json::array();
  for (const auto& run : batch.runs) {
    undefined_delta += run.summary.delta_undefined;
    if (run.summary.time_to_supra) {
      supra.push_back(static_cast<double>(*run.summary.time_to_supra));
      supra_runs.push_back(*run.summary.time_to_supra);
    } else {
      supra_runs.push_back(nullptr);
    }
  }
  for (double v : batch.per_run_mu) per_run.push_back(nullable(v));
  j["undefined_delta"] = undefined_delta;
  j["per_run_mu"] = per_run;
  j["time_to_supra"] = supra_runs;
  j["mean_time_to_supra"] = supra.empty() ? nlohmann::ordered_json(nullptr)
                                          : nlohmann::ordered_json(mean(supra));
  if (batch.protocol == "deviation") {
    j["punishment"] = {{"with_punishment", batch.punished},
                       {"without_punishment", batch.runs.size() - batch.failures - batch.punished},
                       {"proportion", batch.runs.size() > batch.failures
                                          ? static_cast<double>(batch.punished) /
                                                static_cast<double>(batch.runs.size() - batch.failures)
                                          : 0.0}};
  }
  j["failures"] = batch.failures;
  return j.dump(2);
}

void write_batch(const BatchResult& batch, const RunConfig& cfg,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_config_file(cfg, dir / "config.cfg");
  {
    std::ofstream out(dir / "summary.json");
    out << batch_summary_json(batch, cfg) << '\n';
  }
  for (std::size_t r = 0; r < batch.runs.size(); ++r) {
    const auto& run = batch.runs[r];
    const std::string name = rep_name(r);
    {
      std::ofstream out(dir / (name + ".csv"));
      write_run_csv(out, run.log, cfg.n_agents);
    }
    {
      std::ofstream out(dir / (name + ".json"));
      out << summary_to_json(run.summary) << '\n';
    }
    for (std::size_t i = 0; i < run.agents.size(); ++i) {
      save_checkpoint(run.agents[i], dir / (name + "_agent" + std::to_string(i) + ".ckpt"));
    }
  }
}

std::vector<std::vector<Checkpoint>> load_checkpoint_pool(
    const std::filesystem::path& dir, const std::optional<std::vector<int>>& expected_dims) {
  if (!std::filesystem::is_directory(dir)) {
    throw MissingArtifact("not a directory: " + dir.string());
  }
  static const std::regex pattern(R"(rep_(\d+)_agent(\d+)\.ckpt)");
  std::vector<std::vector<Checkpoint>> pool;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::smatch m;
    const std::string name = file.filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    const auto rep = static_cast<std::size_t>(std::stoul(m[1]));
    const auto agent = static_cast<std::size_t>(std::stoul(m[2]));
    if (pool.size() <= rep) pool.resize(rep + 1);
    if (pool[rep].size() <= agent) pool[rep].resize(agent + 1);
    pool[rep][agent] = load_checkpoint(file, expected_dims);
  }
  return pool;
}

StoredBatch read_batch(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw MissingArtifact("not a directory: " + dir.string());
  }
  static const std::regex pattern(R"(rep_(\d+)\.json)");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (std::regex_match(entry.path().filename().string(), pattern)) files.push_back(entry.path());
  }
  if (files.empty()) throw MissingArtifact("no run summaries in " + dir.string());
  std::sort(files.begin(), files.end());
  StoredBatch batch;
  for (const auto& file : files) {
    std::ifstream in(file);
    std::stringstream text;
    text << in.rdbuf();
    RunSummary s = summary_from_json(text.str());
    batch.per_run_mu.push_back(s.failed || s.nabla_defined == 0 ? kNaN : s.mu);
    batch.runs.push_back(std::move(s));
  }
  std::ifstream summary(dir / "summary.json");
  if (summary) {
    const auto j = nlohmann::json::parse(summary, nullptr, false);
    if (!j.is_discarded() && j.contains("protocol")) batch.protocol = j["protocol"].get<std::string>();
  }
  return batch;
}

std::filesystem::path make_artifact_dir(const std::filesystem::path& root,
                                        const std::string& protocol) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream stamp;
  stamp << std::put_time(&tm, "%Y%m%d-%H%M%S");
  std::filesystem::path dir = root / protocol / stamp.str();
  for (int suffix = 1; std::filesystem::exists(dir); ++suffix) {
    dir = root / protocol / (stamp.str() + "-" + std::to_string(suffix));
  }
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace pricelab
