#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "pricelab/equilibria.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/experiments.hpp"
#include "pricelab/rng.hpp"

using namespace pricelab;
namespace fs = std::filesystem;

namespace {

RunConfig tiny(std::int64_t steps = 1000) {
  RunConfig c;
  c.timesteps = steps;
  c.eval_timesteps = 300;
  c.h = 16;
  c.batch_size = 32;
  c.repetitions = 2;
  c.log_stride = 1;
  c.beta = 0.005;
  c.master_seed = 17;
  return c;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("pricelab_exp_" + std::to_string(Rng(std::random_device{}()).next()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void check_same_runs(const BatchResult& a, const BatchResult& b) {
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t r = 0; r < a.runs.size(); ++r) {
    CHECK(a.runs[r].summary == b.runs[r].summary);
    CHECK(a.runs[r].log == b.runs[r].log);
    CHECK(a.runs[r].agents == b.runs[r].agents);
  }
}

}  // namespace

TEST_CASE("nearest margin index for the base Nash price") {
  MarketParams params;
  const auto nash = solve_nash(MarketState::initial(params, 1), params);
  const int got = nearest_margin_index(nash.prices[0], 1.0, params);
  // Independent scan over the grid formula.
  int want = 0;
  double best = 1e9;
  for (int a = 0; a < 15; ++a) {
    const double price = 1.0 + (-0.5 + a * 2.5 / 14.0);
    if (std::abs(price - nash.prices[0]) < best) {
      best = std::abs(price - nash.prices[0]);
      want = a;
    }
  }
  CHECK(got == want);
  CHECK(got == 5);
  // Cost scaling carries through.
  CHECK(nearest_margin_index(2.0 * nash.prices[0], 2.0, params) == 5);
}

TEST_CASE("log thinning keeps the documented rows") {
  CHECK(keep_log_row(10, 100000, 1, false, std::nullopt));
  CHECK(keep_log_row(4999, 100000, 10, false, std::nullopt));
  CHECK_FALSE(keep_log_row(5001, 100000, 10, false, std::nullopt));
  CHECK(keep_log_row(5010, 100000, 10, false, std::nullopt));
  CHECK(keep_log_row(5001, 100000, 10, true, std::nullopt));
  CHECK(keep_log_row(95001, 100000, 10, false, std::nullopt));
  CHECK(keep_log_row(50051, 100000, 10, false, 50000));
  CHECK_FALSE(keep_log_row(50151, 100000, 10, false, 50000));
}

TEST_CASE("series shorter than the expected shock count are rejected") {
  RunConfig c;
  std::vector<InflationSeries> pool{{"Short", std::vector<double>(192, 0.002), false}};
  CHECK_THROWS_AS(validate_series_length(c, pool, 400000), ConfigError);
  // 400000 steps plus one warm-up step need ceil(400.001 + 3 sqrt(400.001)) values.
  pool[0].rates.resize(460);
  CHECK_THROWS_AS(validate_series_length(c, pool, 400000), ConfigError);
  pool[0].rates.resize(461);
  CHECK_NOTHROW(validate_series_length(c, pool, 400000));
  c.rho = 0.0;
  pool[0].rates.clear();
  CHECK_NOTHROW(validate_series_length(c, pool, 400000));
  CHECK_THROWS_AS(validate_series_length(c, {}, 10), ConfigError);
}

TEST_CASE("without inflation delta equals nabla at every step") {
  RunConfig c = tiny();
  c.rho = 0.0;
  const auto batch = run_in_sample(c);
  REQUIRE(batch.runs.size() == 2);
  for (const auto& run : batch.runs) {
    CHECK(run.log.size() == 1000);
    CHECK(run.summary.shocks == 0);
    for (const auto& row : run.log) {
      REQUIRE(row.delta.has_value());
      REQUIRE(*row.delta == *row.nabla);
    }
  }
}

TEST_CASE("in-sample runs are reproducible and independent of job count") {
  const RunConfig c = tiny();
  const auto a = run_in_sample(c);
  const auto b = run_in_sample(c);
  check_same_runs(a, b);
  RunOptions par;
  par.jobs = 4;
  check_same_runs(a, run_in_sample(c, par));
  RunConfig other = c;
  other.master_seed = 18;
  CHECK_FALSE(run_in_sample(other).runs[0].log == a.runs[0].log);
}

TEST_CASE("in-sample summaries are consistent with the log") {
  RunConfig c = tiny();
  c.rho = 0.05;
  const auto batch = run_in_sample(c);
  for (const auto& run : batch.runs) {
    const auto& s = run.summary;
    CHECK_FALSE(s.failed);
    CHECK(s.nabla_defined + s.nabla_undefined == 1000);
    double sum = 0.0;
    std::size_t shocks = 0;
    for (const auto& row : run.log) {
      if (row.nabla) sum += *row.nabla;
      if (row.omega != 0.0) ++shocks;
      // Deflated benchmarks make the price index and cost move together.
      REQUIRE(row.cost == doctest::Approx(row.price_index).epsilon(1e-12));
    }
    CHECK(s.shocks == shocks);
    CHECK(shocks > 20);
    CHECK(s.nabla_sum == doctest::Approx(sum).epsilon(1e-12));
    CHECK(s.mu == doctest::Approx(sum / 1000.0).epsilon(1e-12));
    REQUIRE(run.agents.size() == 2);
    CHECK(run.agents[0].training_steps == 1000 - 31);
  }
  CHECK(batch.mu.has_value());
}

TEST_CASE("a series too short for the horizon fails the repetition") {
  TempDir dir;
  const fs::path csv = dir.path / "cpi.csv";
  {
    std::ofstream out(csv);
    out << "country,month,rate_percent\nA,2000-01,0.5\nA,2000-02,0.5\n";
  }
  RunConfig c = tiny();
  c.rho = 0.5;
  c.inflation_csv = csv.string();
  CHECK_THROWS_AS(run_in_sample(c), ConfigError);
}

TEST_CASE("deviation forces the Nash-nearest action and classifies the response") {
  RunConfig c = tiny(1200);
  c.deviation_step = 1000;
  const auto batch = run_deviation(c);
  CHECK(batch.protocol == "deviation");
  for (const auto& run : batch.runs) {
    REQUIRE(run.summary.deviation_action.has_value());
    CHECK(*run.summary.deviation_action == 5);
    CHECK(run.summary.punishment.has_value());
    bool found = false;
    for (const auto& row : run.log) {
      if (row.t == 1000) {
        found = true;
        CHECK(row.actions[0] == 5);
      }
    }
    CHECK(found);
  }
  c.deviation_step = 1198;
  CHECK_THROWS_AS(run_deviation(c), ConfigError);
}

TEST_CASE("out-of-sample evaluation") {
  RunConfig c = tiny();
  c.repetitions = 3;
  const auto train = run_in_sample(c);
  std::vector<std::vector<Checkpoint>> pool;
  for (const auto& run : train.runs) pool.push_back(run.agents);

  RunConfig e = c;
  e.repetitions = 4;
  const auto a = run_out_of_sample(pool, e);
  const auto b = run_out_of_sample(pool, e);
  check_same_runs(a, b);
  for (const auto& run : a.runs) {
    REQUIRE(run.summary.source_repetitions.size() == 2);
    CHECK(run.summary.source_repetitions[0] != run.summary.source_repetitions[1]);
    CHECK(run.summary.steps == 300);
    CHECK(run.log.size() == 300);
    CHECK(run.agents.empty());
  }

  CHECK_THROWS_AS(run_out_of_sample({pool[0]}, e), PoolTooSmall);
  CHECK_THROWS_AS(run_out_of_sample({}, e), PoolTooSmall);
  RunConfig wider = e;
  wider.h = 32;
  CHECK_THROWS_AS(run_out_of_sample(pool, wider), ConfigError);
}

TEST_CASE("sweeps vary one key at a time") {
  RunConfig c = tiny(400);
  c.repetitions = 2;
  CHECK(run_sweep(c, {}).size() == 1);
  const auto rows = run_sweep(c, {{"rho", {"0.02", "0.05"}}});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].label == "base");
  CHECK(rows[1].label == "rho=0.02");
  CHECK(rows[2].config.rho == 0.05);
  CHECK(rows[1].in_effect.has_value());
  CHECK_THROWS_AS(run_sweep(c, {{"bogus_key", {"1"}}}), ConfigError);
  CHECK_THROWS_AS(run_sweep(c, {{"h", {"0"}}}), ConfigError);
}

TEST_CASE("paired effect skips missing repetitions") {
  const double nan = std::nan("");
  const auto d = paired_effect({1.0, nan, 3.0, 4.0}, {0.0, 5.0, 1.0, 1.5});
  REQUIRE(d.has_value());
  const auto direct = cohens_d(std::vector<double>{1.0, 3.0, 4.0}, std::vector<double>{0.0, 1.0, 1.5});
  CHECK(d->d == direct->d);
  CHECK_FALSE(paired_effect({1.0, nan}, {1.0, 2.0}).has_value());
}

TEST_CASE("batch artifacts round-trip") {
  TempDir dir;
  RunConfig c = tiny(300);
  const auto batch = run_in_sample(c);
  const fs::path out = make_artifact_dir(dir.path, "in_sample");
  CHECK(out.parent_path() == dir.path / "in_sample");
  CHECK(make_artifact_dir(dir.path, "in_sample") != out);
  write_batch(batch, c, out);
  for (const char* name : {"config.cfg", "summary.json", "rep_000.csv", "rep_001.json", "rep_001_agent1.ckpt"}) {
    CHECK(fs::exists(out / name));
  }
  CHECK(load_config_file(out / "config.cfg").master_seed == 17);

  const auto stored = read_batch(out);
  CHECK(stored.protocol == "in_sample");
  REQUIRE(stored.runs.size() == 2);
  CHECK(stored.runs[1] == batch.runs[1].summary);
  CHECK(stored.per_run_mu == batch.per_run_mu);

  const auto pool = load_checkpoint_pool(out, dqn_config(c).layer_dims());
  REQUIRE(pool.size() == 2);
  CHECK(pool[1] == batch.runs[1].agents);

  CHECK_THROWS_AS(read_batch(dir.path / "nothing"), MissingArtifact);
  fs::create_directories(dir.path / "empty");
  CHECK_THROWS_AS(read_batch(dir.path / "empty"), MissingArtifact);
  CHECK(load_checkpoint_pool(dir.path / "empty", std::nullopt).empty());
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 8, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw InvalidInput("boom"); }),
                  InvalidInput);
}
