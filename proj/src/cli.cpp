#include "pricelab/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pricelab/equilibria.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/stats.hpp"

namespace pricelab::cli {
namespace {

using Json = nlohmann::ordered_json;

std::string help_footer() {
  const RunConfig defaults;
  std::ostringstream text;
  text << "Configuration keys (set in --config files or with --set key=value):\n";
  for (const auto& field : config_fields()) {
    std::string value = field.get(defaults);
    if (value.empty()) value = "\"\"";
    text << "  " << std::left << std::setw(16) << field.key << std::setw(10) << value << ' '
         << field.help << '\n';
  }
  text << "\nExit codes: 0 ok, 1 usage, 2 invalid config, 3 runtime failure, 4 missing artifact\n";
  return text.str();
}

SweepGrid parse_grid(const std::vector<std::string>& specs) {
  SweepGrid grid;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw ConfigError("sweep grid entry '" + spec + "' is not key=v1,v2,...");
    }
    std::string key = spec.substr(0, eq);
    if (!is_config_key(key)) throw ConfigError("unknown configuration key '" + key + "'");
    std::vector<std::string> values;
    std::stringstream rest(spec.substr(eq + 1));
    for (std::string v; std::getline(rest, v, ',');) {
      if (!v.empty()) values.push_back(v);
    }
    grid.emplace_back(std::move(key), std::move(values));
  }
  return grid;
}

Json solution_json(const EquilibriumSolution& s) {
  return Json{{"prices", s.prices},
              {"quantities", s.quantities},
              {"deflated_profits", s.deflated_profits},
              {"foc_residual", s.foc_residual},
              {"iterations", s.iterations}};
}

Json maybe(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

ProgressFn progress_printer(std::ostream& err, int verbosity) {
  if (verbosity < 0) return {};
  auto lock = std::make_shared<std::mutex>();
  return [&err, lock](std::size_t index, std::size_t total, std::int64_t t, double recent) {
    std::ostringstream line;
    line << "rep " << index + 1 << '/' << total << " t=" << t << " ∇̄=";
    if (std::isnan(recent)) {
      line << "nan";
    } else {
      line << std::fixed << std::setprecision(2) << recent;
    }
    std::lock_guard<std::mutex> guard(*lock);
    err << line.str() << '\n';
  };
}

int report_failures(const BatchResult& batch, std::ostream& err) {
  if (batch.failures == 0) return kOk;
  err << batch.failures << " of " << batch.runs.size() << " repetitions failed\n";
  for (const auto& run : batch.runs) {
    if (run.summary.failed) {
      err << "  rep " << run.summary.repetition << ": " << run.summary.failure << '\n';
    }
  }
  return kRuntimeError;
}

void print_batch_line(const BatchResult& batch, const std::filesystem::path& dir,
                      std::ostream& out) {
  out << batch.protocol << ": mu=";
  if (batch.mu) {
    out << batch.mu->mu;
  } else {
    out << "undefined";
  }
  out << " sigma=" << batch.sigma << " runs=" << batch.runs.size();
  if (batch.protocol == "deviation") out << " punished=" << batch.punished;
  out << "\nartifacts: " << dir.string() << '\n';
}

int do_train(const Invocation& inv, std::ostream& out, std::ostream& err, bool deviate) {
  RunOptions options{inv.jobs, progress_printer(err, inv.verbosity)};
  const BatchResult batch =
      deviate ? run_deviation(inv.config, options) : run_in_sample(inv.config, options);
  const auto dir = make_artifact_dir(inv.config.output_dir, batch.protocol);
  write_batch(batch, inv.config, dir);
  print_batch_line(batch, dir, out);
  return report_failures(batch, err);
}

int do_eval(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const auto pool = load_checkpoint_pool(inv.from_dir, dqn_config(inv.config).layer_dims());
  RunOptions options{inv.jobs, progress_printer(err, inv.verbosity)};
  const BatchResult batch = run_out_of_sample(pool, inv.config, options);
  const auto dir = make_artifact_dir(inv.config.output_dir, batch.protocol);
  write_batch(batch, inv.config, dir);
  print_batch_line(batch, dir, out);
  return report_failures(batch, err);
}

int do_sweep(const Invocation& inv, std::ostream& out, std::ostream& err) {
  RunOptions options{inv.jobs, progress_printer(err, inv.verbosity)};
  const auto rows = run_sweep(inv.config, inv.grid, options);
  const auto dir = make_artifact_dir(inv.config.output_dir, "sweep");
  save_config_file(inv.config, dir / "config.cfg");

  std::ostringstream csv;
  csv << "label,in_mu,in_sigma,in_d,in_size,out_mu,out_sigma,out_d,out_size,p_value,partial\n";
  Json rows_json = Json::array();
  auto num = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  bool partial = false;
  for (const auto& row : rows) {
    partial = partial || row.partial;
    csv << row.label << ',' << num(row.in_mu) << ',' << num(row.in_sigma) << ','
        << (row.in_effect ? format_double(row.in_effect->d) : "") << ','
        << (row.in_effect ? std::string(to_string(row.in_effect->size)) : "") << ','
        << num(row.out_mu) << ',' << num(row.out_sigma) << ','
        << (row.out_effect ? format_double(row.out_effect->d) : "") << ','
        << (row.out_effect ? std::string(to_string(row.out_effect->size)) : "") << ','
        << (row.p_value ? format_double(*row.p_value) : "") << ',' << (row.partial ? 1 : 0)
        << '\n';
    Json r{{"label", row.label},
           {"in_mu", maybe(row.in_mu)},
           {"in_sigma", maybe(row.in_sigma)},
           {"out_mu", maybe(row.out_mu)},
           {"out_sigma", maybe(row.out_sigma)},
           {"p_value", row.p_value ? Json(*row.p_value) : Json(nullptr)},
           {"partial", row.partial}};
    if (row.in_effect) r["in_effect"] = {{"d", row.in_effect->d}, {"size", to_string(row.in_effect->size)}};
    if (row.out_effect) r["out_effect"] = {{"d", row.out_effect->d}, {"size", to_string(row.out_effect->size)}};
    rows_json.push_back(std::move(r));
  }
  write_text(dir / "sweep.csv", csv.str());
  write_text(dir / "sweep.json", rows_json.dump(2) + "\n");
  out << csv.str() << "artifacts: " << dir.string() << '\n';
  if (partial) {
    err << "some sweep cells are partial (failed repetitions or too few checkpoints)\n";
    return kRuntimeError;
  }
  return kOk;
}

int do_stats(const Invocation& inv, std::ostream& out) {
  std::vector<StoredBatch> batches;
  for (const auto& dir : inv.stats_dirs) batches.push_back(read_batch(dir));

  Json report;
  Json list = Json::array();
  for (std::size_t b = 0; b < batches.size(); ++b) {
    std::vector<double> finite;
    for (double v : batches[b].per_run_mu) {
      if (!std::isnan(v)) finite.push_back(v);
    }
    const double mu = finite.empty() ? std::nan("") : mean(finite);
    const double sigma = sample_stddev(finite);
    std::size_t punished = 0, classified = 0;
    for (const auto& run : batches[b].runs) {
      if (run.punishment) {
        ++classified;
        if (*run.punishment == Punishment::kPunishment) ++punished;
      }
    }
    out << inv.stats_dirs[b] << ": protocol=" << batches[b].protocol << " runs="
        << batches[b].runs.size() << " mu=" << mu << " sigma=" << sigma;
    Json entry{{"dir", inv.stats_dirs[b]},
               {"protocol", batches[b].protocol},
               {"runs", batches[b].runs.size()},
               {"mu", maybe(mu)},
               {"sigma", sigma}};
    if (classified > 0) {
      out << " punished=" << punished << '/' << classified;
      entry["punished"] = punished;
      entry["classified"] = classified;
    }
    out << '\n';
    list.push_back(std::move(entry));
  }
  report["batches"] = list;

  if (batches.size() == 2) {
    const auto effect = paired_effect(batches[0].per_run_mu, batches[1].per_run_mu);
    std::vector<double> a, b;
    for (double v : batches[0].per_run_mu) if (!std::isnan(v)) a.push_back(v);
    for (double v : batches[1].per_run_mu) if (!std::isnan(v)) b.push_back(v);
    const auto welch = welch_t_test(a, b);
    Json cmp;
    out << "comparison: ";
    if (effect) {
      out << "d=" << std::fixed << std::setprecision(4) << effect->d << std::defaultfloat << ' '
          << to_string(effect->size);
      cmp["d"] = effect->d;
      cmp["size"] = to_string(effect->size);
    } else {
      out << "d=undefined";
      cmp["d"] = nullptr;
    }
    if (welch) {
      out << " t=" << welch->t << " df=" << welch->df << " p=" << welch->p;
      cmp["t"] = welch->t;
      cmp["df"] = welch->df;
      cmp["p"] = welch->p;
    }
    out << '\n';
    report["comparison"] = cmp;
  }
  const auto dir = make_artifact_dir(inv.config.output_dir, "stats");
  write_text(dir / "stats.json", report.dump(2) + "\n");
  out << "artifacts: " << dir.string() << '\n';
  return kOk;
}

}  // namespace

std::string solve_eq_json(const RunConfig& cfg) {
  const MarketParams params = market_params(cfg);
  const MarketState state = MarketState::initial(params, cfg.k);
  const auto nash = solve_nash(state, params);
  const auto monopoly = solve_monopoly(state, params);
  Json j{{"cost", state.cost},
         {"price_index", state.price_index},
         {"nash", solution_json(nash)},
         {"monopoly", solution_json(monopoly)}};
  return j.dump(2);
}

ParseResult parse_and_validate(int argc, const char* const* argv, std::ostream& out,
                               std::ostream& err) {
  ParseResult result;
  Invocation& inv = result.invocation;

  CLI::App app{"Algorithmic pricing under inflation: DQN agents in a logit Bertrand market"};
  app.footer(help_footer());
  app.require_subcommand(1);
  app.set_version_flag("--version", "pricelab 0.1.0");

  bool quiet = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", inv.config_path, "Config file (key=value lines)");
    sub->add_option("-s,--set", inv.overrides, "Override key=value (repeatable)")
        ->take_all()
        ->allow_extra_args(false);
    sub->add_option("-o,--out", inv.output_dir, "Artifact root directory");
    sub->add_option("-j,--jobs", inv.jobs, "Concurrent repetitions")->check(CLI::PositiveNumber);
    sub->add_flag("-v,--verbose", inv.verbosity, "More output");
    sub->add_flag("-q,--quiet", quiet, "No progress lines");
    sub->footer(help_footer());
  };

  auto* run = app.add_subcommand("run", "Train agents jointly (in-sample)");
  add_common(run);
  auto* eval = app.add_subcommand("eval", "Pair frozen agents from distinct training runs");
  add_common(eval);
  eval->add_option("--from", inv.from_dir, "Training batch directory")->required();
  auto* deviate = app.add_subcommand("deviate", "Train, then force agent 0 to the Nash price");
  add_common(deviate);
  auto* sweep = app.add_subcommand("sweep", "One-at-a-time parameter variations");
  add_common(sweep);
  std::vector<std::string> grid_specs;
  sweep->add_option("--grid", grid_specs, "key=v1,v2,... (repeatable)")->required();
  auto* stats = app.add_subcommand("stats", "Summarize stored batches without re-simulating");
  add_common(stats);
  stats->add_option("--in", inv.stats_dirs, "Batch directory (one or two)")
      ->required()
      ->expected(1, 2);
  auto* solve = app.add_subcommand("solve-eq", "Print Nash and monopoly benchmarks as JSON");
  add_common(solve);

  if (argc > 1 && argv[1][0] != '-') {
    const std::string name = argv[1];
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == name;
    if (!known) {
      err << "error: unknown subcommand '" << name << "'\nRun with --help for more information.\n";
      result.exit_code = kUsage;
      return result;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    result.exit_code = app.exit(e, out, err);
    result.handled = true;
    return result;
  } catch (const CLI::CallForVersion& e) {
    result.exit_code = app.exit(e, out, err);
    result.handled = true;
    return result;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    result.exit_code = kUsage;
    return result;
  }
  inv.subcommand = app.get_subcommands().front()->get_name();
  if (quiet) inv.verbosity = -1;

  try {
    if (inv.config_path.empty() && inv.subcommand == "eval") {
      const auto stored = std::filesystem::path(inv.from_dir) / "config.cfg";
      if (std::filesystem::exists(stored)) inv.config_path = stored.string();
    }
    inv.config = inv.config_path.empty() ? RunConfig{} : load_config_file(inv.config_path);
    for (const auto& o : inv.overrides) apply_override(inv.config, o);
    if (!inv.output_dir.empty()) inv.config.output_dir = inv.output_dir;
    if (inv.subcommand == "run") inv.config.protocol = "in_sample";
    if (inv.subcommand == "eval") inv.config.protocol = "out_of_sample";
    if (inv.subcommand == "deviate") inv.config.protocol = "deviation";
    if (inv.subcommand == "sweep") inv.grid = parse_grid(grid_specs);
    validate(inv.config);
  } catch (const MissingArtifact& e) {
    err << "error: " << e.what() << '\n';
    result.exit_code = kMissingArtifact;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    result.exit_code = kConfigError;
  }
  return result;
}

int dispatch(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    if (inv.subcommand == "run") return do_train(inv, out, err, false);
    if (inv.subcommand == "deviate") return do_train(inv, out, err, true);
    if (inv.subcommand == "eval") return do_eval(inv, out, err);
    if (inv.subcommand == "sweep") return do_sweep(inv, out, err);
    if (inv.subcommand == "stats") return do_stats(inv, out);
    if (inv.subcommand == "solve-eq") {
      out << solve_eq_json(inv.config) << '\n';
      return kOk;
    }
    err << "error: unknown subcommand '" << inv.subcommand << "'\n";
    return kUsage;
  } catch (const MissingArtifact& e) {
    err << "error: " << e.what() << '\n';
    return kMissingArtifact;
  } catch (const PoolTooSmall& e) {
    err << "error: " << e.what() << '\n';
    return kMissingArtifact;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const CheckpointError& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == CheckpointError::Kind::kIo ? kMissingArtifact : kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ParseResult parsed = parse_and_validate(argc, argv, out, err);
  if (parsed.handled || parsed.exit_code != kOk) return parsed.exit_code;
  return dispatch(parsed.invocation, out, err);
}

}  // namespace pricelab::cli
