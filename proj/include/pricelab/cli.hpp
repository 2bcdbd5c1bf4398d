#pragma once

// Command-line front end. Parsing and dispatch are separate so tests can
// check argument handling without running a protocol.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pricelab/config.hpp"
#include "pricelab/experiments.hpp"

namespace pricelab::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfigError = 2,
  kRuntimeError = 3,
  kMissingArtifact = 4,
};

struct Invocation {
  std::string subcommand;  // run, eval, deviate, sweep, stats, solve-eq
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;  // empty: cfg.output_dir
  std::size_t jobs = 1;
  int verbosity = 0;  // -1 with --quiet
  std::string from_dir;                // eval
  std::vector<std::string> stats_dirs;  // stats
  SweepGrid grid;                       // sweep
  RunConfig config;                     // resolved
};

struct ParseResult {
  int exit_code = kOk;
  bool handled = false;  // --help or --version already printed
  Invocation invocation;
};

/// Parses argv, loads the config file and applies overrides. Diagnostics go
/// to `err`; a nonzero exit_code means nothing should run.
ParseResult parse_and_validate(int argc, const char* const* argv, std::ostream& out,
                               std::ostream& err);

int dispatch(const Invocation& invocation, std::ostream& out, std::ostream& err);

/// parse_and_validate followed by dispatch.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string solve_eq_json(const RunConfig& cfg);

}  // namespace pricelab::cli
