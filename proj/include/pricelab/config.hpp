#pragma once

// Experiment configuration: defaults reproduce the base parameter table, and
// the flat `key=value` file format round-trips every field.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pricelab/dqn_agent.hpp"
#include "pricelab/market.hpp"
#include "pricelab/pricing_env.hpp"

namespace pricelab {

struct RunConfig {
  // Market
  int n_agents = 2;
  int k = 1;
  double rho = 0.001;
  double eta_min = -0.5;
  double eta_max = 2.0;
  int m = 15;
  double c0 = 1.0;
  double alpha_init = 1.0;
  double alpha0 = 0.0;
  double mu = 0.25;
  // Learning
  double lr = 0.01;
  double gamma = 0.95;
  std::string optimizer = "adam";
  int h = 256;
  int hidden_layers = 2;
  double beta = 0.00005;
  int batch_size = 256;
  int buffer_size = 20000;
  int episodes = 1;
  std::int64_t timesteps = 400000;
  int gradient_steps = 1;
  int target_update = 200;
  double grad_clip = 10.0;
  int norm_window = 0;  // 0: round(1/rho), or 1000 when rho = 0
  // Protocols
  int repetitions = 50;
  std::uint64_t master_seed = 0;
  std::string inflation_csv;  // empty: synthetic series from reference moments
  std::string protocol = "in_sample";
  std::string output_dir = "runs";
  std::int64_t eval_timesteps = 50000;
  std::int64_t deviation_step = 350000;
  int log_stride = 10;

  // Verbatim `key=value` overrides applied on top of the file, in order.
  std::vector<std::string> overrides;
};

struct ConfigField {
  std::string_view key;
  std::string_view help;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

const std::vector<ConfigField>& config_fields();

/// Throws ConfigError naming the key when it is unknown or the value does
/// not parse.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& cfg, std::string_view key);
bool is_config_key(std::string_view key);

/// Applies and records one `key=value` override.
void apply_override(RunConfig& cfg, std::string_view assignment);

RunConfig parse_config_text(std::string_view text);
/// Throws MissingArtifact when the file does not exist.
RunConfig load_config_file(const std::filesystem::path& path);
/// Every field, one per line, overrides echoed as leading comments.
std::string to_config_text(const RunConfig& cfg);
void save_config_file(const RunConfig& cfg, const std::filesystem::path& path);

std::uint64_t config_digest(const RunConfig& cfg);

void validate(const RunConfig& cfg);

MarketParams market_params(const RunConfig& cfg);
DqnConfig dqn_config(const RunConfig& cfg);
EnvConfig env_config(const RunConfig& cfg);

std::string format_double(double value);

}  // namespace pricelab
