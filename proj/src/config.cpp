#include "pricelab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "pricelab/errors.hpp"

namespace pricelab {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError("invalid value '" + std::string(text) + "' for key '" +
                      std::string(key) + "'");
  }
  return value;
}

template <typename T>
std::string format_integer(T value) {
  return std::to_string(value);
}

template <auto Member>
ConfigField number_field(std::string_view key, std::string_view help) {
  using T = std::remove_reference_t<decltype(std::declval<RunConfig&>().*Member)>;
  ConfigField field;
  field.key = key;
  field.help = help;
  field.get = [](const RunConfig& c) {
    if constexpr (std::is_floating_point_v<T>) {
      return format_double(c.*Member);
    } else {
      return format_integer(c.*Member);
    }
  };
  field.set = [key](RunConfig& c, std::string_view v) { c.*Member = parse_number<T>(key, v); };
  return field;
}

template <auto Member>
ConfigField string_field(std::string_view key, std::string_view help) {
  ConfigField field;
  field.key = key;
  field.help = help;
  field.get = [](const RunConfig& c) { return c.*Member; };
  field.set = [](RunConfig& c, std::string_view v) { c.*Member = std::string(trim(v)); };
  return field;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = {
      number_field<&RunConfig::n_agents>("n_agents", "number of agents N"),
      number_field<&RunConfig::k>("k", "past periods in the state"),
      number_field<&RunConfig::rho>("rho", "probability of an inflation shock"),
      number_field<&RunConfig::lr>("lr", "learning rate"),
      number_field<&RunConfig::gamma>("gamma", "discount factor"),
      number_field<&RunConfig::eta_min>("eta_min", "minimum margin over cost"),
      number_field<&RunConfig::eta_max>("eta_max", "maximum margin over cost"),
      number_field<&RunConfig::m>("m", "number of actions"),
      string_field<&RunConfig::optimizer>("optimizer", "optimizer (adam)"),
      number_field<&RunConfig::c0>("c0", "initial production cost"),
      number_field<&RunConfig::alpha_init>("alpha_init", "initial vertical differentiation"),
      number_field<&RunConfig::alpha0>("alpha0", "inverse aggregate demand index"),
      number_field<&RunConfig::mu>("mu", "horizontal differentiation"),
      number_field<&RunConfig::h>("h", "neurons per hidden layer"),
      number_field<&RunConfig::hidden_layers>("hidden_layers", "hidden layers"),
      number_field<&RunConfig::beta>("beta", "epsilon decay"),
      number_field<&RunConfig::batch_size>("batch_size", "minibatch size"),
      number_field<&RunConfig::buffer_size>("buffer_size", "replay buffer size"),
      number_field<&RunConfig::episodes>("episodes", "episodes (only 1 is supported)"),
      number_field<&RunConfig::timesteps>("timesteps", "training timesteps"),
      number_field<&RunConfig::gradient_steps>("gradient_steps", "gradient steps per timestep"),
      number_field<&RunConfig::target_update>("target_update", "learn steps between target syncs"),
      number_field<&RunConfig::grad_clip>("grad_clip", "global gradient-norm clip (<=0 off)"),
      number_field<&RunConfig::norm_window>("norm_window", "cost moving-average window (0 = auto)"),
      number_field<&RunConfig::repetitions>("repetitions", "repetitions per experiment"),
      number_field<&RunConfig::master_seed>("master_seed", "master random seed"),
      string_field<&RunConfig::inflation_csv>("inflation_csv", "inflation CSV (empty = synthetic)"),
      string_field<&RunConfig::protocol>("protocol", "protocol tag"),
      string_field<&RunConfig::output_dir>("output_dir", "artifact root directory"),
      number_field<&RunConfig::eval_timesteps>("eval_timesteps", "out-of-sample timesteps"),
      number_field<&RunConfig::deviation_step>("deviation_step", "forced deviation step"),
      number_field<&RunConfig::log_stride>("log_stride", "log subsampling stride"),
  };
  return fields;
}

namespace {

const ConfigField* find_field(std::string_view key) {
  for (const auto& f : config_fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

}  // namespace

bool is_config_key(std::string_view key) { return find_field(key) != nullptr; }

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const ConfigField* field = find_field(trim(key));
  if (!field) throw ConfigError("unknown configuration key '" + std::string(trim(key)) + "'");
  field->set(cfg, value);
}

std::string get_config_value(const RunConfig& cfg, std::string_view key) {
  const ConfigField* field = find_field(key);
  if (!field) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  return field->get(cfg);
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  set_config_value(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
  cfg.overrides.emplace_back(assignment);
}

RunConfig parse_config_text(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    try {
      set_config_value(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("config file not found: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string to_config_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& o : cfg.overrides) out += "# override " + o + "\n";
  for (const auto& f : config_fields()) {
    out += std::string(f.key) + "=" + f.get(cfg) + "\n";
  }
  return out;
}

void save_config_file(const RunConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_config_text(cfg);
}

std::uint64_t config_digest(const RunConfig& cfg) {
  RunConfig bare = cfg;
  bare.overrides.clear();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_config_text(bare)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

void validate(const RunConfig& cfg) {
  try {
    market_params(cfg).validate();
    dqn_config(cfg).validate();
    env_config(cfg).validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (cfg.k < 1) throw ConfigError("k must be >= 1");
  if (!(cfg.rho >= 0.0 && cfg.rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
  if (cfg.optimizer != "adam") throw ConfigError("only optimizer=adam is supported");
  if (cfg.episodes != 1) throw ConfigError("only episodes=1 is supported (continuing task)");
  if (cfg.gradient_steps < 1) throw ConfigError("gradient_steps must be >= 1");
  if (cfg.norm_window < 0) throw ConfigError("norm_window must be >= 0");
  if (cfg.timesteps < 1 || cfg.eval_timesteps < 1) throw ConfigError("timesteps must be >= 1");
  if (cfg.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (cfg.log_stride < 1) throw ConfigError("log_stride must be >= 1");
}

MarketParams market_params(const RunConfig& cfg) {
  MarketParams p;
  p.n_agents = cfg.n_agents;
  p.mu = cfg.mu;
  p.alpha0 = cfg.alpha0;
  p.c0 = cfg.c0;
  p.alpha_init = cfg.alpha_init;
  p.eta_min = cfg.eta_min;
  p.eta_max = cfg.eta_max;
  p.m_actions = cfg.m;
  return p;
}

DqnConfig dqn_config(const RunConfig& cfg) {
  DqnConfig d;
  d.input_dim = static_cast<int>(observation_length(static_cast<std::size_t>(std::max(cfg.n_agents, 0)),
                                                    static_cast<std::size_t>(std::max(cfg.k, 0))));
  d.hidden = cfg.h;
  d.hidden_layers = cfg.hidden_layers;
  d.actions = cfg.m;
  d.gamma = cfg.gamma;
  d.beta = cfg.beta;
  d.lr = cfg.lr;
  d.batch_size = static_cast<std::size_t>(std::max(cfg.batch_size, 0));
  d.buffer_capacity = static_cast<std::size_t>(std::max(cfg.buffer_size, 0));
  d.target_update_period = cfg.target_update;
  d.grad_clip = cfg.grad_clip;
  return d;
}

EnvConfig env_config(const RunConfig& cfg) {
  EnvConfig e;
  e.memory = static_cast<std::size_t>(std::max(cfg.k, 0));
  e.norm_window = cfg.norm_window > 0 ? static_cast<std::size_t>(cfg.norm_window)
                                      : EnvConfig::window_for_rho(cfg.rho);
  return e;
}

}  // namespace pricelab
