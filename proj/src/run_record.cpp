#include "pricelab/run_record.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "pricelab/config.hpp"
#include "pricelab/errors.hpp"

namespace pricelab {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse(std::string_view field, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("malformed field '" + std::string(field) + "'", line_no);
  }
  return value;
}

std::optional<double> parse_optional(std::string_view field, std::size_t line_no) {
  if (field.empty()) return std::nullopt;
  return parse<double>(field, line_no);
}

}  // namespace

std::string run_csv_header(int n_agents) {
  std::string header = "t,omega,c,lambda";
  for (const char* prefix : {"action_", "price_", "qty_", "reward_"}) {
    for (int i = 0; i < n_agents; ++i) header += "," + std::string(prefix) + std::to_string(i);
  }
  header += ",delta,nabla";
  return header;
}

void write_run_csv(std::ostream& out, const std::vector<StepLog>& log, int n_agents) {
  out << run_csv_header(n_agents) << '\n';
  std::string line;
  for (const auto& row : log) {
    line.clear();
    line += std::to_string(row.t);
    line += ',' + format_double(row.omega);
    line += ',' + format_double(row.cost);
    line += ',' + format_double(row.price_index);
    for (int a : row.actions) line += ',' + std::to_string(a);
    for (double v : row.prices) line += ',' + format_double(v);
    for (double v : row.quantities) line += ',' + format_double(v);
    for (double v : row.rewards) line += ',' + format_double(v);
    line += ',';
    if (row.delta) line += format_double(*row.delta);
    line += ',';
    if (row.nabla) line += format_double(*row.nabla);
    out << line << '\n';
  }
}

std::vector<StepLog> read_run_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty run file", 1);
  const auto header = split(line);
  if (header.size() < 6 || (header.size() - 6) % 4 != 0) {
    throw ParseError("unexpected run CSV header", 1);
  }
  const std::size_t n = (header.size() - 6) / 4;
  if (line != run_csv_header(static_cast<int>(n))) throw ParseError("unexpected run CSV header", 1);
  std::vector<StepLog> log;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) throw ParseError("wrong number of fields", line_no);
    StepLog row;
    row.t = parse<std::int64_t>(f[0], line_no);
    row.omega = parse<double>(f[1], line_no);
    row.cost = parse<double>(f[2], line_no);
    row.price_index = parse<double>(f[3], line_no);
    std::size_t k = 4;
    for (std::size_t i = 0; i < n; ++i) row.actions.push_back(parse<int>(f[k++], line_no));
    for (std::size_t i = 0; i < n; ++i) row.prices.push_back(parse<double>(f[k++], line_no));
    for (std::size_t i = 0; i < n; ++i) row.quantities.push_back(parse<double>(f[k++], line_no));
    for (std::size_t i = 0; i < n; ++i) row.rewards.push_back(parse<double>(f[k++], line_no));
    row.delta = parse_optional(f[k++], line_no);
    row.nabla = parse_optional(f[k++], line_no);
    log.push_back(std::move(row));
  }
  return log;
}

std::string summary_to_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["repetition"] = s.repetition;
  j["series"] = s.series;
  j["synthetic_series"] = s.synthetic_series;
  j["steps"] = s.steps;
  j["mu"] = s.mu;
  j["nabla_sum"] = s.nabla_sum;
  j["nabla_defined"] = s.nabla_defined;
  j["nabla_undefined"] = s.nabla_undefined;
  j["delta_undefined"] = s.delta_undefined;
  j["final_window_nabla"] = s.final_window_nabla;
  j["time_to_supra"] = s.time_to_supra ? nlohmann::ordered_json(*s.time_to_supra) : nullptr;
  j["punishment"] = s.punishment ? nlohmann::ordered_json(to_string(*s.punishment)) : nullptr;
  j["deviation_action"] =
      s.deviation_action ? nlohmann::ordered_json(*s.deviation_action) : nullptr;
  j["shocks"] = s.shocks;
  j["source_repetitions"] = s.source_repetitions;
  j["failed"] = s.failed;
  j["failure"] = s.failure;
  return j.dump(2);
}

RunSummary summary_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RunSummary s;
  s.repetition = j.at("repetition").get<std::size_t>();
  s.series = j.at("series").get<std::string>();
  s.synthetic_series = j.at("synthetic_series").get<bool>();
  s.steps = j.at("steps").get<std::int64_t>();
  s.mu = j.at("mu").is_null() ? 0.0 : j.at("mu").get<double>();
  s.nabla_sum = j.at("nabla_sum").get<double>();
  s.nabla_defined = j.at("nabla_defined").get<std::size_t>();
  s.nabla_undefined = j.at("nabla_undefined").get<std::size_t>();
  s.delta_undefined = j.at("delta_undefined").get<std::size_t>();
  s.final_window_nabla =
      j.at("final_window_nabla").is_null() ? 0.0 : j.at("final_window_nabla").get<double>();
  if (!j.at("time_to_supra").is_null()) s.time_to_supra = j.at("time_to_supra").get<std::size_t>();
  if (!j.at("punishment").is_null()) {
    s.punishment = j.at("punishment").get<std::string>() == "punishment" ? Punishment::kPunishment
                                                                         : Punishment::kNone;
  }
  if (!j.at("deviation_action").is_null()) s.deviation_action = j.at("deviation_action").get<int>();
  s.shocks = j.at("shocks").get<std::size_t>();
  s.source_repetitions = j.at("source_repetitions").get<std::vector<std::size_t>>();
  s.failed = j.at("failed").get<bool>();
  s.failure = j.at("failure").get<std::string>();
  return s;
}

}  // namespace pricelab
