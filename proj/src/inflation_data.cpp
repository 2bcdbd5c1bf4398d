#include "pricelab/inflation_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string_view>
#include <tuple>

#include "pricelab/errors.hpp"

namespace pricelab {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_month(std::string_view m) {
  if (m.size() != 7 || m[4] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6}) {
    if (m[i] < '0' || m[i] > '9') return false;
  }
  const int month = (m[5] - '0') * 10 + (m[6] - '0');
  return month >= 1 && month <= 12;
}

}  // namespace

std::vector<InflationSeries> parse_inflation_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty inflation file", 1);
  ++line_no;
  std::string_view header = line;
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
  if (trim(header) != "country,month,rate_percent") {
    throw ParseError("expected header 'country,month,rate_percent'", line_no);
  }

  struct Pending {
    std::string country;
    std::vector<std::pair<std::string, double>> rows;
  };
  std::vector<Pending> pending;
  std::map<std::string, std::size_t, std::less<>> index;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError("expected three comma-separated fields", line_no);
    }
    const auto country = trim(row.substr(0, c1));
    const auto month = trim(row.substr(c1 + 1, c2 - c1 - 1));
    const auto rate_text = trim(row.substr(c2 + 1));
    if (country.empty()) throw ParseError("empty country name", line_no);
    if (!valid_month(month)) throw ParseError("month must be YYYY-MM", line_no);
    double percent = 0.0;
    const auto [ptr, ec] =
        std::from_chars(rate_text.data(), rate_text.data() + rate_text.size(), percent);
    if (ec != std::errc{} || ptr != rate_text.data() + rate_text.size() || rate_text.empty() ||
        !std::isfinite(percent) || percent <= -100.0) {
      throw ParseError("invalid rate '" + std::string(rate_text) + "'", line_no);
    }
    auto it = index.find(country);
    if (it == index.end()) {
      it = index.emplace(std::string(country), pending.size()).first;
      pending.push_back({std::string(country), {}});
    }
    pending[it->second].rows.emplace_back(std::string(month), percent / 100.0);
  }
  if (pending.empty()) throw ParseError("no inflation series in file", line_no);

  std::vector<InflationSeries> out;
  for (auto& p : pending) {
    std::stable_sort(p.rows.begin(), p.rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    InflationSeries series;
    series.country = p.country;
    series.rates.reserve(p.rows.size());
    for (const auto& r : p.rows) series.rates.push_back(r.second);
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<InflationSeries> load_inflation_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("inflation CSV not found: " + path.string());
  return parse_inflation_csv(in);
}

const std::vector<SeriesMoments>& reference_moments() {
  static const std::vector<SeriesMoments> moments = [] {
    const std::vector<std::tuple<const char*, double, double>> percent = {
        {"Canada", 0.16, 0.38},      {"China", 0.19, 0.62},     {"France", 0.12, 0.32},
        {"Germany", 0.12, 0.35},     {"Italy", 0.14, 0.21},     {"Netherlands", 0.16, 0.48},
        {"Singapore", 0.13, 0.50},   {"Sweden", 0.11, 0.41},    {"Swiss", 0.04, 0.35},
        {"United States", 0.18, 0.38},
    };
    std::vector<SeriesMoments> out;
    for (const auto& [name, m, s] : percent) out.push_back({name, m / 100.0, s / 100.0});
    return out;
  }();
  return moments;
}

InflationSeries synthesize_series(const SeriesMoments& moments, std::size_t length, Rng& rng) {
  if (moments.stddev < 0.0) throw InvalidInput("stddev must be >= 0");
  InflationSeries series;
  series.country = moments.country;
  series.synthetic = true;
  series.rates.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    double z = 0.0;
    do {
      z = rng.normal();
    } while (std::abs(z) > 5.0);
    series.rates.push_back(moments.mean + moments.stddev * z);
  }
  return series;
}

std::size_t required_series_length(double rho, std::int64_t steps) {
  const double expected = rho * static_cast<double>(steps);
  return static_cast<std::size_t>(std::ceil(expected + 3.0 * std::sqrt(expected)));
}

std::vector<InflationSeries> synthetic_pool(double rho, std::int64_t steps, std::uint64_t seed) {
  const std::size_t length = std::max<std::size_t>(192, required_series_length(rho, steps));
  std::vector<InflationSeries> pool;
  std::uint64_t index = 0;
  for (const auto& m : reference_moments()) {
    Rng rng(derive_seed(seed, "synthetic_series", index++));
    pool.push_back(synthesize_series(m, length, rng));
  }
  return pool;
}

}  // namespace pricelab
