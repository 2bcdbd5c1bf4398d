#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "pricelab/rng.hpp"

namespace pricelab {

/// Monthly inflation rates as fractions (the CSV stores percent).
struct InflationSeries {
  std::string country;
  std::vector<double> rates;
  bool synthetic = false;
};

/// Header `country,month,rate_percent`, month as YYYY-MM. Series come back in
/// first-appearance order, each sorted by month. Throws ParseError carrying
/// the 1-based line number.
std::vector<InflationSeries> parse_inflation_csv(std::istream& in);
std::vector<InflationSeries> load_inflation_csv(const std::filesystem::path& path);

struct SeriesMoments {
  std::string country;
  double mean = 0.0;    // fraction per month
  double stddev = 0.0;  // fraction per month
};

/// Monthly mean and standard deviation of the ten reference countries
/// (2000-2015), converted from percent.
const std::vector<SeriesMoments>& reference_moments();

/// Gaussian draws with the given moments, redrawn outside +-5 sd.
InflationSeries synthesize_series(const SeriesMoments& moments, std::size_t length, Rng& rng);

/// ceil(rho T + 3 sqrt(rho T)): expected shock count plus a 3-sigma margin.
std::size_t required_series_length(double rho, std::int64_t steps);

/// One synthetic series per reference country, each at least 192 months and
/// long enough for `steps` at `rho`.
std::vector<InflationSeries> synthetic_pool(double rho, std::int64_t steps, std::uint64_t seed);

}  // namespace pricelab
