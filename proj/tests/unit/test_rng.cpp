#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "pricelab/rng.hpp"

using namespace pricelab;

TEST_CASE("derive_seed separates streams and indices") {
  std::set<std::uint64_t> seen;
  for (const char* stream : {"init.0", "init.1", "explore.0", "shocks"}) {
    for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(7, stream, i));
  }
  CHECK(seen.size() == 200);
  CHECK(derive_seed(7, "shocks", 3) == derive_seed(7, "shocks", 3));
  CHECK(derive_seed(7, "shocks", 3) != derive_seed(8, "shocks", 3));
}

TEST_CASE("uniform lies in [0, 1) and has the right mean") {
  Rng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("uniform_index covers the range evenly") {
  Rng rng(2);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(7)];
  const double expected = n / 7.0;
  const double sd = std::sqrt(n * (1.0 / 7.0) * (6.0 / 7.0));
  for (int c : counts) CHECK(std::abs(c - expected) < 5.0 * sd);
  CHECK(rng.uniform_index(1) == 0);
}

TEST_CASE("normal has zero mean and unit variance") {
  Rng rng(3);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - mean * mean - 1.0) < 0.02);
}

TEST_CASE("equal seeds give equal streams") {
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next() == b.next());
}
