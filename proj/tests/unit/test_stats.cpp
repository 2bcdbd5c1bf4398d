#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/rng.hpp"
#include "pricelab/stats.hpp"

using namespace pricelab;

TEST_CASE("effect size labels on interval endpoints") {
  struct Case {
    double d;
    const char* label;
  };
  const Case cases[] = {{0.0, "Negligible"},  {0.00999, "Negligible"}, {0.01, "Very small"},
                        {0.19999, "Very small"}, {0.20, "Small"},     {0.49999, "Small"},
                        {0.50, "Medium"},       {0.79999, "Medium"},  {0.80, "Large"},
                        {1.19999, "Large"},     {1.20, "Very large"}, {1.99999, "Very large"},
                        {2.00, "Huge"},         {15.0, "Huge"},       {-0.5, "Medium"},
                        {-2.0, "Huge"}};
  for (const auto& c : cases) {
    CAPTURE(c.d);
    CHECK(std::string(to_string(classify_effect(c.d))) == c.label);
  }
}

TEST_CASE("paired Cohen's d") {
  // Differences {0, 1, 1, 2}: mean 1, sd sqrt(2/3).
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0}, b{1.0, 1.0, 2.0, 2.0};
  const auto d = cohens_d(a, b);
  REQUIRE(d.has_value());
  CHECK(d->d == doctest::Approx(1.0 / std::sqrt(2.0 / 3.0)));
  CHECK(d->size == EffectSize::kVeryLarge);

  // Differences with mean 0.5 and sample sd exactly 1.
  const double h = std::sqrt(0.75);
  const std::vector<double> diffs{0.5 + h, 0.5 - h, 0.5 + h, 0.5 - h};
  const std::vector<double> zeros(4, 0.0);
  const auto half = cohens_d(diffs, zeros);
  REQUIRE(half.has_value());
  CHECK(half->d == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half->size == EffectSize::kMedium);

  CHECK_FALSE(cohens_d(a, a).has_value());
  const std::vector<double> shifted{2.0, 3.0, 4.0, 5.0};
  CHECK_FALSE(cohens_d(shifted, a).has_value());
  CHECK_THROWS_AS(cohens_d(std::vector<double>{1.0}, std::vector<double>{2.0}), InvalidInput);
  CHECK_THROWS_AS(cohens_d(a, std::vector<double>{1.0, 2.0}), InvalidInput);
}

TEST_CASE("Welch test on identical samples") {
  const std::vector<double> a{0.1, 0.4, 0.3, 0.2};
  const auto w = welch_t_test(a, a);
  REQUIRE(w.has_value());
  CHECK(w->t == 0.0);
  CHECK(w->p == doctest::Approx(1.0));
  CHECK_FALSE(welch_t_test(std::vector<double>{1.0, 1.0}, std::vector<double>{2.0, 2.0}).has_value());
  CHECK_FALSE(welch_t_test(std::vector<double>{1.0}, a).has_value());
}

TEST_CASE("Welch test separates shifted normals") {
  Rng rng(41);
  std::vector<double> a(1000), b(1000);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = 1.0 + rng.normal();
  const auto w = welch_t_test(a, b);
  REQUIRE(w.has_value());
  CHECK(w->p < 1e-10);
  CHECK(w->t < 0.0);
}

TEST_CASE("Welch p-values agree with Boost.Math") {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t na = 2 + rng.uniform_index(60), nb = 2 + rng.uniform_index(60);
    const double shift = 2.0 * rng.uniform() - 1.0, scale = 0.1 + 3.0 * rng.uniform();
    std::vector<double> a(na), b(nb);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = shift + scale * rng.normal();
    const auto w = welch_t_test(a, b);
    REQUIRE(w.has_value());
    REQUIRE(std::abs(w->p - oracle::welch_p(a, b)) < 1e-8);
  }
}

TEST_CASE("incomplete beta identities") {
  CHECK(regularized_incomplete_beta(0.0, 2.0, 3.0) == 0.0);
  CHECK(regularized_incomplete_beta(1.0, 2.0, 3.0) == 1.0);
  // I_x(1, 1) = x and I_x(a, b) = 1 - I_{1-x}(b, a).
  CHECK(regularized_incomplete_beta(0.3, 1.0, 1.0) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(regularized_incomplete_beta(0.3, 2.5, 4.0) ==
        doctest::Approx(1.0 - regularized_incomplete_beta(0.7, 4.0, 2.5)).epsilon(1e-13));
  // Student t with one degree of freedom is Cauchy.
  CHECK(student_t_two_sided(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("mean and standard deviation") {
  const std::vector<double> v{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  CHECK(mean(v) == 5.0);
  CHECK(sample_stddev(v) == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(sample_stddev(std::vector<double>{1.0}) == 0.0);
  CHECK_THROWS_AS(mean(std::vector<double>{}), InvalidInput);
}
