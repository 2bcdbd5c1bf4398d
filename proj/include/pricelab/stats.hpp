#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace pricelab {

enum class EffectSize { kNegligible, kVerySmall, kSmall, kMedium, kLarge, kVeryLarge, kHuge };

std::string_view to_string(EffectSize size);

/// Classifies |d|; every interval is closed on the left.
EffectSize classify_effect(double d);

struct CohensD {
  double d = 0.0;
  EffectSize size = EffectSize::kNegligible;
};

/// Paired form mean(A - B) / sd(A - B) with the n - 1 divisor. nullopt when
/// the differences have zero spread.
std::optional<CohensD> cohens_d(std::span<const double> a, std::span<const double> b);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

/// Welch's unequal-variance two-sample t-test. nullopt when both samples
/// have zero variance or either has fewer than two points.
std::optional<WelchResult> welch_t_test(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

}  // namespace pricelab
