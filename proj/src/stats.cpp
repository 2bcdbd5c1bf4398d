#include "pricelab/stats.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "pricelab/errors.hpp"

namespace pricelab {

std::string_view to_string(EffectSize size) {
  switch (size) {
    case EffectSize::kNegligible: return "Negligible";
    case EffectSize::kVerySmall: return "Very small";
    case EffectSize::kSmall: return "Small";
    case EffectSize::kMedium: return "Medium";
    case EffectSize::kLarge: return "Large";
    case EffectSize::kVeryLarge: return "Very large";
    case EffectSize::kHuge: return "Huge";
  }
  return "?";
}

EffectSize classify_effect(double d) {
  const double x = std::abs(d);
  if (x < 0.01) return EffectSize::kNegligible;
  if (x < 0.20) return EffectSize::kVerySmall;
  if (x < 0.50) return EffectSize::kSmall;
  if (x < 0.80) return EffectSize::kMedium;
  if (x < 1.20) return EffectSize::kLarge;
  if (x < 2.00) return EffectSize::kVeryLarge;
  return EffectSize::kHuge;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("mean of an empty sample");
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::optional<CohensD> cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("paired samples differ in length");
  if (a.size() < 2) throw InvalidInput("paired samples need at least two pairs");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double sd = sample_stddev(diff);
  if (!(sd > 0.0)) return std::nullopt;
  CohensD out;
  out.d = mean(diff) / sd;
  out.size = classify_effect(out.d);
  return out;
}

namespace {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("beta parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges fastest for x below the mean a / (a + b).
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_two_sided(double t, double df) {
  if (!(df > 0.0)) throw InvalidInput("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return regularized_incomplete_beta(x, 0.5 * df, 0.5);
}

std::optional<WelchResult> welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) return std::nullopt;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = sample_stddev(a);
  const double sb = sample_stddev(b);
  const double va = sa * sa / na;
  const double vb = sb * sb / nb;
  const double se2 = va + vb;
  if (!(se2 > 0.0)) return std::nullopt;
  WelchResult out;
  out.t = (mean(a) - mean(b)) / std::sqrt(se2);
  out.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  out.p = student_t_two_sided(out.t, out.df);
  return out;
}

}  // namespace pricelab
