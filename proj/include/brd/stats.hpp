#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

// Small statistics toolkit used by the experiment harness and the
// statistical test suites: batch aggregation, the regularized incomplete
// gamma function, and chi-square homogeneity/goodness-of-fit tests.

namespace brd {
namespace stats {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Sample standard deviation (ddof = 1); zero for a single value.
inline double sample_std(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("sample_std: empty sample");
  if (xs.size() == 1) return 0.0;
  const double m = mean(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

// Regularized lower incomplete gamma P(a, x); series for x < a+1, continued
// fraction (modified Lentz) otherwise.
inline double regularized_gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::domain_error("regularized_gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - lg) * h;
  return 1.0 - q;
}

// Survival function of the chi-square distribution with df degrees of freedom.
inline double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return 1.0 - regularized_gamma_p(df / 2.0, x / 2.0);
}

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// Goodness of fit against given cell probabilities.
inline ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                                      std::span<const double> probs) {
  if (observed.size() != probs.size())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  std::uint64_t n = 0;
  for (auto o : observed) n += o;
  double stat = 0;
  int df = -1;
  for (std::size_t c = 0; c < observed.size(); ++c) {
    const double e = static_cast<double>(n) * probs[c];
    if (e == 0.0) {
      if (observed[c] != 0)
        return {std::numeric_limits<double>::infinity(), 0, 0.0};
      continue;
    }
    const double diff = static_cast<double>(observed[c]) - e;
    stat += diff * diff / e;
    ++df;
  }
  if (df <= 0) return {0.0, 0, 1.0};
  return {stat, df, chi_square_sf(stat, df)};
}

inline ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> observed) {
  std::vector<double> probs(observed.size(), 1.0 / static_cast<double>(observed.size()));
  return chi_square_gof(observed, probs);
}

// Two-sample homogeneity test over a common cell set. Cells empty in both
// samples are skipped; df = (#used cells - 1).
inline ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                             std::span<const std::uint64_t> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("chi_square_two_sample: size mismatch");
  double na = 0, nb = 0;
  for (auto x : a) na += static_cast<double>(x);
  for (auto x : b) nb += static_cast<double>(x);
  if (na == 0 || nb == 0)
    throw std::invalid_argument("chi_square_two_sample: empty sample");
  double stat = 0;
  int df = -1;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double tot = static_cast<double>(a[c]) + static_cast<double>(b[c]);
    if (tot == 0) continue;
    const double ea = na * tot / (na + nb);
    const double eb = nb * tot / (na + nb);
    const double da = static_cast<double>(a[c]) - ea;
    const double db = static_cast<double>(b[c]) - eb;
    stat += da * da / ea + db * db / eb;
    ++df;
  }
  if (df <= 0) return {0.0, 0, 1.0};
  return {stat, df, chi_square_sf(stat, df)};
}

}  // namespace stats
}  // namespace brd
