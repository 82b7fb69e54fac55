#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "brd/shape.hpp"

// Closed-form quantities for the clockwork best-response dynamic: the exact
// two-player cycle-time law and its corollaries, the n-player convergence
// bound pair, the hitting-time and distinct-environment bound pairs, the
// large-m asymptotics, and the equilibrium-existence limit.
//
// Bound values outside [0,1] are reported raw with a vacuous flag, never
// clamped. Products and sums are evaluated left to right in double precision;
// the exact-rational cross-checks live in the enumeration oracle.

namespace brd {
namespace analytics {

// Minimal number of environments any player faces: mu / max_i m_i.
inline std::uint64_t q_value(const GameShape& shape) { return shape.q(); }

inline int alternating_action_count(std::uint64_t step, int m1, int m2) {
  return (step % 2 == 1) ? m1 : m2;
}

// Probability that the two-player clockwork walk stays on fresh environments:
//   prod_{i=1..t} (1 - floor(i/2) / m_{(i)})
// where m_{(i)} alternates m1, m2. Equals the probability that the first
// environment repeat happens after time t+1. Defined as 1 for t = 0; the
// first nonpositive factor is exactly zero, so the product vanishes beyond
// twice the smaller action count.
inline double eta(std::uint64_t t, int m1, int m2) {
  double prod = 1.0;
  for (std::uint64_t i = 1; i <= t; ++i) {
    const double f = 1.0 - static_cast<double>(i / 2) /
                               alternating_action_count(i, m1, m2);
    if (f <= 0.0) return 0.0;
    prod *= f;
  }
  return prod;
}

// Exact probability that the two-player clockwork dynamic enters a cycle of
// 2k profiles at time t:
//   (1 / m_{(t+2k-1)}) * prod_{i=1..t+2k-2} (1 - floor(i/2) / m_{(i)}).
// Domain: 1 <= k <= min(m1,m2), 1 <= t <= 2(min(m1,m2) - k + 1).
inline double prob_2k_cycle_at_t(int k, std::uint64_t t, int m1, int m2) {
  const int m_star = std::min(m1, m2);
  if (k < 1 || k > m_star)
    throw std::domain_error("prob_2k_cycle_at_t: k out of range");
  if (t < 1 || t > 2 * static_cast<std::uint64_t>(m_star - k + 1))
    throw std::domain_error("prob_2k_cycle_at_t: t out of range");
  const std::uint64_t last = t + 2 * static_cast<std::uint64_t>(k) - 1;
  return eta(last - 1, m1, m2) / alternating_action_count(last, m1, m2);
}

// Probability of entering a cycle of 2k profiles at any time (sum over t).
// k = 1 is the exact two-player equilibrium-convergence probability.
inline double prob_2k_cycle(int k, int m1, int m2) {
  const int m_star = std::min(m1, m2);
  if (k < 1 || k > m_star) throw std::domain_error("prob_2k_cycle: k out of range");
  double sum = 0.0;
  for (std::uint64_t t = 1; t <= 2 * static_cast<std::uint64_t>(m_star - k + 1); ++t)
    sum += prob_2k_cycle_at_t(k, t, m1, m2);
  return sum;
}

// Standard normal CDF. Absolute error well below 1e-12 (libm erfc).
inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Large-m limit of prob_2k_cycle(k, m, m) for k = o(m^{2/3}):
//   2 sqrt(pi/m) (1 - Phi((2k-1)/sqrt(2m))).
inline double pne_convergence_asymptotic(int k, int m) {
  if (m < 1 || k < 1)
    throw std::domain_error("pne_convergence_asymptotic: need k >= 1, m >= 1");
  const double z = (2.0 * k - 1.0) / std::sqrt(2.0 * m);
  return 2.0 * std::sqrt(M_PI / m) * (1.0 - phi(z));
}

struct SurvivalAsymptotic {
  double asymptotic;   // exp(-x^2/2)
  double eta_exact;    // survival product at t = ceil(x * sqrt(2m))
  std::uint64_t t;     // the index used for the exact companion value
};

// Probability that the two-player dynamic has not closed any cycle until time
// step x*sqrt(2m); asymptotically exp(-x^2/2), with the finite-m exact value
// provided for comparison.
inline SurvivalAsymptotic no_cycle_survival_asymptotic(double x, int m) {
  if (!(x > 0.0)) throw std::domain_error("no_cycle_survival_asymptotic: need x > 0");
  const std::uint64_t t =
      static_cast<std::uint64_t>(std::ceil(x * std::sqrt(2.0 * m)));
  return {std::exp(-x * x / 2.0), eta(t, m, m), t};
}

struct BoundPair {
  double lower = 0.0;
  double upper = 0.0;
  bool lower_vacuous = false;  // lower <= 0
  bool upper_vacuous = false;  // upper >= 1

  void set_flags() {
    lower_vacuous = lower <= 0.0;
    upper_vacuous = upper >= 1.0;
  }
};

// Bounds on the probability that the clockwork dynamic converges to an
// equilibrium: 1/(4 sqrt(n) sqrt(q)) from below, 6 n sqrt(ln q)/sqrt(q) from
// above. Stated for more than two players; evaluation is permitted for n = 2.
inline BoundPair convergence_bounds(const GameShape& shape) {
  const double q = static_cast<double>(shape.q());
  if (q < 2) throw std::domain_error("convergence_bounds: need q >= 2");
  const double n = static_cast<double>(shape.players());
  BoundPair out;
  out.lower = 1.0 / (4.0 * std::sqrt(n) * std::sqrt(q));
  out.upper = 6.0 * n * std::sqrt(std::log(q)) / std::sqrt(q);
  out.set_flags();
  return out;
}

inline std::uint64_t floor_rounds_minus_one(std::uint64_t t, int n) {
  // floor(t/n - 1), clamped at zero; the bounds below are only derived for a
  // nonnegative value and are trivially true (= 1) before that.
  return t >= 2 * static_cast<std::uint64_t>(n)
             ? (t - static_cast<std::uint64_t>(n)) / static_cast<std::uint64_t>(n)
             : 0;
}

// Upper bound on the probability that the path hits the equilibrium set only
// after time t: exp(-floor(t/n - 1)^2 / (2q)).
inline double hit_after_t_bound(const GameShape& shape, std::uint64_t t) {
  if (t < 1) throw std::domain_error("hit_after_t_bound: need t >= 1");
  const double d = static_cast<double>(floor_rounds_minus_one(t, shape.players()));
  return std::exp(-d * d / (2.0 * static_cast<double>(shape.q())));
}

// Bound pair for the probability that the path hits the equilibrium set by
// time t:  floor(t/n)/q * (1 - ceil(t/n)^2 n/(2q))  <=  P  <=  t/q.
// The lower bound may be negative; both are reported raw.
inline BoundPair hit_by_t_bounds(const GameShape& shape, std::uint64_t t) {
  if (t < 1) throw std::domain_error("hit_by_t_bounds: need t >= 1");
  const std::uint64_t n = static_cast<std::uint64_t>(shape.players());
  const double q = static_cast<double>(shape.q());
  const double rounds = static_cast<double>(t / n);
  const double rounds_up = static_cast<double>((t + n - 1) / n);
  BoundPair out;
  out.lower = rounds / q * (1.0 - rounds_up * rounds_up * static_cast<double>(n) / (2.0 * q));
  out.upper = static_cast<double>(t) / q;
  out.set_flags();
  return out;
}

struct DistinctEnvBounds {
  BoundPair bounds;
  double exact;          // prod_{k=1..k*-1} (1 - m_i k / mu)
  std::uint64_t plays;   // k*: number of turns player i has by time t
};

// Probability that the environments player i faces at their turns up to time
// t under the clockwork random walk are all distinct. The product form is
// exact; the pair brackets it.
inline DistinctEnvBounds distinct_env_bounds(const GameShape& shape, int player,
                                             std::uint64_t t) {
  if (t < 1) throw std::domain_error("distinct_env_bounds: need t >= 1");
  if (player < 0 || player >= shape.players())
    throw std::domain_error("distinct_env_bounds: player out of range");
  const std::uint64_t n = static_cast<std::uint64_t>(shape.players());
  const double mu = static_cast<double>(shape.mu());
  const double mi = static_cast<double>(shape.actions(player));

  // Turns of 0-based player `player` are at times player+1, player+1+n, ...
  const std::uint64_t first = static_cast<std::uint64_t>(player) + 1;
  const std::uint64_t plays = t >= first ? 1 + (t - first) / n : 0;

  double exact = 1.0;
  for (std::uint64_t k = 1; k + 1 <= plays; ++k) {
    const double f = 1.0 - mi * static_cast<double>(k) / mu;
    if (f <= 0.0) {
      exact = 0.0;
      break;
    }
    exact *= f;
  }

  const double rounds_up = static_cast<double>((t + n - 1) / n);
  const double d = static_cast<double>(floor_rounds_minus_one(t, shape.players()));
  BoundPair pair;
  pair.lower = 1.0 - mi / mu * rounds_up * rounds_up / 2.0;
  pair.upper = std::exp(-mi * d * d / (2.0 * mu));
  pair.set_flags();
  return {pair, exact, plays};
}

// Limit of the probability that a random game has at least one pure
// equilibrium as q grows: 1 - 1/e.
inline double pne_existence_asymptote() { return 1.0 - std::exp(-1.0); }

}  // namespace analytics
}  // namespace brd
