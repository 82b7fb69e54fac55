#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "brd/dynamics.hpp"
#include "brd/game.hpp"

// Exact convergence probabilities by full enumeration: every best-response
// table of a shape crossed with every initial profile, run under the
// clockwork dynamic, tallied with integer counts. Serves as the independent
// ground truth for the closed-form results on small shapes.

namespace brd {

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  Fraction reduced() const {
    const std::uint64_t g = std::gcd(num, den);
    return {num / g, den / g};
  }
  double value() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

struct OracleResult {
  std::uint64_t table_count = 0;
  std::uint64_t runs = 0;  // table_count * mu
  Fraction pne_probability;
  std::map<int, Fraction> cycle_probabilities;           // by rounds-period k
  std::map<std::pair<int, std::uint64_t>, std::uint64_t>  // (k, entry time)
      entry_time_counts;
};

// Enumerates all prod_i m_i^(mu/m_i) tables. Throws BudgetExceeded when
// table_count * mu would exceed `budget` runs.
inline OracleResult run_oracle(const GameShape& shape,
                               std::uint64_t budget = 10'000'000) {
  // Count tables first, guarding against overflow past the budget.
  std::uint64_t tables = 1;
  for (int i = 0; i < shape.players(); ++i) {
    for (std::uint64_t e = 0; e < shape.env_count(i); ++e) {
      if (tables > budget)
        throw BudgetExceeded("oracle: table space exceeds enumeration budget");
      tables *= static_cast<std::uint64_t>(shape.actions(i));
    }
  }
  if (tables > budget / shape.mu())
    throw BudgetExceeded("oracle: table space exceeds enumeration budget");

  std::vector<std::vector<Action>> entries(shape.players());
  for (int i = 0; i < shape.players(); ++i)
    entries[i].assign(shape.env_count(i), 1);

  OracleResult result;
  result.table_count = tables;
  result.runs = tables * shape.mu();

  std::uint64_t pne_hits = 0;
  std::map<int, std::uint64_t> cycle_counts;
  for (std::uint64_t ti = 0; ti < tables; ++ti) {
    const BestResponseTable table(shape, entries);
    for (ProfileIndex a0 = 0; a0 < shape.mu(); ++a0) {
      const Outcome out = run_clockwork(table, a0);
      cycle_counts[out.cycle_rounds] += 1;
      result.entry_time_counts[{out.cycle_rounds, *out.cycle_entry_time}] += 1;
      if (out.converged()) ++pne_hits;
    }
    // Odometer over all table entries, player-major, environment minor.
    bool carried = false;
    for (int i = 0; i < shape.players() && !carried; ++i) {
      for (auto& a : entries[i]) {
        if (a < shape.actions(i)) {
          ++a;
          carried = true;
          break;
        }
        a = 1;
      }
    }
  }

  result.pne_probability = Fraction{pne_hits, result.runs}.reduced();
  for (const auto& [k, count] : cycle_counts)
    result.cycle_probabilities[k] = Fraction{count, result.runs}.reduced();
  return result;
}

}  // namespace brd
