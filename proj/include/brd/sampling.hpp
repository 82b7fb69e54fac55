#pragma once

#include <cstdint>
#include <vector>

#include "brd/game.hpp"
#include "brd/rng.hpp"
#include "brd/shape.hpp"

// Seeded generators for random game instances.
//
// Draw orders are frozen (reproducibility contract):
//   payoffs: for player i = 0..n-1, for profile index 0..mu-1, one U[0,1).
//   tables:  for player i = 0..n-1, for environment index 0..env_count-1,
//            one uniform action.
//   initial profile: a single uniform index in [0, mu).

namespace brd {

// Every payoff an independent U[0,1) draw. Any atomless distribution induces
// the same best-response digraph law, so one suffices.
inline Game sample_game_payoffs(const GameShape& shape, const SeedSpec& seed) {
  Xoshiro256pp rng = seed.with_purpose(StreamPurpose::payoffs).make_rng();
  std::vector<double> u(shape.mu() * static_cast<std::uint64_t>(shape.players()));
  for (double& x : u) x = rng.next_double();
  return Game(shape, std::move(u));
}

// Each table entry independently uniform over the player's actions. Induces
// exactly the digraph law of derive_best_response_table(sample_game_payoffs)
// with far fewer draws (sum_i mu/m_i instead of n*mu).
inline BestResponseTable sample_best_response_table(const GameShape& shape,
                                                    const SeedSpec& seed) {
  Xoshiro256pp rng = seed.with_purpose(StreamPurpose::table).make_rng();
  std::vector<std::vector<Action>> br(shape.players());
  for (int i = 0; i < shape.players(); ++i) {
    br[i].resize(shape.env_count(i));
    const std::uint64_t m = static_cast<std::uint64_t>(shape.actions(i));
    for (auto& a : br[i]) a = static_cast<Action>(rng.next_below(m)) + 1;
  }
  return BestResponseTable(shape, std::move(br));
}

inline ProfileIndex sample_initial_profile(const GameShape& shape,
                                           const SeedSpec& seed) {
  Xoshiro256pp rng = seed.with_purpose(StreamPurpose::initial).make_rng();
  return rng.next_below(shape.mu());
}

}  // namespace brd
