#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "brd/shape.hpp"

namespace brd {

struct TieDetected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Payoff tensor: one real payoff per (player, profile).
// Layout: payoffs[player * mu + profile_index].
struct Game {
  GameShape shape;
  std::vector<double> payoffs;

  Game(GameShape s, std::vector<double> u) : shape(std::move(s)), payoffs(std::move(u)) {
    if (payoffs.size() != shape.mu() * static_cast<std::uint64_t>(shape.players()))
      throw std::invalid_argument("Game: payoff tensor must have n*mu entries");
  }

  double payoff(int player, ProfileIndex idx) const {
    return payoffs[static_cast<std::uint64_t>(player) * shape.mu() + idx];
  }
};

enum class TiePolicy {
  lowest_index,  // break exact payoff ties toward the lowest action, count them
  strict,        // throw TieDetected on any exact tie
};

// The unique best action of each player in each environment. br[i][e] is
// 1-based. Totality (an entry for every environment) is a class invariant;
// viewed through single-player moves this is the game's best-response digraph.
struct BestResponseTable {
  GameShape shape;
  std::vector<std::vector<Action>> br;

  BestResponseTable(GameShape s, std::vector<std::vector<Action>> entries)
      : shape(std::move(s)), br(std::move(entries)) {
    if (br.size() != static_cast<std::size_t>(shape.players()))
      throw std::invalid_argument("BestResponseTable: need one row per player");
    for (int i = 0; i < shape.players(); ++i) {
      if (br[i].size() != shape.env_count(i))
        throw std::invalid_argument("BestResponseTable: row size must equal environment count");
      for (Action a : br[i])
        if (a < 1 || a > shape.actions(i))
          throw std::invalid_argument("BestResponseTable: action out of range");
    }
  }

  Action best(int player, EnvIndex env) const { return br[player][env]; }

  // Single-player move edge: the profile reached when `player` best-responds.
  // Equals `idx` exactly when the player already plays their best response.
  ProfileIndex move(int player, ProfileIndex idx) const {
    return shape.with_action(idx, player, br[player][shape.env_index(player, idx)]);
  }
};

// Argmax over own actions for every (player, environment) slice of the tensor.
// With TiePolicy::lowest_index, ties resolve to the smallest action and
// `tie_count`, if given, receives the number of tied comparisons seen.
inline BestResponseTable derive_best_response_table(const Game& game,
                                                    TiePolicy policy = TiePolicy::lowest_index,
                                                    std::uint64_t* tie_count = nullptr) {
  const GameShape& shape = game.shape;
  std::uint64_t ties = 0;
  std::vector<std::vector<Action>> br(shape.players());
  for (int i = 0; i < shape.players(); ++i) {
    br[i].resize(shape.env_count(i));
    for (EnvIndex e = 0; e < shape.env_count(i); ++e) {
      Action best = 1;
      double best_u = game.payoff(i, shape.profile_from_env(i, e, 1));
      for (Action a = 2; a <= shape.actions(i); ++a) {
        const double u = game.payoff(i, shape.profile_from_env(i, e, a));
        if (u == best_u) {
          ++ties;
          if (policy == TiePolicy::strict)
            throw TieDetected("payoff tie in (player " + std::to_string(i + 1) +
                              ", environment " + std::to_string(e) + ")");
        }
        if (u > best_u) {
          best_u = u;
          best = a;
        }
      }
      br[i][e] = best;
    }
  }
  if (tie_count) *tie_count = ties;
  return BestResponseTable(shape, std::move(br));
}

// The set of profiles at which every player best-responds, i.e. the sinks of
// the best-response digraph.
struct PneSet {
  std::vector<ProfileIndex> profiles;  // ascending

  bool contains(ProfileIndex idx) const {
    for (ProfileIndex p : profiles)
      if (p == idx) return true;
    return false;
  }
  std::size_t size() const { return profiles.size(); }
  bool empty() const { return profiles.empty(); }
};

inline bool is_pne(const BestResponseTable& table, ProfileIndex idx) {
  const GameShape& shape = table.shape;
  for (int i = 0; i < shape.players(); ++i)
    if (table.best(i, shape.env_index(i, idx)) != shape.action_of(idx, i))
      return false;
  return true;
}

inline PneSet enumerate_pne(const BestResponseTable& table) {
  PneSet out;
  for (ProfileIndex idx = 0; idx < table.shape.mu(); ++idx)
    if (is_pne(table, idx)) out.profiles.push_back(idx);
  return out;
}

inline std::uint64_t count_pne(const BestResponseTable& table) {
  std::uint64_t count = 0;
  for (ProfileIndex idx = 0; idx < table.shape.mu(); ++idx)
    if (is_pne(table, idx)) ++count;
  return count;
}

// Per-profile classification: is the profile an equilibrium, and can some
// finite sequence of single-player best-response moves starting there reach
// one. Computed by breadth-first traversal from the equilibrium set over
// reversed move edges: the player-i predecessors of b are all profiles
// agreeing with b off coordinate i, provided b_i is i's best response there.
class ReachFlags {
 public:
  explicit ReachFlags(std::uint64_t mu) : flags_(mu, 0) {}
  bool is_pne(ProfileIndex idx) const { return flags_[idx] & 1; }
  bool can_reach_pne(ProfileIndex idx) const { return flags_[idx] & 2; }
  void mark_pne(ProfileIndex idx) { flags_[idx] |= 1; }
  void mark_reach(ProfileIndex idx) { flags_[idx] |= 2; }

 private:
  std::vector<std::uint8_t> flags_;
};

inline ReachFlags reach_classification(const BestResponseTable& table) {
  const GameShape& shape = table.shape;
  ReachFlags flags(shape.mu());
  std::vector<ProfileIndex> queue;
  for (ProfileIndex idx = 0; idx < shape.mu(); ++idx) {
    if (is_pne(table, idx)) {
      flags.mark_pne(idx);
      flags.mark_reach(idx);
      queue.push_back(idx);
    }
  }
  while (!queue.empty()) {
    const ProfileIndex b = queue.back();
    queue.pop_back();
    for (int i = 0; i < shape.players(); ++i) {
      const EnvIndex e = shape.env_index(i, b);
      if (table.best(i, e) != shape.action_of(b, i)) continue;
      for (Action a = 1; a <= shape.actions(i); ++a) {
        const ProfileIndex pred = shape.profile_from_env(i, e, a);
        if (!flags.can_reach_pne(pred)) {
          flags.mark_reach(pred);
          queue.push_back(pred);
        }
      }
    }
  }
  return flags;
}

// Canonical text form: one line per player, space-separated best actions in
// environment-index order, LF line endings. Used by golden tests and `trace`.
inline std::string to_text(const BestResponseTable& table) {
  std::string out;
  for (int i = 0; i < table.shape.players(); ++i) {
    for (EnvIndex e = 0; e < table.shape.env_count(i); ++e) {
      if (e) out += ' ';
      out += std::to_string(table.br[i][e]);
    }
    out += '\n';
  }
  return out;
}

inline BestResponseTable parse_table(const GameShape& shape, std::istream& in) {
  std::vector<std::vector<Action>> br(shape.players());
  std::string line;
  for (int i = 0; i < shape.players(); ++i) {
    if (!std::getline(in, line))
      throw std::invalid_argument("parse_table: expected one line per player");
    std::istringstream row(line);
    Action a;
    while (row >> a) br[i].push_back(a);
  }
  return BestResponseTable(shape, std::move(br));
}

inline BestResponseTable parse_table(const GameShape& shape, const std::string& text) {
  std::istringstream in(text);
  return parse_table(shape, in);
}

}  // namespace brd
