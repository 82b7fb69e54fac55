#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace brd {

using Action = int;                 // 1-based
using ProfileIndex = std::uint64_t;
using EnvIndex = std::uint64_t;

struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Shape of an n-player game: action counts plus the derived quantities used
// throughout (profile-space size mu, minimal environment count q, extremal
// action counts). Requires n >= 2 and every action count >= 2.
//
// Profiles are indexed in mixed-radix little-endian order with player 1
// fastest-varying: index(a) = sum_i (a_i - 1) * prod_{j<i} m_j. Environments
// for player i use the same little-endian order over the remaining players.
// These orders are fixed; trajectories, serialized tables and CSV outputs
// depend on them.
class GameShape {
 public:
  GameShape(int players, std::vector<int> actions)
      : n_(players), m_(std::move(actions)) {
    if (n_ < 2) throw std::invalid_argument("GameShape: need at least 2 players");
    if (static_cast<int>(m_.size()) != n_)
      throw std::invalid_argument("GameShape: action count list must have n entries");
    stride_.resize(n_ + 1);
    stride_[0] = 1;
    int mmin = std::numeric_limits<int>::max(), mmax = 2;
    for (int i = 0; i < n_; ++i) {
      if (m_[i] < 2)
        throw std::invalid_argument("GameShape: every player needs at least 2 actions");
      if (stride_[i] > std::numeric_limits<std::uint64_t>::max() /
                           static_cast<std::uint64_t>(m_[i]))
        throw std::invalid_argument("GameShape: profile space overflows 64 bits");
      stride_[i + 1] = stride_[i] * static_cast<std::uint64_t>(m_[i]);
      mmin = std::min(mmin, m_[i]);
      mmax = std::max(mmax, m_[i]);
    }
    m_min_ = mmin;
    m_max_ = mmax;
  }

  explicit GameShape(std::vector<int> actions)
      : GameShape(static_cast<int>(actions.size()), std::move(actions)) {}

  int players() const noexcept { return n_; }
  const std::vector<int>& action_counts() const noexcept { return m_; }
  int actions(int player) const { return m_[player]; }

  // Number of action profiles.
  std::uint64_t mu() const noexcept { return stride_[n_]; }
  // Minimal number of environments any single player faces: mu / max_i m_i.
  std::uint64_t q() const noexcept {
    return mu() / static_cast<std::uint64_t>(m_max_);
  }
  int min_actions() const noexcept { return m_min_; }
  int max_actions() const noexcept { return m_max_; }

  std::uint64_t stride(int player) const { return stride_[player]; }
  std::uint64_t env_count(int player) const {
    return mu() / static_cast<std::uint64_t>(m_[player]);
  }

  ProfileIndex profile_index(std::span<const Action> a) const {
    ProfileIndex idx = 0;
    for (int i = 0; i < n_; ++i)
      idx += static_cast<std::uint64_t>(a[i] - 1) * stride_[i];
    return idx;
  }

  std::vector<Action> profile_at(ProfileIndex idx) const {
    std::vector<Action> a(n_);
    for (int i = 0; i < n_; ++i) {
      a[i] = static_cast<Action>((idx / stride_[i]) %
                                 static_cast<std::uint64_t>(m_[i])) + 1;
    }
    return a;
  }

  Action action_of(ProfileIndex idx, int player) const {
    return static_cast<Action>((idx / stride_[player]) %
                               static_cast<std::uint64_t>(m_[player])) + 1;
  }

  // Environment index of `player` in the profile with index `idx`.
  EnvIndex env_index(int player, ProfileIndex idx) const {
    const std::uint64_t low = idx % stride_[player];
    const std::uint64_t high = idx / stride_[player + 1];
    return low + high * stride_[player];
  }

  // Profile index obtained from environment `env` of `player` and the
  // player's own action.
  ProfileIndex profile_from_env(int player, EnvIndex env, Action own) const {
    const std::uint64_t low = env % stride_[player];
    const std::uint64_t high = env / stride_[player];
    return low + static_cast<std::uint64_t>(own - 1) * stride_[player] +
           high * stride_[player + 1];
  }

  // Replace one coordinate of a profile index.
  ProfileIndex with_action(ProfileIndex idx, int player, Action a) const {
    const Action old = action_of(idx, player);
    return idx + (static_cast<std::int64_t>(a) - old) *
                     static_cast<std::int64_t>(stride_[player]);
  }

  bool operator==(const GameShape& other) const noexcept {
    return m_ == other.m_;
  }

  std::string describe() const {
    std::string s = std::to_string(n_) + "p[";
    for (int i = 0; i < n_; ++i) {
      if (i) s += "x";
      s += std::to_string(m_[i]);
    }
    return s + "]";
  }

 private:
  int n_;
  std::vector<int> m_;
  std::vector<std::uint64_t> stride_;  // stride_[i] = prod_{j<i} m_j
  int m_min_ = 2, m_max_ = 2;
};

// A profile as explicit 1-based actions. Most hot paths use ProfileIndex; this
// is the boundary representation (CLI, serialization, tests).
struct ActionProfile {
  std::vector<Action> a;
};

// The actions of every player except `player`, identified by its index in the
// little-endian order over the remaining players.
struct Environment {
  int player = 0;
  EnvIndex index = 0;
};

}  // namespace brd
