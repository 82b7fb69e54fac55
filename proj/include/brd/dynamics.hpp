#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "brd/game.hpp"
#include "brd/rng.hpp"
#include "brd/shape.hpp"

// Best-response dynamics under clockwork and random playing sequences,
// with exact outcome classification.
//
// Times start at t = 1. Under the clockwork sequence player 1 + (t-1) mod n
// acts at time t; under the random sequence the acting player is drawn
// uniformly at each step. A path that starts at an equilibrium still registers
// hitting time 1 (the first step keeps the profile in place).

namespace brd {

struct EmptySample : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SequenceKind { clockwork, random };

// Player (0-based) acting at time t >= 1 under the clockwork sequence.
inline int clockwork_player(std::uint64_t t, int n) {
  return static_cast<int>((t - 1) % static_cast<std::uint64_t>(n));
}

// Thin representation of a playing sequence for API purposes; the runners
// below inline the two cases.
struct PlayingSequence {
  SequenceKind kind = SequenceKind::clockwork;
  SeedSpec seed;  // used by the random sequence only
};

enum class OutcomeKind {
  pne_hit,    // absorbed at an equilibrium
  cycle_hit,  // entered a best-response cycle of n*k profiles, k >= 2
  trap,       // random sequence only: no equilibrium reachable anymore
};

struct Outcome {
  OutcomeKind kind = OutcomeKind::trap;
  // Rounds-period of the cycle entered (1 means equilibrium). Clockwork only.
  int cycle_rounds = 0;
  // First time the path is inside its eventual cycle. Clockwork only.
  std::optional<std::uint64_t> cycle_entry_time;
  // First time some player faces an environment they already faced at one of
  // their earlier turns. Clockwork only; always strictly after the entry time.
  std::optional<std::uint64_t> env_repeat_time;
  // Hitting time of the equilibrium set, when the run converged.
  std::optional<std::uint64_t> pne_hit_time;

  bool converged() const { return kind == OutcomeKind::pne_hit; }
};

struct TrajectoryStep {
  std::uint64_t t;
  int player;  // 0-based
  ProfileIndex profile;
};

struct TrajectoryRecord {
  ProfileIndex initial = 0;
  std::vector<TrajectoryStep> steps;
  OutcomeKind termination = OutcomeKind::trap;
};

namespace detail {

struct NoTrace {
  void start(ProfileIndex) {}
  void step(std::uint64_t, int, ProfileIndex) {}
  void finish(OutcomeKind) {}
};

struct Tracer {
  TrajectoryRecord* rec;
  void start(ProfileIndex a0) {
    rec->initial = a0;
    rec->steps.clear();
  }
  void step(std::uint64_t t, int player, ProfileIndex p) {
    rec->steps.push_back({t, player, p});
  }
  void finish(OutcomeKind k) { rec->termination = k; }
};

// Deterministic clockwork run. Classification works on states
// (profile, t mod n): the first state revisit happens exactly when the first
// repeated environment forces a replay, so one pass detects both quantities.
// The first occurrence of the revisited state is the cycle entry time and the
// state-revisit gap is the cycle length.
template <typename Trace>
Outcome run_clockwork_impl(const BestResponseTable& table, ProfileIndex a0,
                           Trace trace) {
  const GameShape& shape = table.shape;
  const int n = shape.players();
  const std::uint64_t max_steps =
      static_cast<std::uint64_t>(n) * (shape.q() + 1) + 1;

  trace.start(a0);

  std::unordered_map<std::uint64_t, std::uint64_t> first_visit;
  first_visit.reserve(64);
  std::vector<std::unordered_set<EnvIndex>> seen_envs(n);
  for (auto& s : seen_envs) s.reserve(16);

  ProfileIndex cur = a0;
  first_visit.emplace(cur * static_cast<std::uint64_t>(n), 0);  // state at t=0

  Outcome out;
  bool have_cycle = false, have_repeat = false;
  for (std::uint64_t t = 1; t <= max_steps; ++t) {
    const int i = clockwork_player(t, n);
    const EnvIndex e = shape.env_index(i, cur);
    if (!have_repeat && !seen_envs[i].insert(e).second) {
      out.env_repeat_time = t;
      have_repeat = true;
    }
    cur = shape.profile_from_env(i, e, table.best(i, e));
    trace.step(t, i, cur);
    if (!have_cycle) {
      const std::uint64_t key =
          cur * static_cast<std::uint64_t>(n) + t % static_cast<std::uint64_t>(n);
      auto [it, inserted] = first_visit.emplace(key, t);
      if (!inserted) {
        const std::uint64_t entry = it->second;
        out.cycle_entry_time = entry > 0 ? entry : 1;
        out.cycle_rounds = static_cast<int>((t - entry) / static_cast<std::uint64_t>(n));
        have_cycle = true;
      }
    }
    if (have_cycle && have_repeat) break;
  }
  if (!have_cycle || !have_repeat)
    throw InvariantViolation("clockwork run exceeded the environment-repeat bound");
  if (*out.cycle_entry_time >= *out.env_repeat_time)
    throw InvariantViolation("cycle entry time not before environment repeat time");

  out.kind = out.cycle_rounds == 1 ? OutcomeKind::pne_hit : OutcomeKind::cycle_hit;
  if (out.kind == OutcomeKind::pne_hit) out.pne_hit_time = out.cycle_entry_time;
  trace.finish(out.kind);
  return out;
}

// Random-sequence run. Terminates with probability one without a step cutoff:
// a state from which no equilibrium is reachable is classified as a trap on
// arrival, everything else eventually gets absorbed.
template <typename Trace>
Outcome run_random_impl(const BestResponseTable& table, const ReachFlags& reach,
                        ProfileIndex a0, Xoshiro256pp& rng, Trace trace) {
  const GameShape& shape = table.shape;
  const int n = shape.players();

  trace.start(a0);
  Outcome out;
  ProfileIndex cur = a0;
  if (!reach.can_reach_pne(cur)) {
    out.kind = OutcomeKind::trap;
    trace.finish(out.kind);
    return out;
  }
  for (std::uint64_t t = 1;; ++t) {
    const int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    const EnvIndex e = shape.env_index(i, cur);
    cur = shape.profile_from_env(i, e, table.best(i, e));
    trace.step(t, i, cur);
    if (reach.is_pne(cur)) {
      out.kind = OutcomeKind::pne_hit;
      out.pne_hit_time = t;
      break;
    }
    if (!reach.can_reach_pne(cur)) {
      out.kind = OutcomeKind::trap;
      break;
    }
  }
  trace.finish(out.kind);
  return out;
}

}  // namespace detail

inline Outcome run_clockwork(const BestResponseTable& table, ProfileIndex a0) {
  return detail::run_clockwork_impl(table, a0, detail::NoTrace{});
}

inline Outcome run_clockwork(const BestResponseTable& table, ProfileIndex a0,
                             TrajectoryRecord& record) {
  return detail::run_clockwork_impl(table, a0, detail::Tracer{&record});
}

inline Outcome run_random_sequence(const BestResponseTable& table,
                                   const ReachFlags& reach, ProfileIndex a0,
                                   const SeedSpec& seed) {
  Xoshiro256pp rng = seed.with_purpose(StreamPurpose::sequence).make_rng();
  return detail::run_random_impl(table, reach, a0, rng, detail::NoTrace{});
}

inline Outcome run_random_sequence(const BestResponseTable& table,
                                   const ReachFlags& reach, ProfileIndex a0,
                                   const SeedSpec& seed, TrajectoryRecord& record) {
  Xoshiro256pp rng = seed.with_purpose(StreamPurpose::sequence).make_rng();
  return detail::run_random_impl(table, reach, a0, rng, detail::Tracer{&record});
}

// Arithmetic mean of the equilibrium hitting times of converged runs.
inline double mean_duration(std::span<const Outcome> outcomes) {
  double sum = 0;
  std::uint64_t count = 0;
  for (const Outcome& o : outcomes) {
    if (!o.pne_hit_time) continue;
    sum += static_cast<double>(*o.pne_hit_time);
    ++count;
  }
  if (count == 0) throw EmptySample("mean_duration: no converged runs");
  return sum / static_cast<double>(count);
}

}  // namespace brd
