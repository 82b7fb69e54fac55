#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "brd/dynamics.hpp"
#include "brd/rng.hpp"
#include "brd/shape.hpp"

// The coupled system: a memoryless clockwork random walk, a response-memoized
// replay of it that is distributed exactly like the best-response dynamic on
// a freshly sampled game, and a variant with one profile pre-planted as a
// sink. The walk/replay equalities (equal first environment-repeat times,
// equal prefixes before that) hold path by path and are asserted on every run.

namespace brd {

// Clockwork random walk: starts uniform, and at each step the acting player's
// coordinate is redrawn uniformly (self-moves allowed). Memoryless.
inline std::vector<ProfileIndex> run_clockwork_random_walk(const GameShape& shape,
                                                           const SeedSpec& seed,
                                                           std::uint64_t horizon) {
  Xoshiro256pp rng = seed.with_purpose(StreamPurpose::walk).make_rng();
  std::vector<ProfileIndex> path;
  path.reserve(horizon + 1);
  ProfileIndex cur = rng.next_below(shape.mu());
  path.push_back(cur);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const int i = clockwork_player(t, shape.players());
    const Action a = static_cast<Action>(
                         rng.next_below(static_cast<std::uint64_t>(shape.actions(i)))) + 1;
    cur = shape.with_action(cur, i, a);
    path.push_back(cur);
  }
  return path;
}

struct CoupledRun {
  std::vector<ProfileIndex> walk_path;     // the free walk
  std::vector<ProfileIndex> coupled_path;  // the memoized replay
  std::uint64_t walk_env_repeat = 0;       // first env repeat along the walk
  std::uint64_t coupled_env_repeat = 0;    // first env repeat along the replay
  Outcome outcome;                         // classification of the replay
  std::optional<std::uint64_t> sink_hit_time;  // sink variant only
  std::uint64_t memo_writes = 0;
};

namespace detail {

inline std::uint64_t memo_key(const GameShape& shape, int player, EnvIndex e) {
  return static_cast<std::uint64_t>(player) * shape.mu() + e;
}

inline CoupledRun run_coupled_impl(const GameShape& shape, const SeedSpec& seed,
                                   std::optional<ProfileIndex> sink) {
  Xoshiro256pp rng = seed.with_purpose(StreamPurpose::walk).make_rng();
  const int n = shape.players();
  const std::uint64_t max_steps =
      static_cast<std::uint64_t>(n) * (shape.q() + 1) + 1;

  CoupledRun run;
  std::unordered_map<std::uint64_t, Action> memo;
  memo.reserve(64);
  if (sink) {
    for (int i = 0; i < n; ++i)
      memo.emplace(memo_key(shape, i, shape.env_index(i, *sink)),
                   shape.action_of(*sink, i));
  }

  std::vector<std::unordered_set<EnvIndex>> walk_seen(n), coupled_seen(n);
  std::unordered_map<std::uint64_t, std::uint64_t> first_visit;
  first_visit.reserve(64);

  ProfileIndex walk = rng.next_below(shape.mu());
  ProfileIndex coupled = walk;
  run.walk_path.push_back(walk);
  run.coupled_path.push_back(coupled);
  first_visit.emplace(coupled * static_cast<std::uint64_t>(n), 0);

  bool have_cycle = false;
  for (std::uint64_t t = 1; t <= max_steps; ++t) {
    const int i = clockwork_player(t, n);

    const EnvIndex walk_env = shape.env_index(i, walk);
    if (run.walk_env_repeat == 0 && !walk_seen[i].insert(walk_env).second)
      run.walk_env_repeat = t;
    const Action drawn = static_cast<Action>(
                             rng.next_below(static_cast<std::uint64_t>(shape.actions(i)))) + 1;
    walk = shape.with_action(walk, i, drawn);

    const EnvIndex env = shape.env_index(i, coupled);
    if (run.coupled_env_repeat == 0 && !coupled_seen[i].insert(env).second)
      run.coupled_env_repeat = t;
    auto [it, inserted] = memo.emplace(memo_key(shape, i, env), drawn);
    if (inserted) ++run.memo_writes;
    coupled = shape.profile_from_env(i, env, it->second);

    run.walk_path.push_back(walk);
    run.coupled_path.push_back(coupled);
    if (sink && !run.sink_hit_time && coupled == *sink) run.sink_hit_time = t;

    if (!have_cycle) {
      const std::uint64_t key = coupled * static_cast<std::uint64_t>(n) +
                                t % static_cast<std::uint64_t>(n);
      auto [fit, fresh] = first_visit.emplace(key, t);
      if (!fresh) {
        const std::uint64_t entry = fit->second;
        run.outcome.cycle_entry_time = entry > 0 ? entry : 1;
        run.outcome.cycle_rounds =
            static_cast<int>((t - entry) / static_cast<std::uint64_t>(n));
        have_cycle = true;
      }
    }
    if (have_cycle && run.walk_env_repeat && run.coupled_env_repeat) break;
  }
  if (!have_cycle || !run.walk_env_repeat || !run.coupled_env_repeat)
    throw InvariantViolation("coupled run exceeded the environment-repeat bound");

  run.outcome.env_repeat_time = run.coupled_env_repeat;
  run.outcome.kind = run.outcome.cycle_rounds == 1 ? OutcomeKind::pne_hit
                                                   : OutcomeKind::cycle_hit;
  if (run.outcome.kind == OutcomeKind::pne_hit)
    run.outcome.pne_hit_time = run.outcome.cycle_entry_time;

  if (!sink) {
    if (run.walk_env_repeat != run.coupled_env_repeat)
      throw InvariantViolation("coupled run: environment-repeat times differ");
    for (std::uint64_t t = 0; t < run.walk_env_repeat; ++t)
      if (run.walk_path[t] != run.coupled_path[t])
        throw InvariantViolation("coupled run: prefix mismatch before first repeat");
  }
  return run;
}

}  // namespace detail

// Replay of the walk with write-once response memoization; distributed exactly
// like the clockwork dynamic on a freshly drawn game from the same start.
inline CoupledRun run_coupled(const GameShape& shape, const SeedSpec& seed) {
  return detail::run_coupled_impl(shape, seed, std::nullopt);
}

// Same, but with all responses at `sink` pre-planted so the profile behaves as
// an equilibrium; distributed like the dynamic conditioned on that profile
// being one. The walk/replay repeat-time equality is not asserted here (the
// planted responses can detach the replay from the walk earlier).
inline CoupledRun run_coupled_with_sink(const GameShape& shape, ProfileIndex sink,
                                        const SeedSpec& seed) {
  return detail::run_coupled_impl(shape, seed, sink);
}

}  // namespace brd
