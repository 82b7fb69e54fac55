#include "brd/game.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "brd/rng.hpp"
#include "brd/sampling.hpp"

using namespace brd;

namespace {

// The 3-player, 2-action example game, given by its best-response digraph.
// Player 1: environments (a2,a3); player 2: (a1,a3); player 3: (a1,a2).
const char* kExampleTableText =
    "2 1 1 2\n"
    "2 2 2 1\n"
    "1 1 1 2\n";

BestResponseTable example_table() {
  return parse_table(GameShape(3, {2, 2, 2}), kExampleTableText);
}

// A payoff tensor realizing a given table: the best response earns 1, every
// other action 0.
Game realize(const BestResponseTable& table) {
  const GameShape& s = table.shape;
  std::vector<double> u(s.mu() * static_cast<std::uint64_t>(s.players()), 0.0);
  for (int i = 0; i < s.players(); ++i)
    for (EnvIndex e = 0; e < s.env_count(i); ++e)
      u[static_cast<std::uint64_t>(i) * s.mu() +
        s.profile_from_env(i, e, table.best(i, e))] = 1.0;
  return Game(s, std::move(u));
}

// All 16 best-response tables of the 2x2 shape.
std::vector<BestResponseTable> all_2x2_tables() {
  const GameShape s(2, {2, 2});
  std::vector<BestResponseTable> out;
  for (int bits = 0; bits < 16; ++bits) {
    std::vector<std::vector<Action>> br{
        {1 + (bits & 1), 1 + ((bits >> 1) & 1)},
        {1 + ((bits >> 2) & 1), 1 + ((bits >> 3) & 1)}};
    out.emplace_back(s, br);
  }
  return out;
}

}  // namespace

TEST(DeriveBestResponse, DominantActionWins) {
  // Player 1 has a dominant action 2: payoff 1 when playing 2, else 0.
  const GameShape s(2, {2, 2});
  std::vector<double> u(8, 0.0);
  for (EnvIndex e = 0; e < 2; ++e) u[s.profile_from_env(0, e, 2)] = 1.0;
  u[4 + 0] = 0.3;  // player 2 payoffs, arbitrary but tie-free per column
  u[4 + 1] = 0.2;
  u[4 + 2] = 0.1;
  u[4 + 3] = 0.4;
  const auto table = derive_best_response_table(Game(s, u));
  EXPECT_EQ(table.best(0, 0), 2);
  EXPECT_EQ(table.best(0, 1), 2);
}

TEST(DeriveBestResponse, ExampleGamePayoffsReproduceItsDigraph) {
  const BestResponseTable expected = example_table();
  const auto derived = derive_best_response_table(realize(expected));
  EXPECT_EQ(to_text(derived), kExampleTableText);
  // The sink (1,2,1) forces player 3's best response at environment
  // (a1=1, a2=2) to be action 1.
  const GameShape& s = expected.shape;
  EXPECT_EQ(derived.best(2, s.env_index(2, s.profile_index(std::vector<Action>{1, 2, 1}))), 1);
}

TEST(DeriveBestResponse, MatchesIndependentArgmaxScan) {
  const GameShape s(3, {2, 3, 4});
  const Game game = sample_game_payoffs(s, SeedSpec{2024, 0, 0});
  const auto table = derive_best_response_table(game);
  for (ProfileIndex idx = 0; idx < s.mu(); ++idx) {
    const auto a = s.profile_at(idx);
    for (int i = 0; i < s.players(); ++i) {
      Action best = 0;
      double best_u = -1;
      for (Action x = 1; x <= s.actions(i); ++x) {
        auto b = a;
        b[i] = x;
        const double u = game.payoff(i, s.profile_index(b));
        if (u > best_u) {
          best_u = u;
          best = x;
        }
      }
      EXPECT_EQ(table.best(i, s.env_index(i, idx)), best);
    }
  }
}

TEST(DeriveBestResponse, TiePolicy) {
  const GameShape s(2, {2, 2});
  std::vector<double> u(8, 0.0);  // all payoffs tie
  EXPECT_THROW(derive_best_response_table(Game(s, u), TiePolicy::strict), TieDetected);
  std::uint64_t ties = 0;
  const auto table = derive_best_response_table(Game(s, u), TiePolicy::lowest_index, &ties);
  EXPECT_EQ(ties, 4u);
  for (int i = 0; i < 2; ++i)
    for (EnvIndex e = 0; e < 2; ++e) EXPECT_EQ(table.best(i, e), 1);
}

TEST(DeriveBestResponse, InvariantUnderPositiveScalingAndSliceShifts) {
  const GameShape s(3, {2, 2, 3});
  const Game game = sample_game_payoffs(s, SeedSpec{55, 1, 2});
  const auto base = derive_best_response_table(game);

  Xoshiro256pp rng(321);
  std::vector<double> u = game.payoffs;
  const double scale = 0.25 + 3.0 * rng.next_double();
  for (int i = 0; i < s.players(); ++i) {
    std::vector<double> shift(s.env_count(i));
    for (auto& x : shift) x = 10.0 * (rng.next_double() - 0.5);
    for (ProfileIndex idx = 0; idx < s.mu(); ++idx)
      u[static_cast<std::uint64_t>(i) * s.mu() + idx] =
          scale * u[static_cast<std::uint64_t>(i) * s.mu() + idx] +
          shift[s.env_index(i, idx)];
  }
  const auto transformed = derive_best_response_table(Game(s, u));
  EXPECT_EQ(to_text(transformed), to_text(base));
}

TEST(EnumeratePne, ExampleGameHasUniqueEquilibrium) {
  const auto table = example_table();
  const PneSet pne = enumerate_pne(table);
  ASSERT_EQ(pne.size(), 1u);
  EXPECT_EQ(pne.profiles[0],
            table.shape.profile_index(std::vector<Action>{1, 2, 1}));
}

TEST(EnumeratePne, AllOnesTable) {
  const GameShape s(3, {2, 2, 2});
  std::vector<std::vector<Action>> br(3, std::vector<Action>(4, 1));
  const PneSet pne = enumerate_pne(BestResponseTable(s, br));
  ASSERT_EQ(pne.size(), 1u);
  EXPECT_EQ(pne.profiles[0], 0u);
}

TEST(EnumeratePne, MatchesBruteForceOnAll2x2Tables) {
  std::uint64_t total = 0;
  for (const auto& table : all_2x2_tables()) {
    const PneSet pne = enumerate_pne(table);
    // Independent check of each of the 4 profiles.
    std::set<ProfileIndex> expected;
    for (Action a1 = 1; a1 <= 2; ++a1)
      for (Action a2 = 1; a2 <= 2; ++a2)
        if (table.br[0][a2 - 1] == a1 && table.br[1][a1 - 1] == a2)
          expected.insert(table.shape.profile_index(std::vector<Action>{a1, a2}));
    EXPECT_EQ(std::set<ProfileIndex>(pne.profiles.begin(), pne.profiles.end()), expected);
    EXPECT_EQ(count_pne(table), pne.size());
    total += pne.size();
  }
  EXPECT_EQ(total, 16u);  // one equilibrium per table on average, exactly
}

TEST(MoveEdges, OutDegreeLaw) {
  const GameShape s(3, {2, 3, 2});
  const auto table = sample_best_response_table(s, SeedSpec{9, 0, 0});
  for (ProfileIndex idx = 0; idx < s.mu(); ++idx) {
    for (int i = 0; i < s.players(); ++i) {
      const ProfileIndex target = table.move(i, idx);
      int diff = 0;
      for (int j = 0; j < s.players(); ++j)
        if (s.action_of(target, j) != s.action_of(idx, j)) ++diff;
      EXPECT_LE(diff, 1);
      if (diff == 1) EXPECT_NE(s.action_of(target, i), s.action_of(idx, i));
      const bool already_best =
          table.best(i, s.env_index(i, idx)) == s.action_of(idx, i);
      EXPECT_EQ(target == idx, already_best);
    }
  }
}

namespace {

// Exhaustive path search: can any sequence of single-player moves reach an
// equilibrium from `start`?
bool dfs_can_reach(const BestResponseTable& table, ProfileIndex start) {
  const GameShape& s = table.shape;
  std::vector<std::uint8_t> visited(s.mu(), 0);
  std::vector<ProfileIndex> stack{start};
  visited[start] = 1;
  while (!stack.empty()) {
    const ProfileIndex cur = stack.back();
    stack.pop_back();
    if (is_pne(table, cur)) return true;
    for (int i = 0; i < s.players(); ++i) {
      const ProfileIndex next = table.move(i, cur);
      if (!visited[next]) {
        visited[next] = 1;
        stack.push_back(next);
      }
    }
  }
  return false;
}

void expect_reach_matches_dfs(const BestResponseTable& table) {
  const ReachFlags flags = reach_classification(table);
  for (ProfileIndex idx = 0; idx < table.shape.mu(); ++idx) {
    EXPECT_EQ(flags.is_pne(idx), is_pne(table, idx));
    EXPECT_EQ(flags.can_reach_pne(idx), dfs_can_reach(table, idx)) << idx;
  }
}

}  // namespace

TEST(ReachClassification, EquilibriaReachThemselves) {
  const auto table = example_table();
  const ReachFlags flags = reach_classification(table);
  const ProfileIndex pne =
      table.shape.profile_index(std::vector<Action>{1, 2, 1});
  EXPECT_TRUE(flags.is_pne(pne));
  EXPECT_TRUE(flags.can_reach_pne(pne));
}

TEST(ReachClassification, ExampleGameCornerCanReach) {
  const auto table = example_table();
  const ReachFlags flags = reach_classification(table);
  EXPECT_TRUE(flags.can_reach_pne(
      table.shape.profile_index(std::vector<Action>{1, 1, 1})));
}

TEST(ReachClassification, FourCycleWithoutSinkReachesNothing) {
  const GameShape s(2, {2, 2});
  // (1,1)->(2,1)->(2,2)->(1,2)->(1,1)
  const BestResponseTable table(s, {{2, 1}, {1, 2}});
  EXPECT_TRUE(enumerate_pne(table).empty());
  const ReachFlags flags = reach_classification(table);
  for (ProfileIndex idx = 0; idx < s.mu(); ++idx)
    EXPECT_FALSE(flags.can_reach_pne(idx));
}

TEST(ReachClassification, AgreesWithExhaustiveSearch) {
  for (const auto& table : all_2x2_tables()) expect_reach_matches_dfs(table);
  // Random tables across small shapes (profile spaces up to 64).
  for (const auto& shape :
       {GameShape(3, {2, 2, 2}), GameShape(2, {3, 3}), GameShape(2, {4, 6}),
        GameShape(3, {2, 3, 4}), GameShape(4, {2, 2, 2, 2}), GameShape(2, {8, 8}),
        GameShape(6, {2, 2, 2, 2, 2, 2})}) {
    for (std::uint64_t g = 0; g < 300; ++g)
      expect_reach_matches_dfs(sample_best_response_table(shape, SeedSpec{77, 0, g}));
  }
}

TEST(TableText, GoldenAndRoundTrip) {
  const auto table = example_table();
  EXPECT_EQ(to_text(table), kExampleTableText);
  const auto reparsed = parse_table(table.shape, to_text(table));
  EXPECT_EQ(reparsed.br, table.br);
  EXPECT_THROW(parse_table(table.shape, "1 1 1 1\n"), std::invalid_argument);
}

TEST(Game, RejectsWrongTensorSize) {
  EXPECT_THROW(Game(GameShape(2, {2, 2}), std::vector<double>(7, 0.0)),
               std::invalid_argument);
}

TEST(BestResponseTable, ValidatesEntries) {
  const GameShape s(2, {2, 2});
  EXPECT_THROW(BestResponseTable(s, {{1, 3}, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(BestResponseTable(s, {{1}, {1, 1}}), std::invalid_argument);
}
