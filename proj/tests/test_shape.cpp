#include "brd/shape.hpp"

#include <gtest/gtest.h>

#include "brd/rng.hpp"

using namespace brd;

TEST(GameShape, RejectsDegenerateShapes) {
  EXPECT_THROW(GameShape(1, {2}), std::invalid_argument);
  EXPECT_THROW(GameShape(2, {1, 2}), std::invalid_argument);
  EXPECT_THROW(GameShape(2, {2, 1}), std::invalid_argument);
  EXPECT_THROW(GameShape(3, {2, 2}), std::invalid_argument);
}

TEST(GameShape, DerivedQuantities) {
  const GameShape s(3, {2, 3, 4});
  EXPECT_EQ(s.mu(), 24u);
  EXPECT_EQ(s.q(), 6u);
  EXPECT_EQ(s.min_actions(), 2);
  EXPECT_EQ(s.max_actions(), 4);
  EXPECT_EQ(s.env_count(0), 12u);
  EXPECT_EQ(s.env_count(1), 8u);
  EXPECT_EQ(s.env_count(2), 6u);

  const GameShape cube(3, {2, 2, 2});
  EXPECT_EQ(cube.mu(), 8u);
  EXPECT_EQ(cube.q(), 4u);
  EXPECT_EQ(GameShape(2, {7, 7}).q(), 7u);
}

TEST(GameShape, ProfileIndexingIsLittleEndianPlayerOneFastest) {
  const GameShape s(3, {2, 3, 2});
  EXPECT_EQ(s.profile_index(std::vector<Action>{1, 1, 1}), 0u);
  EXPECT_EQ(s.profile_index(std::vector<Action>{2, 1, 1}), 1u);
  EXPECT_EQ(s.profile_index(std::vector<Action>{1, 2, 1}), 2u);
  EXPECT_EQ(s.profile_index(std::vector<Action>{1, 1, 2}), 6u);
}

TEST(GameShape, ProfileRoundTrip) {
  const GameShape s(4, {2, 3, 4, 5});
  for (ProfileIndex idx = 0; idx < s.mu(); ++idx) {
    const auto a = s.profile_at(idx);
    EXPECT_EQ(s.profile_index(a), idx);
    for (int i = 0; i < s.players(); ++i) EXPECT_EQ(s.action_of(idx, i), a[i]);
  }
}

TEST(GameShape, EnvIndexMatchesRecomputation) {
  const GameShape s(3, {2, 3, 4});
  for (ProfileIndex idx = 0; idx < s.mu(); ++idx) {
    const auto a = s.profile_at(idx);
    for (int i = 0; i < s.players(); ++i) {
      // Independent route: index the other players in a reduced shape.
      std::uint64_t env = 0, stride = 1;
      for (int j = 0; j < s.players(); ++j) {
        if (j == i) continue;
        env += static_cast<std::uint64_t>(a[j] - 1) * stride;
        stride *= static_cast<std::uint64_t>(s.actions(j));
      }
      EXPECT_EQ(s.env_index(i, idx), env);
      EXPECT_EQ(s.profile_from_env(i, env, a[i]), idx);
    }
  }
}

TEST(GameShape, EnvironmentCountPerPlayer) {
  const GameShape s(3, {2, 3, 4});
  for (int i = 0; i < s.players(); ++i)
    EXPECT_EQ(s.env_count(i), s.mu() / static_cast<std::uint64_t>(s.actions(i)));
}

TEST(GameShape, WithActionReplacesOneCoordinate) {
  const GameShape s(3, {3, 3, 3});
  Xoshiro256pp rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const ProfileIndex idx = rng.next_below(s.mu());
    const int i = static_cast<int>(rng.next_below(3));
    const Action a = static_cast<Action>(rng.next_below(3)) + 1;
    const ProfileIndex moved = s.with_action(idx, i, a);
    EXPECT_EQ(s.action_of(moved, i), a);
    for (int j = 0; j < 3; ++j)
      if (j != i) EXPECT_EQ(s.action_of(moved, j), s.action_of(idx, j));
  }
}
