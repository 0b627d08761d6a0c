#include <gtest/gtest.h>

#include <array>
#include <set>

#include "core/random.hpp"

using rspi::RandomStream;

TEST(RandomStream, SameSeedSameSequence) {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, SplitIsOrderIndependent) {
  const RandomStream root(7);
  RandomStream x = root.split(3);
  const auto first = x.next_u64();
  RandomStream consumed(7);
  for (int i = 0; i < 10; ++i) consumed.next_u64();
  // Children depend only on the parent's key, not on its position.
  EXPECT_EQ(consumed.split(3).next_u64(), first);
  EXPECT_NE(root.split(4).next_u64(), first);
  EXPECT_NE(root.split("a").key(), root.split("b").key());
}

TEST(RandomStream, UniformInRange) {
  RandomStream r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform(-10, 10);
    ASSERT_GE(v, -10.0);
    ASSERT_LT(v, 10.0);
  }
}

TEST(RandomStream, UniformIndexCoversRange) {
  RandomStream r(5);
  std::array<int, 7> counts{};
  for (int i = 0; i < 70000; ++i) ++counts[r.uniform_index(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(RandomStream, DistinctKeysForTupleStreams) {
  const RandomStream root(11);
  std::set<std::uint64_t> keys;
  for (std::uint64_t it = 0; it < 5; ++it)
    for (std::uint64_t id = 0; id < 20; ++id)
      for (std::uint64_t c = 0; c < 20; ++c) keys.insert(root.split(it).split(id).split(c).key());
  EXPECT_EQ(keys.size(), 5u * 20u * 20u);
}
