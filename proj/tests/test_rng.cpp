/**
 * Copyright 2026 The radkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "radkit/rng.hpp"

namespace radkit {
namespace {

using Block = std::array<uint32_t, 4>;

// Published Philox4x32-10 known-answer vectors.
TEST(Philox, KnownAnswerZero) {
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngStream, SameStateSameSequence) {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, AtIsRandomAccess) {
  RngStream seq(3, 9);
  std::vector<uint64_t> values;
  for (int i = 0; i < 10; ++i) values.push_back(seq.next_u64());
  const RngStream base(3, 9);
  for (uint64_t i = 0; i < 10; ++i) {
    RngStream at = base.at(i);
    EXPECT_EQ(at.next_u64(), values[i]);
  }
}

TEST(RngStream, DistinctStreamsAndSplitsDiffer) {
  const RngStream base(1, 0);
  std::set<uint64_t> firsts;
  for (uint64_t c = 0; c < 64; ++c) {
    RngStream child = base.split(c);
    firsts.insert(child.next_u64());
  }
  EXPECT_EQ(firsts.size(), 64u);
  RngStream s0(1, 0), s1(1, 1), t0(2, 0);
  const uint64_t a = s0.next_u64(), b = s1.next_u64(), c = t0.next_u64();
  EXPECT_NE(a, b);
  EXPECT_NE(a, c);
}

TEST(RngStream, SplitIsDeterministic) {
  const RngStream base(5, 5);
  RngStream x = base.split(17), y = base.split(17);
  EXPECT_EQ(x.stream_id(), y.stream_id());
  EXPECT_EQ(x.next_u64(), y.next_u64());
}

TEST(RngStream, UniformMomentsAndRange) {
  RngStream r(11, 0);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(RngStream, NormalMoments) {
  RngStream r(12, 0);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    ASSERT_TRUE(std::isfinite(z));
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.015);
}

TEST(RngStream, BelowIsUnbiasedAndBounded) {
  RngStream r(13, 0);
  std::array<int, 7> counts{};
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const uint64_t v = r.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7, 400);
}

TEST(RngStream, BernoulliEdgeProbabilities) {
  RngStream r(14, 0);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_TRUE(r.bernoulli(1.0));
    EXPECT_FALSE(r.bernoulli(0.0));
  }
}

}  // namespace
}  // namespace radkit
