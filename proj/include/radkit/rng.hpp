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
#ifndef RADKIT_RNG_HPP_
#define RADKIT_RNG_HPP_

#include <array>
#include <cstdint>

namespace radkit {

/// Philox4x32-10 block function (Salmon et al., SC'11). Pure: the same
/// (counter, key) always yields the same 128-bit output on every platform.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter, std::array<uint32_t, 2> key);

/// Counter-based random stream.
///
/// A draw is a pure function of (seed, stream_id, counter); the stream just
/// advances the counter. Work that must not depend on scheduling order
/// (per-cell noise, per-item augmentation) addresses draws directly with
/// `at()` or derives an independent child with `split()`.
class RngStream {
 public:
  RngStream() = default;
  RngStream(uint64_t seed, uint64_t stream_id, uint64_t counter = 0)
      : seed_(seed), stream_id_(stream_id), counter_(counter) {}

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }
  uint64_t counter() const { return counter_; }

  uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// True with probability p. p <= 0 never fires, p >= 1 always does.
  bool bernoulli(double p) { return uniform() < p; }
  /// Standard normal via Box-Muller; consumes exactly two counters.
  double normal();
  /// Uniform integer in [0, n). n must be nonzero.
  uint64_t below(uint64_t n);

  /// Same seed and stream, positioned at an absolute counter.
  RngStream at(uint64_t counter) const { return {seed_, stream_id_, counter}; }
  /// Independent child stream; depends only on (seed, stream_id, child).
  RngStream split(uint64_t child) const;

 private:
  uint64_t seed_ = 0;
  uint64_t stream_id_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace radkit

#endif  // RADKIT_RNG_HPP_
