/*
 * Copyright 2026 The fiboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FIBOOST_RANDOM_HPP_
#define FIBOOST_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace fiboost {

// Reproducible randomness used by every seeded operation.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Bounded draws use rejection sampling on the raw 64-bit output
// (reject x < 2^64 mod n, return x mod n) so results do not depend on the
// standard library's distribution implementations. Shuffles are Fisher-Yates,
// walking i from n-1 down to 1 and swapping a[i] with a[draw(i + 1)].
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t x = engine_();
    while (x < threshold) x = engine_();
    return x % bound;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Permutation of [0, n).
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    shuffle(perm);
    return perm;
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent child seed for a named stream of a parent seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream));
}

// Stream identifiers for derive_seed. Values are part of the reproducibility
// contract; do not renumber.
namespace seed_stream {
inline constexpr std::uint64_t kWrapperFolds = 1;
inline constexpr std::uint64_t kTuneFolds = 2;
inline constexpr std::uint64_t kRandomPartition = 3;
}  // namespace seed_stream

}  // namespace fiboost

#endif  // FIBOOST_RANDOM_HPP_
