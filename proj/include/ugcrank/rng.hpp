// Copyright 2026 The ugcrank Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ugcrank {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based generator: draw i for key k is a pure function of (k, i), so
// any element of a stream can be regenerated without replaying the prefix.
// Parallel kernels use the stateless at()/normal_at() form keyed by element
// index; sequential code uses the stateful wrapper.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr std::uint64_t at(std::uint64_t key, std::uint64_t index) noexcept {
    return splitmix64(key ^ splitmix64(index ^ 0xD1B54A32D192ED03ull));
  }

  // Uniform in [0,1) with 53 random bits.
  static constexpr double uniform_at(std::uint64_t key, std::uint64_t index) noexcept {
    return static_cast<double>(at(key, index) >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller over draws 2i and 2i+1.
  static double normal_at(std::uint64_t key, std::uint64_t index) noexcept {
    const double u1 = 1.0 - uniform_at(key, 2 * index);  // (0,1]
    const double u2 = uniform_at(key, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t next_u64() noexcept { return at(key_, counter_++); }
  double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }
  double normal() noexcept { return normal_at(key_, counter_++); }

  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= limit) return r % n;
    }
  }

  // Derive an independent key for a substream (e.g. one per epoch).
  std::uint64_t fork() noexcept { return splitmix64(next_u64() ^ 0xA0761D6478BD642Full); }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ugcrank
