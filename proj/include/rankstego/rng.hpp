#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic, platform-independent random helpers.
//
// std::uniform_int_distribution is allowed to differ between standard
// library implementations, so everything that must reproduce byte-identical
// artifacts across machines (baseline sampling, nonce generation, test
// generators) uses SplitMix64 plus explicit rejection sampling instead.

#include <cstdint>
#include <string>

namespace rankstego {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw from [0, bound) via rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % bound;
  }

  /// Uniform draw from the inclusive range [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    return lo + below(hi - lo + 1);
  }

  /// Uniform printable ASCII (0x20..0x7e) string of length n.
  std::string printable_ascii(std::size_t n) {
    std::string s(n, ' ');
    for (char& c : s) c = static_cast<char>(0x20 + below(0x7f - 0x20));
    return s;
  }

 private:
  std::uint64_t state_;
};

}  // namespace rankstego
