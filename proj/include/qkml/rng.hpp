// Copyright 2026 The qkml developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

namespace qkml {

/**
 * Counter-based pseudo-random generator (SplitMix64).
 *
 * Output k of stream `seed` is a pure function of (seed, k), so sequences
 * are reproducible across platforms and independent of evaluation order.
 * Not cryptographic.
 */
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, n). Modulo bias is negligible for n << 2^64.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    /// Fair coin mapped to {-1, +1}.
    int next_sign() { return (next_u64() >> 63) ? -1 : 1; }

  private:
    std::uint64_t state_;
};

/// Derives an independent stream seed from a base seed and up to two indices.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    SplitMix64 g(seed ^ (a * 0xD1342543DE82EF95ull) ^ (b * 0x9E3779B97F4A7C15ull));
    g.next_u64();
    return g.next_u64();
}

/// Deterministic in-place Fisher-Yates shuffle driven by a SplitMix64 stream.
template <typename Container>
void shuffle(Container &items, SplitMix64 &rng) {
    const std::uint64_t n = items.size();
    for (std::uint64_t i = n; i > 1; --i) {
        const std::uint64_t j = rng.next_below(i);
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

} // namespace qkml
