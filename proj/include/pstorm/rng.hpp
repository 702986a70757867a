// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace pstorm {

// SplitMix64 stream. We roll our own instead of <random> because the std::
// distributions are not bit-reproducible across standard libraries, and the
// harness guarantees byte-identical traces for identical seeds.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  // Independent substream: hash-mixes (seed, stream) so that e.g. the
  // trajectory stream and the output-selection stream never overlap.
  static Rng derive(uint64_t seed, uint64_t stream) {
    Rng mixer(seed ^ (0x632be59bd9b4e019ULL * (stream + 1)));
    uint64_t s = mixer.next_u64();
    for (uint64_t i = 0; i <= stream % 4; ++i) s = Rng(s).next_u64();
    return Rng(s);
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}. Multiply-shift; bias is O(n / 2^64).
  int64_t next_below(int64_t n) {
    return static_cast<int64_t>((static_cast<__uint128_t>(next_u64()) *
                                 static_cast<__uint128_t>(n)) >> 64);
  }

  // Standard normal via Box-Muller (no spare caching, keeps state minimal).
  double next_gaussian() {
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0,1]
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Index draw from a cumulative weight table (strictly increasing, last ~1).
  int sample_cdf(const std::vector<double>& cdf) {
    double u = next_double();
    int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (u < cdf[mid]) hi = mid; else lo = mid + 1;
    }
    return lo;
  }

 private:
  uint64_t state_;
};

}  // namespace pstorm
