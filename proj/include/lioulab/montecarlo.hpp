// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace lioulab {

/// Deterministic uniform stream: mt19937_64 raw output mapped to [0,1)
/// manually, so results do not depend on the standard library's
/// distribution implementations.
class UniformStream {
  public:
    explicit UniformStream(std::uint64_t seed) : eng_(seed) {}

    double next() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double next(double lo, double hi) { return lo + (hi - lo) * next(); }

  private:
    std::mt19937_64 eng_;
};

/// SplitMix64 hash; used to derive independent substream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Halton low-discrepancy sequence in [0,1)^dim (prime bases 2,3,5,...);
/// the seed offsets the start index so "fixed seed" selects a fixed slice.
class HaltonSequence {
  public:
    HaltonSequence(int dim, std::uint64_t seed);

    void next(std::span<double> out);

  private:
    std::vector<int> bases_;
    std::uint64_t index_;
};

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::uint64_t samples = 0;
};

}  // namespace lioulab
