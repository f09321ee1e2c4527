// SPDX-License-Identifier: Apache-2.0
#include "lioulab/montecarlo.hpp"

#include <stdexcept>

namespace lioulab {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
}

HaltonSequence::HaltonSequence(int dim, std::uint64_t seed) {
    if (dim < 1 || dim > static_cast<int>(sizeof(kPrimes) / sizeof(kPrimes[0])))
        throw std::invalid_argument("halton dimension out of range");
    bases_.assign(kPrimes, kPrimes + dim);
    // A modest deterministic offset decorrelates runs with different seeds
    // while keeping the sequence reproducible.
    index_ = 1 + (mix_seed(seed, 0) % 100003ULL);
}

void HaltonSequence::next(std::span<double> out) {
    if (out.size() != bases_.size()) throw std::invalid_argument("halton output size mismatch");
    for (std::size_t d = 0; d < bases_.size(); ++d) {
        const int b = bases_[d];
        double f = 1.0, r = 0.0;
        std::uint64_t i = index_;
        while (i > 0) {
            f /= b;
            r += f * static_cast<double>(i % static_cast<std::uint64_t>(b));
            i /= static_cast<std::uint64_t>(b);
        }
        out[d] = r;
    }
    ++index_;
}

}  // namespace lioulab
