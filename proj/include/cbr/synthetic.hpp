#pragma once

#include <cstddef>
#include <cstdint>

#include "cbr/dataset.hpp"
#include "cbr/random.hpp"

namespace cbr {

/// Standard normal draws by Box-Muller on SplitMix64.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}
    double next();
    SplitMix64& rng() noexcept { return rng_; }

private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Two isotropic unit-variance Gaussians in `dim` dimensions whose means lie
/// `separation` apart along the diagonal. round(n * positive_fraction)
/// positives, shuffled into the stream. Features stored densely.
Dataset make_two_gaussians(std::size_t n, double positive_fraction, std::size_t dim, double separation,
                           std::uint64_t seed);

/// Sparse bag-of-words-like data: each instance has `nnz` distinct features of
/// value 1/sqrt(nnz); a feature comes from its class's half of the index range
/// with probability `purity`, otherwise from the other half.
Dataset make_sparse_stream(std::size_t n, std::size_t dim, std::size_t nnz, double positive_fraction, double purity,
                           std::uint64_t seed);

}  // namespace cbr
