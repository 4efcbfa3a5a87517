#include "cbr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "cbr/error.hpp"

namespace cbr {
namespace {

std::vector<int> shuffled_labels(std::size_t n, double positive_fraction, SplitMix64& rng) {
    const auto n_pos = static_cast<std::size_t>(std::llround(static_cast<double>(n) * positive_fraction));
    std::vector<int> labels(n, -1);
    std::fill(labels.begin(), labels.begin() + std::min(n, n_pos), 1);
    for (std::size_t i = n; i > 1; --i) std::swap(labels[i - 1], labels[rng.bounded(i)]);
    return labels;
}

}  // namespace

double GaussianSource::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = rng_.uniform();
    const double u2 = rng_.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

Dataset make_two_gaussians(std::size_t n, double positive_fraction, std::size_t dim, double separation,
                           std::uint64_t seed) {
    if (dim == 0) throw InvalidInput("dimension must be positive");
    GaussianSource gauss(seed);
    const auto labels = shuffled_labels(n, positive_fraction, gauss.rng());
    const double offset = 0.5 * separation / std::sqrt(static_cast<double>(dim));
    std::vector<Instance> out;
    out.reserve(n);
    for (int y : labels) {
        Instance inst;
        inst.label = y;
        for (std::size_t k = 0; k < dim; ++k) {
            const double v = y * offset + gauss.next();
            if (v != 0.0) inst.features.push_back({static_cast<std::uint32_t>(k + 1), v});
        }
        out.push_back(std::move(inst));
    }
    return Dataset(std::move(out), dim);
}

Dataset make_sparse_stream(std::size_t n, std::size_t dim, std::size_t nnz, double positive_fraction, double purity,
                           std::uint64_t seed) {
    if (dim < 2 || nnz == 0 || nnz > dim / 2) throw InvalidInput("need 0 < nnz <= dim/2");
    SplitMix64 rng(seed);
    const auto labels = shuffled_labels(n, positive_fraction, rng);
    const std::size_t half = dim / 2;
    const double value = 1.0 / std::sqrt(static_cast<double>(nnz));
    std::vector<Instance> out;
    out.reserve(n);
    for (int y : labels) {
        std::unordered_set<std::uint32_t> chosen;
        while (chosen.size() < nnz) {
            const bool own = rng.uniform() < purity;
            const bool upper = (y > 0) == own;
            const auto idx = static_cast<std::uint32_t>((upper ? half : 0) + rng.bounded(half) + 1);
            chosen.insert(idx);
        }
        Instance inst;
        inst.label = y;
        for (auto idx : chosen) inst.features.push_back({idx, value});
        std::sort(inst.features.begin(), inst.features.end(),
                  [](const Feature& a, const Feature& b) { return a.index < b.index; });
        out.push_back(std::move(inst));
    }
    return Dataset(std::move(out), dim);
}

}  // namespace cbr
