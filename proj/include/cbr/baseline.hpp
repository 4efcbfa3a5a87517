#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cbr/buffer.hpp"
#include "cbr/dataset.hpp"
#include "cbr/sparse.hpp"

namespace cbr {

/// Plain weight vector for the first-order comparison methods.
class LinearRanker {
public:
    explicit LinearRanker(std::size_t dim) : weights_(dim, 0.0) {}
    explicit LinearRanker(std::vector<double> weights) : weights_(std::move(weights)) {}

    std::size_t dim() const noexcept { return weights_.size(); }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<double> weights() noexcept { return weights_; }

    double score(const SparseVector& x) const { return dot(weights_, x); }
    double score(const Instance& x) const { return score(x.features); }

    friend bool operator==(const LinearRanker&, const LinearRanker&) = default;

private:
    std::vector<double> weights_;
};

struct ClassWeights {
    double positive = 1.0;
    double negative = 1.0;
};

/// Exponent bound for the univariate exponential loss; exp(+-30) stays finite.
inline constexpr double kUniExpClamp = 30.0;

/// One gradient step on w_y exp(-y w.x):  w += rate w_y y exp(-clamp(y w.x)) x.
/// Touches only x's support. Throws NumericError if the step is not finite.
void uniexp_step(LinearRanker& ranker, const Instance& x, double rate, ClassWeights weights);

/// Passive-aggressive (PA-I) hinge step on a pair difference:
/// loss = max(0, 1 - y w.z); w += min(C, loss/|z|^2) y z. No-op for z = 0.
/// Returns true if w changed.
bool pa_pair_step(LinearRanker& ranker, const SparseVector& z, int y, double penalty);

struct UniExpConfig {
    double rate = 1.0;
    /// Fixed class weights; when absent, w_y = (n_pos + n_neg) / (2 n_y) from
    /// the counts seen so far, current instance included.
    std::optional<ClassWeights> weights;
};

/// Pointwise online Uni-Exp: one uniexp_step per instance, no buffers.
LinearRanker train_uniexp(std::span<const Instance> stream, std::size_t dim, const UniExpConfig& config,
                          TrainStats* stats = nullptr);

struct PaPairConfig {
    BufferPolicy policy = BufferPolicy::ReservoirSampling;
    std::size_t pos_capacity = 50;
    std::size_t neg_capacity = 50;
    double penalty = 1.0;
    std::uint64_t seed = 0;
};

/// Buffered pairwise first-order ranker: same buffer bookkeeping as the
/// confidence-weighted trainer, with pa_pair_step as the per-pair update.
LinearRanker train_pa_pair(std::span<const Instance> stream, std::size_t dim, const PaPairConfig& config,
                           TrainStats* stats = nullptr, const AdmitObserver& observer = {});

}  // namespace cbr
