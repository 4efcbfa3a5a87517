#include "cbr/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cbr/error.hpp"

namespace cbr {

void uniexp_step(LinearRanker& ranker, const Instance& x, double rate, ClassWeights weights) {
    const int y = x.label;
    const double margin = std::clamp(y * ranker.score(x), -kUniExpClamp, kUniExpClamp);
    const double class_weight = y > 0 ? weights.positive : weights.negative;
    const double step = rate * class_weight * y * std::exp(-margin);
    if (!std::isfinite(step)) throw NumericError("non-finite Uni-Exp step");
    auto w = ranker.weights();
    for (const auto& f : x.features) w[f.index - 1] += step * f.value;
}

bool pa_pair_step(LinearRanker& ranker, const SparseVector& z, int y, double penalty) {
    const double norm2 = squared_norm(z);
    if (norm2 == 0.0) return false;
    const double loss = std::max(0.0, 1.0 - y * ranker.score(z));
    if (!(loss > 0.0)) return false;
    const double tau = std::min(penalty, loss / norm2);
    if (!std::isfinite(tau)) throw NumericError("non-finite passive-aggressive step");
    auto w = ranker.weights();
    for (const auto& f : z) w[f.index - 1] += tau * y * f.value;
    return true;
}

LinearRanker train_uniexp(std::span<const Instance> stream, std::size_t dim, const UniExpConfig& config,
                          TrainStats* stats) {
    if (!(config.rate > 0.0) || !std::isfinite(config.rate)) {
        throw InvalidInput("learning rate must be positive, got " + std::to_string(config.rate));
    }
    if (stream.empty()) throw InvalidInput("training stream is empty");
    LinearRanker ranker(dim);
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    for (const auto& x : stream) {
        (x.label > 0 ? n_pos : n_neg) += 1;
        ClassWeights weights;
        if (config.weights) {
            weights = *config.weights;
        } else {
            const double total = static_cast<double>(n_pos + n_neg);
            weights.positive = n_pos ? total / (2.0 * n_pos) : 1.0;
            weights.negative = n_neg ? total / (2.0 * n_neg) : 1.0;
        }
        uniexp_step(ranker, x, config.rate, weights);
    }
    if (stats) {
        *stats = TrainStats{stream.size(), stream.size(), stream.size(), n_pos == 0 || n_neg == 0};
    }
    return ranker;
}

LinearRanker train_pa_pair(std::span<const Instance> stream, std::size_t dim, const PaPairConfig& config,
                           TrainStats* stats, const AdmitObserver& observer) {
    if (!(config.penalty > 0.0) || !std::isfinite(config.penalty)) {
        throw InvalidInput("penalty C must be positive, got " + std::to_string(config.penalty));
    }
    if (stream.empty()) throw InvalidInput("training stream is empty");
    LinearRanker ranker(dim);
    BufferedStream buffers(config.policy, config.pos_capacity, config.neg_capacity, config.seed);
    TrainStats local;
    for (std::size_t t = 0; t < stream.size(); ++t) {
        const Instance& x = stream[t];
        const PairBuffer& opposite = buffers.admit(x);
        if (observer) observer(t, buffers);
        for (const auto& other : opposite) {
            ++local.pair_steps;
            local.active_steps += pa_pair_step(ranker, difference(x.features, other.features), x.label, config.penalty);
        }
    }
    local.instances = stream.size();
    local.single_class = buffers.positives().seen() == 0 || buffers.negatives().seen() == 0;
    if (stats) *stats = local;
    return ranker;
}

}  // namespace cbr
