#include "cbr/cw_ranker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cbr/error.hpp"
#include "cbr/kernels.hpp"

namespace cbr {
namespace {

void check_penalty(double penalty) {
    if (!(penalty > 0.0) || !std::isfinite(penalty)) {
        throw InvalidInput("penalty C must be positive and finite, got " + std::to_string(penalty));
    }
}

void check_pair(const SparseVector& z, int y, std::size_t dim) {
    if (y != 1 && y != -1) throw InvalidInput("pair label must be +1 or -1, got " + std::to_string(y));
    if (max_index(z) > dim) {
        throw ShapeError("pair difference index " + std::to_string(max_index(z)) + " exceeds dimension " +
                         std::to_string(dim));
    }
    for (const auto& f : z) {
        if (!std::isfinite(f.value)) throw NumericError("non-finite value in pair difference");
    }
}

void check_finite(double margin, double variance) {
    if (!std::isfinite(margin) || !std::isfinite(variance)) {
        throw NumericError("non-finite margin or variance in confidence-weighted step");
    }
}

double loss_of(const ProbitParams& probit, double margin, double variance) {
    return std::max(0.0, probit.phi * std::sqrt(std::max(variance, 0.0)) - margin);
}

template <class Ranker>
std::size_t update_against_buffer(Ranker& ranker, const Instance& x, const PairBuffer& opposite,
                                  const StepObserver& observer) {
    std::size_t active = 0;
    for (const auto& other : opposite) {
        if (other.label == x.label) {
            throw ContractViolation("opposite buffer holds an instance with the incoming label");
        }
        UpdateDiagnostics diag;
        if constexpr (std::is_same_v<Ranker, GaussianRanker>) {
            diag = scw_step(ranker, difference(x.features, other.features), x.label);
        } else {
            diag = scw_diag_step(ranker, difference(x.features, other.features), x.label);
        }
        active += diag.alpha > 0.0;
        if (observer) observer(diag);
    }
    return active;
}

template <class Ranker>
Ranker train_stream(std::span<const Instance> stream, std::size_t dim, const CbrConfig& config, TrainStats* stats,
                    const AdmitObserver& observer) {
    config.validate();
    if (stream.empty()) throw InvalidInput("training stream is empty");
    Ranker ranker(dim, ProbitParams::from_eta(config.eta), config.penalty);
    BufferedStream buffers(config.policy, config.pos_capacity, config.neg_capacity, config.seed);
    TrainStats local;
    for (std::size_t t = 0; t < stream.size(); ++t) {
        const Instance& x = stream[t];
        const PairBuffer& opposite = buffers.admit(x);
        if (observer) observer(t, buffers);
        local.pair_steps += opposite.size();
        local.active_steps += update_ranker(ranker, x, opposite);
    }
    local.instances = stream.size();
    local.single_class = buffers.positives().seen() == 0 || buffers.negatives().seen() == 0;
    if (stats) *stats = local;
    return ranker;
}

}  // namespace

StepCoefficients scw_coefficients(double margin, double variance, const ProbitParams& probit, double penalty) {
    const double phi = probit.phi;
    const double root_v = std::sqrt(variance);
    const double gap = phi * root_v - margin;
    if (!(variance > 0.0)) return {};
    // Zero step: u reduces to v, beta to 0.
    if (!(gap > 0.0)) return {0.0, 0.0, variance};

    const double phi2 = phi * phi;
    const double disc = std::sqrt(margin * margin * phi2 * phi2 / 4.0 + variance * phi2 * probit.zeta);
    // For m > 0, -m psi + disc = zeta (phi sqrt(v) - m)(phi sqrt(v) + m) / (disc + m psi).
    const double inner = margin <= 0.0 ? -margin * probit.psi + disc
                                       : probit.zeta * gap * (phi * root_v + margin) / (disc + margin * probit.psi);
    const double alpha = std::min(penalty, inner / (variance * probit.zeta));

    // (1/2)(-a + sqrt(a^2 + 4v)) = 2v / (a + sqrt(a^2 + 4v)), a = alpha v phi.
    const double a = alpha * variance * phi;
    const double root_u = 2.0 * variance / (a + std::sqrt(a * a + 4.0 * variance));
    const double beta = alpha * phi / (root_u + a);
    return {alpha, beta, root_u * root_u};
}

GaussianRanker::GaussianRanker(std::size_t dim, ProbitParams probit, double penalty)
    : mean_(dim, 0.0), covariance_(DenseMatrix::identity(dim)), probit_(probit), penalty_(penalty) {
    check_penalty(penalty);
}

GaussianRanker::GaussianRanker(std::vector<double> mean, DenseMatrix covariance, ProbitParams probit, double penalty)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), probit_(probit), penalty_(penalty) {
    check_penalty(penalty);
    if (covariance_.dim() != mean_.size()) throw ShapeError("covariance and mean dimensions differ");
}

DiagGaussianRanker::DiagGaussianRanker(std::size_t dim, ProbitParams probit, double penalty)
    : mean_(dim, 0.0), confidence_(dim, 1.0), probit_(probit), penalty_(penalty) {
    check_penalty(penalty);
}

DiagGaussianRanker::DiagGaussianRanker(std::vector<double> mean, std::vector<double> confidence, ProbitParams probit,
                                       double penalty)
    : mean_(std::move(mean)), confidence_(std::move(confidence)), probit_(probit), penalty_(penalty) {
    check_penalty(penalty);
    if (confidence_.size() != mean_.size()) throw ShapeError("confidence and mean dimensions differ");
}

double pair_loss(const GaussianRanker& ranker, const SparseVector& z, int y) {
    check_pair(z, y, ranker.dim());
    std::vector<double> s(ranker.dim());
    kernels::symv_sparse(ranker.covariance(), z, s);
    double variance = 0.0;
    for (const auto& f : z) variance += f.value * s[f.index - 1];
    return loss_of(ranker.probit(), y * ranker.score(z), variance);
}

double pair_loss(const DiagGaussianRanker& ranker, const SparseVector& z, int y) {
    check_pair(z, y, ranker.dim());
    double variance = 0.0;
    for (const auto& f : z) variance += f.value * f.value / (ranker.confidence()[f.index - 1] + ranker.penalty());
    return loss_of(ranker.probit(), y * ranker.score(z), variance);
}

UpdateDiagnostics scw_step(GaussianRanker& ranker, const SparseVector& z, int y) {
    check_pair(z, y, ranker.dim());
    UpdateDiagnostics diag;
    diag.z = z;
    const std::size_t d = ranker.dim();
    std::vector<double> s(d);
    kernels::symv_sparse(ranker.covariance_, z, s);
    for (const auto& f : z) diag.variance += f.value * s[f.index - 1];
    diag.margin = y * dot(ranker.mean_, z);
    check_finite(diag.margin, diag.variance);
    diag.loss = loss_of(ranker.probit_, diag.margin, diag.variance);
    if (z.empty() || !(diag.variance > 0.0)) {
        diag.degenerate = true;
        return diag;
    }

    const auto c = scw_coefficients(diag.margin, diag.variance, ranker.probit_, ranker.penalty_);
    diag.alpha = c.alpha;
    diag.beta = c.beta;
    diag.u = c.u;
    if (!(c.alpha > 0.0)) return diag;
    if (!std::isfinite(c.alpha) || !std::isfinite(c.beta)) throw NumericError("non-finite SCW coefficients");

    const double step = c.alpha * y;
    for (std::size_t i = 0; i < d; ++i) ranker.mean_[i] += step * s[i];
    kernels::rank1_downdate(ranker.covariance_, s, c.beta);
    diag.coordinates_written = d + d * d;
    return diag;
}

UpdateDiagnostics scw_diag_step(DiagGaussianRanker& ranker, const SparseVector& z, int y) {
    check_pair(z, y, ranker.dim());
    UpdateDiagnostics diag;
    diag.z = z;
    for (const auto& f : z) {
        diag.variance += f.value * f.value / (ranker.confidence_[f.index - 1] + ranker.penalty_);
    }
    diag.margin = y * dot(ranker.mean_, z);
    check_finite(diag.margin, diag.variance);
    diag.loss = loss_of(ranker.probit_, diag.margin, diag.variance);
    if (z.empty() || !(diag.variance > 0.0)) {
        diag.degenerate = true;
        return diag;
    }

    const auto c = scw_coefficients(diag.margin, diag.variance, ranker.probit_, ranker.penalty_);
    diag.alpha = c.alpha;
    diag.beta = c.beta;
    diag.u = c.u;
    if (!(c.alpha > 0.0)) return diag;
    if (!std::isfinite(c.alpha) || !std::isfinite(c.beta)) throw NumericError("non-finite SCW coefficients");

    const double step = c.alpha * y;
    for (const auto& f : z) {
        const std::size_t k = f.index - 1;
        ranker.mean_[k] += step * f.value / ranker.confidence_[k];
        ranker.confidence_[k] += c.beta * f.value * f.value;
        diag.coordinates_written += 2;
    }
    return diag;
}

std::size_t update_ranker(GaussianRanker& ranker, const Instance& x, const PairBuffer& opposite,
                          const StepObserver& observer) {
    return update_against_buffer(ranker, x, opposite, observer);
}

std::size_t update_ranker(DiagGaussianRanker& ranker, const Instance& x, const PairBuffer& opposite,
                          const StepObserver& observer) {
    return update_against_buffer(ranker, x, opposite, observer);
}

void CbrConfig::validate() const {
    if (!(penalty > 0.0) || !std::isfinite(penalty)) {
        throw InvalidInput("penalty C must be positive and finite, got " + std::to_string(penalty));
    }
    if (!(eta > 0.5 && eta < 1.0)) throw InvalidInput("eta must lie in (0.5, 1), got " + std::to_string(eta));
    if (pos_capacity == 0 || neg_capacity == 0) throw InvalidInput("buffer capacities must be at least 1");
}

GaussianRanker train_cbr(std::span<const Instance> stream, std::size_t dim, const CbrConfig& config,
                         TrainStats* stats, const AdmitObserver& observer) {
    return train_stream<GaussianRanker>(stream, dim, config, stats, observer);
}

DiagGaussianRanker train_cbr_diag(std::span<const Instance> stream, std::size_t dim, const CbrConfig& config,
                                  TrainStats* stats, const AdmitObserver& observer) {
    return train_stream<DiagGaussianRanker>(stream, dim, config, stats, observer);
}

}  // namespace cbr
