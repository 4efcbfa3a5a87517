#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cbr/buffer.hpp"
#include "cbr/dataset.hpp"
#include "cbr/linalg.hpp"
#include "cbr/probit.hpp"
#include "cbr/sparse.hpp"

namespace cbr {

/// Per-pair quantities of one soft confidence-weighted step, reported whether
/// or not the step changed the model.
struct UpdateDiagnostics {
    SparseVector z;           // pair difference x_t - x
    double margin = 0.0;      // m = y (mu . z)
    double variance = 0.0;    // upsilon: z' Sigma z, or sum z_i^2 / (G_i + C) for the diagonal model
    double alpha = 0.0;       // step size, in [0, C]
    double beta = 0.0;        // confidence shrink
    double u = 0.0;
    double loss = 0.0;        // max(0, phi sqrt(upsilon) - m) before the step
    std::size_t coordinates_written = 0;
    bool degenerate = false;  // z == 0 or upsilon == 0: skipped
};

struct StepCoefficients {
    double alpha = 0.0;
    double beta = 0.0;
    double u = 0.0;
};

/// Closed-form SCW coefficients for margin m and variance upsilon > 0.
///
///   alpha = min{C, max{0, (-m psi + sqrt(m^2 phi^4/4 + upsilon phi^2 zeta)) / (upsilon zeta)}}
///   u     = (1/4) (-alpha upsilon phi + sqrt(alpha^2 upsilon^2 phi^2 + 4 upsilon))^2
///   beta  = alpha phi / (sqrt(u) + upsilon alpha phi)
///
/// Both square-root differences are evaluated in cancellation-free form, which
/// makes alpha > 0 coincide exactly with phi sqrt(upsilon) > m.
StepCoefficients scw_coefficients(double margin, double variance, const ProbitParams& probit, double penalty);

/// Ranker weights distributed as N(mu, Sigma) with a full covariance.
/// Fresh state: mu = 0, Sigma = I.
class GaussianRanker {
public:
    /// Throws InvalidInput unless penalty > 0 and finite.
    GaussianRanker(std::size_t dim, ProbitParams probit, double penalty);
    /// Restores a saved state; ShapeError if covariance and mean disagree.
    GaussianRanker(std::vector<double> mean, DenseMatrix covariance, ProbitParams probit, double penalty);

    std::size_t dim() const noexcept { return mean_.size(); }
    std::span<const double> mean() const noexcept { return mean_; }
    const DenseMatrix& covariance() const noexcept { return covariance_; }
    const ProbitParams& probit() const noexcept { return probit_; }
    double penalty() const noexcept { return penalty_; }

    /// mu . x over the stored features. ShapeError for an index beyond dim().
    double score(const SparseVector& x) const { return dot(mean_, x); }
    double score(const Instance& x) const { return score(x.features); }

    friend bool operator==(const GaussianRanker&, const GaussianRanker&) = default;

private:
    friend UpdateDiagnostics scw_step(GaussianRanker& ranker, const SparseVector& z, int y);

    std::vector<double> mean_;
    DenseMatrix covariance_;
    ProbitParams probit_;
    double penalty_;
};

/// Diagonal variant: mean plus per-coordinate confidence terms G (all >= 1,
/// never decreasing). Memory and per-step work are linear in the support of z.
class DiagGaussianRanker {
public:
    DiagGaussianRanker(std::size_t dim, ProbitParams probit, double penalty);
    DiagGaussianRanker(std::vector<double> mean, std::vector<double> confidence, ProbitParams probit, double penalty);

    std::size_t dim() const noexcept { return mean_.size(); }
    std::span<const double> mean() const noexcept { return mean_; }
    std::span<const double> confidence() const noexcept { return confidence_; }
    const ProbitParams& probit() const noexcept { return probit_; }
    double penalty() const noexcept { return penalty_; }

    double score(const SparseVector& x) const { return dot(mean_, x); }
    double score(const Instance& x) const { return score(x.features); }

    friend bool operator==(const DiagGaussianRanker&, const DiagGaussianRanker&) = default;

private:
    friend UpdateDiagnostics scw_diag_step(DiagGaussianRanker& ranker, const SparseVector& z, int y);

    std::vector<double> mean_;
    std::vector<double> confidence_;
    ProbitParams probit_;
    double penalty_;
};

/// max(0, phi sqrt(upsilon) - y (mu . z)) with the model's own upsilon.
double pair_loss(const GaussianRanker& ranker, const SparseVector& z, int y);
double pair_loss(const DiagGaussianRanker& ranker, const SparseVector& z, int y);

/// One closed-form step on the pair difference z with label y. When alpha is
/// zero (including a zero-loss pair or a degenerate z) the ranker is left
/// untouched. Throws NumericError on non-finite input, ShapeError when z does
/// not fit dim(), InvalidInput for y outside {+1, -1}.
UpdateDiagnostics scw_step(GaussianRanker& ranker, const SparseVector& z, int y);

/// Diagonal step: mu_i += alpha y z_i / G_i, G_i += beta z_i^2 on the support of z only.
UpdateDiagnostics scw_diag_step(DiagGaussianRanker& ranker, const SparseVector& z, int y);

using StepObserver = std::function<void(const UpdateDiagnostics&)>;

/// Pairs x with every instance of the opposite-class buffer in storage order,
/// one step per pair (z = x - buffered), threading the evolving state through.
/// Returns the number of steps that changed the model. Throws
/// ContractViolation if the buffer holds an instance with x's label.
std::size_t update_ranker(GaussianRanker& ranker, const Instance& x, const PairBuffer& opposite,
                          const StepObserver& observer = {});
std::size_t update_ranker(DiagGaussianRanker& ranker, const Instance& x, const PairBuffer& opposite,
                          const StepObserver& observer = {});

struct CbrConfig {
    BufferPolicy policy = BufferPolicy::Fifo;
    std::size_t pos_capacity = 50;
    std::size_t neg_capacity = 50;
    double penalty = 1.0;
    double eta = 0.7;
    std::uint64_t seed = 0;  // drives reservoir sampling only

    /// Throws InvalidInput unless C > 0, 0.5 < eta < 1 and both capacities >= 1.
    void validate() const;
};

/// One pass over the stream: for each instance, update its own-class buffer,
/// then update the ranker against the opposite-class buffer (as just updated).
/// Throws InvalidInput on an empty stream. A single-class stream yields an
/// untouched model with stats->single_class set.
GaussianRanker train_cbr(std::span<const Instance> stream, std::size_t dim, const CbrConfig& config,
                         TrainStats* stats = nullptr, const AdmitObserver& observer = {});
DiagGaussianRanker train_cbr_diag(std::span<const Instance> stream, std::size_t dim, const CbrConfig& config,
                                  TrainStats* stats = nullptr, const AdmitObserver& observer = {});

}  // namespace cbr
