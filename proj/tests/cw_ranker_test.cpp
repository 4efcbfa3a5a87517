#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "cbr/cw_ranker.hpp"
#include "cbr/error.hpp"
#include "cbr/metrics.hpp"
#include "cbr/random.hpp"
#include "cbr/synthetic.hpp"
#include "kl_oracle.hpp"

using cbr::DenseMatrix;
using cbr::DiagGaussianRanker;
using cbr::GaussianRanker;
using cbr::Instance;
using cbr::ProbitParams;
using cbr::SparseVector;

namespace {

const ProbitParams kProbit = ProbitParams::from_eta(0.7);

// 40-digit values of the closed form evaluated independently.
constexpr double kAlphaUnit = 0.46441764716413056;
constexpr double kBetaUnit = 0.21568375099746687;
constexpr double kUUnit = 0.78431624900253313;
constexpr double kAlphaDiag = 0.65678573522491620;
constexpr double kBetaDiag = 0.43136750199493373;
constexpr double kUDiag = 0.39215812450126657;

using Wide = boost::multiprecision::cpp_bin_float_50;

// Closed form as printed, in 50-digit arithmetic (no cancellation concerns).
cbr::StepCoefficients wide_coefficients(double m_in, double v_in, double phi_in, double c_in) {
    using boost::multiprecision::sqrt;
    const Wide m = m_in, v = v_in, phi = phi_in, c = c_in;
    const Wide psi = 1 + phi * phi / 2, zeta = 1 + phi * phi;
    Wide alpha = (-m * psi + sqrt(m * m * phi * phi * phi * phi / 4 + v * phi * phi * zeta)) / (v * zeta);
    if (alpha < 0) alpha = 0;
    if (alpha > c) alpha = c;
    const Wide root = -alpha * v * phi + sqrt(alpha * alpha * v * v * phi * phi + 4 * v);
    const Wide u = root * root / 4;
    const Wide beta = alpha * phi / (sqrt(u) + v * alpha * phi);
    return {static_cast<double>(alpha), static_cast<double>(beta), static_cast<double>(u)};
}

DenseMatrix random_spd(std::size_t d, cbr::SplitMix64& rng, double floor) {
    std::vector<double> a(d * d);
    for (auto& v : a) v = 1.4 * rng.uniform() - 0.7;
    DenseMatrix s(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = (i == j) ? floor : 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += a[i * d + k] * a[j * d + k];
            s(i, j) = s(j, i) = acc;
        }
    return s;
}

SparseVector random_dense_sparse(std::size_t d, cbr::SplitMix64& rng) {
    SparseVector z;
    for (std::uint32_t i = 1; i <= d; ++i) z.push_back({i, 2.0 * rng.uniform() - 1.0});
    return z;
}

double min_eigenvalue(const DenseMatrix& m) {
    const std::size_t d = m.dim();
    Eigen::MatrixXd e(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) e(i, j) = m(i, j);
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

double stream_auc(const auto& ranker, const cbr::Dataset& data) {
    cbr::ScoredSet s;
    for (const auto& x : data.instances()) (x.label == 1 ? s.positives : s.negatives).push_back(ranker.score(x));
    return cbr::auc(s);
}

}  // namespace

TEST(Score, Examples) {
    const GaussianRanker zero(2, kProbit, 1.0);
    EXPECT_EQ(zero.score(SparseVector{{1, 3}, {2, 1}}), 0.0);
    const GaussianRanker r({1.0, -2.0}, DenseMatrix::identity(2), kProbit, 1.0);
    EXPECT_EQ(r.score(SparseVector{{1, 3}, {2, 1}}), 1.0);
    EXPECT_THROW(r.score(SparseVector{{3, 1}}), cbr::ShapeError);
}

TEST(Score, Linear) {
    cbr::SplitMix64 rng(4);
    std::vector<double> mu(6);
    for (auto& v : mu) v = rng.uniform() - 0.5;
    const DiagGaussianRanker r(mu, std::vector<double>(6, 1.0), kProbit, 1.0);
    const auto x = random_dense_sparse(6, rng);
    for (double c : {-3.0, 0.5, 2.0}) {
        auto cx = x;
        for (auto& f : cx) f.value *= c;
        EXPECT_NEAR(r.score(cx), c * r.score(x), 1e-14);
    }
}

TEST(PairLoss, Examples) {
    const GaussianRanker r(3, kProbit, 1.0);
    EXPECT_NEAR(cbr::pair_loss(r, {{1, 1.0}}, 1), 0.5244005127080407840, 1e-15);
    EXPECT_EQ(cbr::pair_loss(r, {}, 1), 0.0);
    DenseMatrix small = DenseMatrix::identity(2);
    small(0, 0) = 1e-4;
    const GaussianRanker confident({10.0, 0.0}, small, kProbit, 1.0);
    EXPECT_EQ(cbr::pair_loss(confident, {{1, 1.0}}, 1), 0.0);
    EXPECT_EQ(cbr::pair_loss(confident, {{1, -1.0}}, -1), 0.0);
}

TEST(ScwStep, UnitExample) {
    GaussianRanker r(2, kProbit, 1.0);
    const auto diag = cbr::scw_step(r, {{1, 1.0}}, 1);
    EXPECT_EQ(diag.margin, 0.0);
    EXPECT_EQ(diag.variance, 1.0);
    EXPECT_NEAR(diag.alpha, kAlphaUnit, 1e-15);
    EXPECT_NEAR(diag.alpha, kProbit.phi / std::sqrt(1.0 + kProbit.phi * kProbit.phi), 1e-15);
    EXPECT_NEAR(diag.beta, kBetaUnit, 1e-15);
    EXPECT_NEAR(diag.u, kUUnit, 1e-15);
    EXPECT_NEAR(r.mean()[0], kAlphaUnit, 1e-15);
    EXPECT_EQ(r.mean()[1], 0.0);
    EXPECT_NEAR(r.covariance()(0, 0), kUUnit, 1e-15);
    EXPECT_EQ(r.covariance()(1, 1), 1.0);
    EXPECT_EQ(r.covariance()(0, 1), 0.0);
}

TEST(ScwStep, PenaltyCapsAlpha) {
    GaussianRanker r(2, kProbit, 0.001);
    const auto diag = cbr::scw_step(r, {{1, 1.0}}, 1);
    EXPECT_EQ(diag.alpha, 0.001);
    EXPECT_EQ(r.mean()[0], 0.001);
}

TEST(ScwStep, TwoStepComposition) {
    // x_t = (1, 0.5) positive against buffered negatives a = (0, 0.2), b = (-0.5, 1).
    GaussianRanker r(2, kProbit, 1.0);
    cbr::PairBuffer negatives(2, cbr::BufferPolicy::Fifo);
    cbr::SplitMix64 rng(0);
    for (const Instance& x : {Instance{{{2, 0.2}}, -1}, Instance{{{1, -0.5}, {2, 1.0}}, -1}}) {
        negatives.count_arrival();
        negatives.update(x, rng);
    }
    const Instance xt{{{1, 1.0}, {2, 0.5}}, 1};
    EXPECT_EQ(cbr::update_ranker(r, xt, negatives), 2u);
    EXPECT_NEAR(r.mean()[0], 0.52931578815123526, 1e-14);
    EXPECT_NEAR(r.mean()[1], 0.093694424235778244, 1e-14);
    EXPECT_NEAR(r.covariance()(0, 0), 0.76575018305398876, 1e-14);
    EXPECT_NEAR(r.covariance()(0, 1), -0.042245947460183098, 1e-14);
    EXPECT_NEAR(r.covariance()(1, 1), 0.97413687570451750, 1e-14);

    GaussianRanker manual(2, kProbit, 1.0);
    cbr::scw_step(manual, cbr::difference(xt.features, negatives.items()[0].features), 1);
    cbr::scw_step(manual, cbr::difference(xt.features, negatives.items()[1].features), 1);
    EXPECT_EQ(manual, r);
}

TEST(ScwStep, DegenerateAndInvalid) {
    GaussianRanker r(2, kProbit, 1.0);
    const auto before = r;
    const auto diag = cbr::scw_step(r, {}, 1);
    EXPECT_TRUE(diag.degenerate);
    EXPECT_EQ(diag.alpha, 0.0);
    EXPECT_EQ(r, before);
    EXPECT_THROW(cbr::scw_step(r, {{3, 1.0}}, 1), cbr::ShapeError);
    EXPECT_THROW(cbr::scw_step(r, {{1, NAN}}, 1), cbr::NumericError);
    EXPECT_THROW(cbr::scw_step(r, {{1, 1.0}}, 0), cbr::InvalidInput);
}

TEST(ScwCoefficients, MatchWidePrecisionOracle) {
    cbr::SplitMix64 rng(31);
    for (int i = 0; i < 20000; ++i) {
        const double phi = 0.05 + 2.95 * rng.uniform();
        const double v = 1e-3 + 100.0 * rng.uniform();
        const double m = (rng.uniform() - 0.3) * 4.0 * phi * std::sqrt(v);
        const double c = std::ldexp(1.0, static_cast<int>(rng.bounded(21)) - 10);
        const auto got = cbr::scw_coefficients(m, v, ProbitParams::from_phi(phi), c);
        const auto want = wide_coefficients(m, v, phi, c);
        ASSERT_NEAR(got.alpha, want.alpha, 1e-12 * (1.0 + want.alpha)) << m << " " << v << " " << phi;
        ASSERT_NEAR(got.u, want.u, 1e-12 * (1.0 + want.u));
        ASSERT_NEAR(got.beta, want.beta, 1e-11 * (1.0 + want.beta));
    }
}

TEST(ScwCoefficients, ActivationEquivalenceAndRange) {
    cbr::SplitMix64 rng(7);
    for (int i = 0; i < 100000; ++i) {
        const double phi = 3.0 * (1.0 - rng.uniform());   // (0, 3]
        const double v = 100.0 * (1.0 - rng.uniform());   // (0, 100]
        const double c = 1024.0 * (1.0 - rng.uniform()); // (0, 1024]
        const double scale = phi * std::sqrt(v);
        const double m = (i % 4 == 0) ? scale : (rng.uniform() * 3.0 - 1.0) * scale;
        const auto k = cbr::scw_coefficients(m, v, ProbitParams::from_phi(phi), c);
        ASSERT_EQ(k.alpha > 0.0, phi * std::sqrt(v) > m) << m << " " << v << " " << phi;
        ASSERT_GE(k.alpha, 0.0);
        ASSERT_LE(k.alpha, c);
        if (k.alpha > 0.0) ASSERT_LT(k.beta * v, 1.0);
    }
}

TEST(ScwStep, ZeroLossIsBitIdenticalNoOp) {
    cbr::SplitMix64 rng(12);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t d = 1 + rng.bounded(5);
        const auto z = random_dense_sparse(d, rng);
        const auto sigma = random_spd(d, rng, 0.2);
        const auto zd = cbr::to_dense(z, d);
        const double v = cbr::quadratic_form(sigma, zd);
        const int y = rng.bounded(2) ? 1 : -1;
        // mu along z with margin (1 + extra) phi sqrt(v).
        const double target = kProbit.phi * std::sqrt(v) * (1.0 + rng.uniform());
        const double zz = cbr::squared_norm(z);
        std::vector<double> mu(d);
        for (std::size_t j = 0; j < d; ++j) mu[j] = y * target * zd[j] / zz * (1.0 + 1e-12);
        GaussianRanker r(mu, sigma, kProbit, 1.0);
        if (cbr::pair_loss(r, z, y) != 0.0) continue;
        const auto before = r;
        const auto diag = cbr::scw_step(r, z, y);
        EXPECT_EQ(diag.alpha, 0.0);
        EXPECT_EQ(r, before);
    }
}

TEST(ScwStep, CovarianceStaysPsd) {
    cbr::SplitMix64 rng(21);
    const std::size_t d = 20;
    GaussianRanker r(d, kProbit, 1.0);
    for (int i = 0; i < 1000; ++i) cbr::scw_step(r, random_dense_sparse(d, rng), rng.bounded(2) ? 1 : -1);
    EXPECT_LE(r.covariance().asymmetry(), 1e-12);
    EXPECT_GT(min_eigenvalue(r.covariance()), -1e-8);
}

TEST(ScwStep, MatchesKlMinimizer) {
    cbr::SplitMix64 rng(404);
    int active = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t d = 3;
        const auto sigma = random_spd(d, rng, 0.3);
        std::vector<double> mu(d);
        for (auto& v : mu) v = rng.uniform() - 0.5;
        const auto z = random_dense_sparse(d, rng);
        const int y = rng.bounded(2) ? 1 : -1;
        const double c = std::exp(std::log(0.05) + rng.uniform() * std::log(100.0));

        GaussianRanker r(mu, sigma, kProbit, c);
        const auto diag = cbr::scw_step(r, z, y);
        active += diag.alpha > 0.0;

        cbr::testing::GaussianState prior{Eigen::VectorXd(d), Eigen::MatrixXd(d, d)};
        Eigen::VectorXd ze(d);
        for (std::size_t i = 0; i < d; ++i) {
            prior.mean[i] = mu[i];
            ze[i] = z[i].value;
            for (std::size_t j = 0; j < d; ++j) prior.cov(i, j) = sigma(i, j);
        }
        const auto best =
            cbr::testing::minimize_kl_hinge(cbr::testing::KlObjective(prior, ze, y, kProbit.phi, c));
        for (std::size_t i = 0; i < d; ++i) {
            EXPECT_NEAR(r.mean()[i], best.mean[i], 1e-4) << trial;
            for (std::size_t j = 0; j < d; ++j) EXPECT_NEAR(r.covariance()(i, j), best.cov(i, j), 1e-4) << trial;
        }
    }
    EXPECT_GT(active, 6);
}

TEST(ScwDiagStep, UnitExample) {
    DiagGaussianRanker r(3, kProbit, 1.0);
    const auto diag = cbr::scw_diag_step(r, {{1, 1.0}}, 1);
    EXPECT_EQ(diag.variance, 0.5);
    EXPECT_NEAR(diag.alpha, kAlphaDiag, 1e-15);
    EXPECT_NEAR(diag.beta, kBetaDiag, 1e-15);
    EXPECT_NEAR(diag.u, kUDiag, 1e-15);
    EXPECT_NEAR(r.mean()[0], kAlphaDiag, 1e-15);
    EXPECT_NEAR(r.confidence()[0], 1.0 + kBetaDiag, 1e-15);
    EXPECT_EQ(r.confidence()[1], 1.0);
}

TEST(ScwDiagStep, MatchesWideScalarOracle) {
    cbr::SplitMix64 rng(8);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t d = 6;
        std::vector<double> mu(d), g(d);
        for (std::size_t i = 0; i < d; ++i) {
            mu[i] = rng.uniform() - 0.5;
            g[i] = 1.0 + 3.0 * rng.uniform();
        }
        const double c = std::ldexp(1.0, static_cast<int>(rng.bounded(11)) - 5);
        const auto z = random_dense_sparse(d, rng);
        const int y = rng.bounded(2) ? 1 : -1;
        Wide v = 0, m = 0;
        for (std::size_t i = 0; i < d; ++i) {
            v += Wide(z[i].value) * z[i].value / (Wide(g[i]) + c);
            m += Wide(mu[i]) * z[i].value;
        }
        m *= y;
        const auto want = wide_coefficients(static_cast<double>(m), static_cast<double>(v), kProbit.phi, c);
        DiagGaussianRanker r(mu, g, kProbit, c);
        cbr::scw_diag_step(r, z, y);
        for (std::size_t i = 0; i < d; ++i) {
            const double mu_want = static_cast<double>(Wide(mu[i]) + Wide(want.alpha) * y * z[i].value / g[i]);
            const double g_want = static_cast<double>(Wide(g[i]) + Wide(want.beta) * z[i].value * z[i].value);
            EXPECT_NEAR(r.mean()[i], mu_want, 1e-12);
            EXPECT_NEAR(r.confidence()[i], g_want, 1e-12);
        }
    }
}

TEST(ScwDiagStep, SparseSupportAndMonotoneConfidence) {
    DiagGaussianRanker r(10, kProbit, 1.0);
    const auto before = r;
    const auto diag = cbr::scw_diag_step(r, {{3, 0.7}, {7, -1.1}}, -1);
    EXPECT_EQ(diag.coordinates_written, 4u);
    for (std::size_t i = 0; i < 10; ++i) {
        if (i == 2 || i == 6) {
            EXPECT_NE(r.mean()[i], before.mean()[i]);
            EXPECT_GT(r.confidence()[i], before.confidence()[i]);
        } else {
            EXPECT_EQ(r.mean()[i], before.mean()[i]);
            EXPECT_EQ(r.confidence()[i], before.confidence()[i]);
        }
    }

    cbr::SplitMix64 rng(3);
    DiagGaussianRanker walk(8, kProbit, 0.5);
    for (int i = 0; i < 500; ++i) {
        const std::vector<double> g(walk.confidence().begin(), walk.confidence().end());
        cbr::scw_diag_step(walk, random_dense_sparse(8, rng), rng.bounded(2) ? 1 : -1);
        for (std::size_t j = 0; j < 8; ++j) ASSERT_GE(walk.confidence()[j], g[j]);
    }
    for (double gi : walk.confidence()) EXPECT_GE(gi, 1.0);
}

TEST(ScwDiagStep, ZeroLossLeavesStateUntouched) {
    DiagGaussianRanker r({5.0, 0.0}, {1.0, 1.0}, kProbit, 1.0);
    const auto before = r;
    const auto diag = cbr::scw_diag_step(r, {{1, 1.0}}, 1);
    EXPECT_EQ(diag.alpha, 0.0);
    EXPECT_EQ(r, before);
}

TEST(UpdateRanker, EmptyBufferAndWrongClass) {
    GaussianRanker r(2, kProbit, 1.0);
    const auto before = r;
    const cbr::PairBuffer empty(3, cbr::BufferPolicy::Fifo);
    EXPECT_EQ(cbr::update_ranker(r, Instance{{{1, 1.0}}, 1}, empty), 0u);
    EXPECT_EQ(r, before);

    cbr::PairBuffer same(3, cbr::BufferPolicy::Fifo);
    cbr::SplitMix64 rng(0);
    same.count_arrival();
    same.update(Instance{{{2, 1.0}}, 1}, rng);
    EXPECT_THROW(cbr::update_ranker(r, Instance{{{1, 1.0}}, 1}, same), cbr::ContractViolation);
}

TEST(UpdateRanker, SingleItemEqualsOneStep) {
    DiagGaussianRanker a(3, kProbit, 2.0), b(3, kProbit, 2.0);
    cbr::PairBuffer pos(3, cbr::BufferPolicy::Fifo);
    cbr::SplitMix64 rng(0);
    const Instance p{{{1, 0.3}, {3, 1.0}}, 1};
    pos.count_arrival();
    pos.update(p, rng);
    const Instance n{{{2, 0.5}, {3, -0.2}}, -1};
    cbr::update_ranker(a, n, pos);
    cbr::scw_diag_step(b, cbr::difference(n.features, p.features), -1);
    EXPECT_EQ(a, b);
}

TEST(TrainCbr, SinglePositiveLeavesMeanZero) {
    const std::vector<Instance> stream{{{{1, 1.0}}, 1}};
    cbr::TrainStats stats;
    const auto r = cbr::train_cbr(stream, 2, {}, &stats);
    EXPECT_EQ(r, GaussianRanker(2, kProbit, 1.0));
    EXPECT_TRUE(stats.single_class);
    EXPECT_EQ(stats.pair_steps, 0u);
}

TEST(TrainCbr, TwoInstanceTrace) {
    const Instance a{{{1, 1.0}, {2, 0.5}}, 1};
    const Instance b{{{1, -0.2}, {2, 0.4}}, -1};
    const std::vector<Instance> stream{a, b};
    cbr::TrainStats stats;
    std::vector<std::size_t> pos_sizes;
    const auto r = cbr::train_cbr(stream, 2, {}, &stats,
                                  [&](std::size_t, const cbr::BufferedStream& s) { pos_sizes.push_back(s.positives().size()); });
    GaussianRanker manual(2, kProbit, 1.0);
    cbr::scw_step(manual, cbr::difference(b.features, a.features), -1);
    EXPECT_EQ(r, manual);
    EXPECT_EQ(stats.pair_steps, 1u);
    EXPECT_FALSE(stats.single_class);
    EXPECT_EQ(pos_sizes, (std::vector<std::size_t>{1, 1}));
}

TEST(TrainCbr, SeparableStreamReachesHighAuc) {
    const auto data = cbr::make_two_gaussians(1000, 0.1, 10, 4.0, 1);
    cbr::CbrConfig cfg;
    const auto full = cbr::train_cbr(data.instances(), data.dim(), cfg);
    EXPECT_GE(stream_auc(full, data), 0.99);
    const auto diag = cbr::train_cbr_diag(data.instances(), data.dim(), cfg);
    EXPECT_GE(stream_auc(diag, data), 0.99);
    cfg.policy = cbr::BufferPolicy::ReservoirSampling;
    EXPECT_GE(stream_auc(cbr::train_cbr(data.instances(), data.dim(), cfg), data), 0.99);
}

TEST(TrainCbr, ConfigValidation) {
    const std::vector<Instance> stream{{{{1, 1.0}}, 1}};
    cbr::CbrConfig cfg;
    cfg.penalty = 0.0;
    EXPECT_THROW(cbr::train_cbr(stream, 1, cfg), cbr::InvalidInput);
    cfg = {};
    cfg.eta = 0.5;
    EXPECT_THROW(cbr::train_cbr(stream, 1, cfg), cbr::InvalidInput);
    cfg = {};
    cfg.neg_capacity = 0;
    EXPECT_THROW(cbr::train_cbr_diag(stream, 1, cfg), cbr::InvalidInput);
    EXPECT_THROW(cbr::train_cbr(std::vector<Instance>{}, 1, {}), cbr::InvalidInput);
}
