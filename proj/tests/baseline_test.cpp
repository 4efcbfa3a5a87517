#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cbr/baseline.hpp"
#include "cbr/cw_ranker.hpp"
#include "cbr/error.hpp"
#include "cbr/metrics.hpp"
#include "cbr/synthetic.hpp"

using cbr::Instance;
using cbr::LinearRanker;

TEST(UniExpStep, OriginExample) {
    LinearRanker r(3);
    cbr::uniexp_step(r, {{{1, 1.0}}, 1}, 0.1, {});
    EXPECT_EQ(r.weights()[0], 0.1);
    EXPECT_EQ(r.weights()[1], 0.0);

    LinearRanker n(3);
    cbr::uniexp_step(n, {{{1, 1.0}}, -1}, 0.1, {});
    EXPECT_EQ(n.weights()[0], -0.1);
}

TEST(UniExpStep, ClassWeightScalesStep) {
    LinearRanker r(1);
    cbr::uniexp_step(r, {{{1, 2.0}}, -1}, 0.5, {1.0, 3.0});
    EXPECT_EQ(r.weights()[0], -3.0);
}

TEST(UniExpStep, LargeMarginIsNegligibleAndFinite) {
    LinearRanker r(std::vector<double>{30.0});
    cbr::uniexp_step(r, {{{1, 1.0}}, 1}, 0.1, {});
    // One ulp of slack for the rounding of 30 + tiny.
    EXPECT_LE(r.weights()[0] - 30.0, 0.1 * std::exp(-30.0) + 4e-15);

    LinearRanker huge(std::vector<double>{-1e6});
    cbr::uniexp_step(huge, {{{1, 1.0}}, 1}, 1.0, {});
    EXPECT_TRUE(std::isfinite(huge.weights()[0]));
}

TEST(UniExpStep, DirectionIsThePointItself) {
    LinearRanker r(std::vector<double>{0.2, -0.1, 0.4});
    const auto before = std::vector<double>(r.weights().begin(), r.weights().end());
    const Instance x{{{1, 0.5}, {3, -2.0}}, -1};
    cbr::uniexp_step(r, x, 0.3, {});
    const double k = (r.weights()[0] - before[0]) / 0.5;
    EXPECT_EQ(r.weights()[1], before[1]);
    EXPECT_NEAR(r.weights()[2] - before[2], k * -2.0, 1e-15);
    EXPECT_LT(k, 0.0);
}

TEST(PaPairStep, Examples) {
    LinearRanker r(2);
    EXPECT_TRUE(cbr::pa_pair_step(r, {{1, 1.0}}, 1, 1.0));
    EXPECT_EQ(r.weights()[0], 1.0);

    const auto before = r;
    EXPECT_FALSE(cbr::pa_pair_step(r, {{1, 2.0}}, 1, 1.0));
    EXPECT_EQ(r, before);

    LinearRanker capped(2);
    cbr::pa_pair_step(capped, {{2, 0.1}}, -1, 0.5);
    EXPECT_EQ(capped.weights()[1], -0.5 * 0.1);

    LinearRanker zero(2);
    EXPECT_FALSE(cbr::pa_pair_step(zero, {}, 1, 1.0));
}

TEST(TrainUniExp, OneInstanceIsOneStep) {
    const std::vector<Instance> stream{{{{2, 1.5}}, 1}};
    // Online prior weight with one positive seen: (1 + 0) / (2 * 1).
    LinearRanker manual(2);
    cbr::uniexp_step(manual, stream[0], 0.25, {0.5, 1.0});
    EXPECT_EQ(cbr::train_uniexp(stream, 2, {0.25, {}}), manual);
}

TEST(TrainPaPair, EmptyOppositeBufferMeansNoUpdate) {
    const std::vector<Instance> stream{{{{1, 1.0}}, 1}, {{{2, 1.0}}, 1}};
    cbr::TrainStats stats;
    EXPECT_EQ(cbr::train_pa_pair(stream, 2, {}, &stats), LinearRanker(2));
    EXPECT_EQ(stats.pair_steps, 0u);
    EXPECT_TRUE(stats.single_class);
}

TEST(TrainPaPair, SeparableStream) {
    const auto data = cbr::make_two_gaussians(1000, 0.1, 10, 4.0, 1);
    const auto r = cbr::train_pa_pair(data.instances(), data.dim(), {});
    cbr::ScoredSet s;
    for (const auto& x : data.instances()) (x.label == 1 ? s.positives : s.negatives).push_back(r.score(x));
    EXPECT_GE(cbr::auc(s), 0.95);
}

TEST(SharedFramework, IdenticalBufferTraces) {
    const auto data = cbr::make_two_gaussians(300, 0.2, 4, 1.0, 6);
    for (auto policy : {cbr::BufferPolicy::Fifo, cbr::BufferPolicy::ReservoirSampling}) {
        std::vector<std::vector<Instance>> cw_trace, pa_trace;
        auto recorder = [](std::vector<std::vector<Instance>>& out) {
            return [&out](std::size_t, const cbr::BufferedStream& s) {
                std::vector<Instance> snap(s.positives().begin(), s.positives().end());
                snap.insert(snap.end(), s.negatives().begin(), s.negatives().end());
                out.push_back(std::move(snap));
            };
        };
        cbr::CbrConfig cw;
        cw.policy = policy;
        cw.pos_capacity = cw.neg_capacity = 7;
        cw.seed = 42;
        cbr::PaPairConfig pa;
        pa.policy = policy;
        pa.pos_capacity = pa.neg_capacity = 7;
        pa.seed = 42;
        cbr::train_cbr(data.instances(), data.dim(), cw, nullptr, recorder(cw_trace));
        cbr::train_pa_pair(data.instances(), data.dim(), pa, nullptr, recorder(pa_trace));
        EXPECT_EQ(cw_trace.size(), data.size());
        EXPECT_EQ(cw_trace, pa_trace);
    }
}

TEST(Baselines, ConfigRejections) {
    const std::vector<Instance> stream{{{{1, 1.0}}, 1}};
    EXPECT_THROW(cbr::train_uniexp(stream, 1, {0.0, {}}), cbr::InvalidInput);
    cbr::PaPairConfig pa;
    pa.penalty = -1.0;
    EXPECT_THROW(cbr::train_pa_pair(stream, 1, pa), cbr::InvalidInput);
    EXPECT_THROW(cbr::train_uniexp(std::vector<Instance>{}, 1, {}), cbr::InvalidInput);
}
