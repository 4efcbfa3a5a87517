#include "cbr/metrics.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "cbr/error.hpp"

namespace cbr {
namespace {

void require_both(const ScoredSet& s) {
    if (s.positives.empty() || s.negatives.empty()) {
        throw InvalidInput("metric undefined: both classes need at least one score");
    }
}

// (score, is_positive) sorted by descending score.
std::vector<std::pair<double, bool>> merged_descending(const ScoredSet& s) {
    std::vector<std::pair<double, bool>> all;
    all.reserve(s.positives.size() + s.negatives.size());
    for (double v : s.positives) all.emplace_back(v, true);
    for (double v : s.negatives) all.emplace_back(v, false);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    return all;
}

}  // namespace

double auc(const ScoredSet& s) {
    require_both(s);
    std::vector<std::pair<double, bool>> all;
    all.reserve(s.positives.size() + s.negatives.size());
    for (double v : s.positives) all.emplace_back(v, true);
    for (double v : s.negatives) all.emplace_back(v, false);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    // Sum of 1-based midranks of the positives; tied runs share their average rank.
    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        std::size_t pos_in_run = 0;
        while (j < all.size() && all[j].first == all[i].first) pos_in_run += all[j++].second;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        rank_sum += midrank * static_cast<double>(pos_in_run);
        i = j;
    }
    const auto n = static_cast<double>(s.positives.size());
    const auto m = static_cast<double>(s.negatives.size());
    return (rank_sum - n * (n + 1.0) / 2.0) / (n * m);
}

std::vector<RocPoint> roc_curve(const ScoredSet& s) {
    require_both(s);
    const auto all = merged_descending(s);
    const auto P = static_cast<double>(s.positives.size());
    const auto N = static_cast<double>(s.negatives.size());
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<RocPoint> curve;
    std::size_t tp = 0;
    std::size_t fp = 0;
    auto emit = [&](double threshold) {
        curve.push_back({threshold, tp / P, fp / N, (static_cast<double>(tp) + (N - static_cast<double>(fp))) / (P + N)});
    };
    emit(inf);
    std::size_t i = 0;
    while (i < all.size()) {
        const double score = all[i].first;
        while (i < all.size() && all[i].first == score) {
            (all[i].second ? tp : fp) += 1;
            ++i;
        }
        emit(i < all.size() ? score + (all[i].first - score) / 2.0 : -inf);
    }
    return curve;
}

OperatingPoint accuracy_at_optroc(const ScoredSet& s) {
    const auto curve = roc_curve(s);
    OperatingPoint best{curve.front().accuracy, curve.front().threshold};
    for (const auto& p : curve) {
        if (p.accuracy > best.accuracy) best = {p.accuracy, p.threshold};
    }
    return best;
}

}  // namespace cbr
