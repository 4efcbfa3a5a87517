#pragma once

#include <vector>

namespace cbr {

/// Scores split by true class.
struct ScoredSet {
    std::vector<double> positives;
    std::vector<double> negatives;
};

/// Mann-Whitney AUC: fraction of (positive, negative) pairs ranked correctly,
/// ties counted as 1/2. O((n+m) log(n+m)) via midranks. Throws InvalidInput if
/// either class is empty.
double auc(const ScoredSet& scores);

struct RocPoint {
    double threshold = 0.0;  // predict positive when score > threshold
    double true_positive_rate = 0.0;
    double false_positive_rate = 0.0;
    double accuracy = 0.0;   // (TP + TN) / (P + N)
};

/// Points for thresholds +inf, the midpoints between consecutive distinct
/// scores (descending), and -inf. TPR and FPR are nondecreasing along the list.
std::vector<RocPoint> roc_curve(const ScoredSet& scores);

struct OperatingPoint {
    double accuracy = 0.0;
    double threshold = 0.0;
};

/// Best accuracy over roc_curve(), taking the largest threshold among ties.
OperatingPoint accuracy_at_optroc(const ScoredSet& scores);

}  // namespace cbr
