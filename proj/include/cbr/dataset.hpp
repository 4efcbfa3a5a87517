#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cbr/sparse.hpp"

namespace cbr {

/// One labelled example: 1-based sparse features and a label in {+1, -1}.
struct Instance {
    SparseVector features;
    int label = 1;

    friend bool operator==(const Instance&, const Instance&) = default;
};

/// Ordered instances with cached class counts. dim is the largest feature index
/// seen (it may be raised explicitly to share a feature space across files).
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<Instance> instances, std::size_t min_dim = 0);

    const std::vector<Instance>& instances() const noexcept { return instances_; }
    std::size_t size() const noexcept { return instances_.size(); }
    bool empty() const noexcept { return instances_.empty(); }
    const Instance& operator[](std::size_t i) const { return instances_[i]; }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t n_pos() const noexcept { return n_pos_; }
    std::size_t n_neg() const noexcept { return n_neg_; }
    bool has_both_classes() const noexcept { return n_pos_ > 0 && n_neg_ > 0; }

    /// New dataset of the selected rows, in the given order, keeping this dim.
    Dataset select(const std::vector<std::size_t>& rows) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<Instance> instances_;
    std::size_t dim_ = 0;
    std::size_t n_pos_ = 0;
    std::size_t n_neg_ = 0;
};

/// Parsed file before label mapping; labels as written.
struct RawRecord {
    double label = 0.0;
    SparseVector features;
    std::size_t line = 0;
};

/// Parses LibSVM text (`<label> <idx>:<val> ...`, '#' comment lines, LF or
/// CRLF). Features are sorted by index. Throws ParseError with the line number
/// on a malformed pair, a non-positive index or a duplicate index.
std::vector<RawRecord> parse_libsvm_raw(std::string_view text);

/// parse_libsvm_raw followed by label mapping: {-1,+1} kept, {0,1} mapped to
/// {-1,+1}, other integer label sets binarized with binarize_multiclass(seed).
/// Non-integer labels are rejected with InvalidInput.
Dataset parse_libsvm(std::string_view text, std::uint64_t label_seed = 0);

Dataset load_libsvm(const std::string& path, std::uint64_t label_seed = 0);

/// Inverse of parse_libsvm; values use shortest round-trip formatting.
std::string serialize_libsvm(const Dataset& data);

/// Seeded random nonempty proper subset of the classes mapped to +1, the rest to -1.
/// Throws InvalidInput with fewer than two distinct classes.
std::map<long, int> binarize_multiclass(const std::vector<long>& raw_labels, std::uint64_t seed);

/// Per-feature [min, max] from training data. Implicit zeros count: a feature
/// missing from some instance has 0 inside its range.
struct ScalingRecord {
    std::vector<double> lo;  // 0-based by feature index - 1
    std::vector<double> hi;
    std::vector<bool> seen;

    std::size_t dim() const noexcept { return lo.size(); }
    friend bool operator==(const ScalingRecord&, const ScalingRecord&) = default;
};

ScalingRecord fit_scaling(const Dataset& data);

/// Maps each stored value to [-1, 1] with the record's min/max; constant or
/// unseen features map to 0. Absent coordinates stay absent.
Dataset apply_scaling(const Dataset& data, const ScalingRecord& record);

struct ScaledDataset {
    Dataset data;
    ScalingRecord record;
};

/// fit_scaling + apply_scaling. Throws InvalidInput on an empty dataset.
ScaledDataset scale_features(const Dataset& data);

/// Fold assignment produced by split_folds.
struct SplitPlan {
    std::uint64_t seed = 0;
    std::size_t fold_count = 0;
    std::vector<std::size_t> fold_assignment;  // per instance

    std::vector<std::size_t> fold_rows(std::size_t fold) const;
    std::vector<std::size_t> rows_except(std::size_t fold) const;
    std::vector<std::size_t> fold_sizes() const;
};

/// Seeded shuffle of positions, then round-robin assignment into k folds.
SplitPlan split_folds(std::size_t size, std::size_t k, std::uint64_t seed);
SplitPlan split_folds(const Dataset& data, std::size_t k, std::uint64_t seed);

/// Fisher-Yates order of 0..n-1 driven by SplitMix64(seed).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

Dataset permute(const Dataset& data, std::uint64_t seed);

/// Identity when data.size() <= cap; otherwise exactly cap rows sampled without
/// replacement, kept in their original relative order.
Dataset subsample(const Dataset& data, std::size_t cap, std::uint64_t seed);

}  // namespace cbr
