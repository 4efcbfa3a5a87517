#include "cbr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "cbr/error.hpp"
#include "cbr/random.hpp"

namespace cbr {

Dataset::Dataset(std::vector<Instance> instances, std::size_t min_dim)
    : instances_(std::move(instances)), dim_(min_dim) {
    for (const auto& inst : instances_) {
        if (inst.label == 1) {
            ++n_pos_;
        } else if (inst.label == -1) {
            ++n_neg_;
        } else {
            throw InvalidInput("instance label must be +1 or -1, got " + std::to_string(inst.label));
        }
        if (!is_canonical(inst.features)) {
            throw InvalidInput("instance features must have strictly increasing positive indices");
        }
        dim_ = std::max<std::size_t>(dim_, max_index(inst.features));
    }
}

Dataset Dataset::select(const std::vector<std::size_t>& rows) const {
    std::vector<Instance> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(instances_.at(r));
    return Dataset(std::move(out), dim_);
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_real(std::string_view tok, double& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    if (tok.empty()) return false;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size() && std::isfinite(out);
}

RawRecord parse_line(std::string_view line, std::size_t line_no) {
    RawRecord rec;
    rec.line = line_no;
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string_view {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        const std::size_t start = pos;
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
        return line.substr(start, pos - start);
    };

    const auto label_tok = next_token();
    if (!parse_real(label_tok, rec.label)) {
        throw ParseError(line_no, "label '" + std::string(label_tok) + "' is not a number");
    }
    for (auto tok = next_token(); !tok.empty(); tok = next_token()) {
        const auto colon = tok.find(':');
        if (colon == std::string_view::npos) {
            throw ParseError(line_no, "feature '" + std::string(tok) + "' is missing ':'");
        }
        const auto idx_tok = tok.substr(0, colon);
        const auto val_tok = tok.substr(colon + 1);
        if (!idx_tok.empty() && idx_tok.front() == '-') {
            throw ParseError(line_no, "feature index must be >= 1, got " + std::string(idx_tok));
        }
        std::uint64_t index = 0;
        const auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), index);
        if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || idx_tok.empty()) {
            throw ParseError(line_no, "feature index '" + std::string(idx_tok) + "' is not an integer");
        }
        if (index == 0) throw ParseError(line_no, "feature index must be >= 1, got 0");
        if (index > UINT32_MAX) throw ParseError(line_no, "feature index too large");
        double value = 0.0;
        if (!parse_real(val_tok, value)) {
            throw ParseError(line_no, "feature value '" + std::string(val_tok) + "' is not a finite number");
        }
        rec.features.push_back({static_cast<std::uint32_t>(index), value});
    }
    std::sort(rec.features.begin(), rec.features.end(),
              [](const Feature& a, const Feature& b) { return a.index < b.index; });
    for (std::size_t k = 1; k < rec.features.size(); ++k) {
        if (rec.features[k].index == rec.features[k - 1].index) {
            throw ParseError(line_no, "duplicate feature index " + std::to_string(rec.features[k].index));
        }
    }
    return rec;
}

void append_real(std::string& out, double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

std::vector<RawRecord> parse_libsvm_raw(std::string_view text) {
    std::vector<RawRecord> records;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        const auto line = trim(text.substr(start, end - start));
        if (!line.empty() && line.front() != '#') records.push_back(parse_line(line, line_no));
        start = end + 1;
    }
    return records;
}

Dataset parse_libsvm(std::string_view text, std::uint64_t label_seed) {
    auto records = parse_libsvm_raw(text);
    std::set<double> labels;
    for (const auto& r : records) {
        if (r.label != std::floor(r.label)) {
            throw InvalidInput("line " + std::to_string(r.line) + ": label must be an integer class, got " +
                               std::to_string(r.label));
        }
        labels.insert(r.label);
    }
    const bool signed_binary = std::all_of(labels.begin(), labels.end(), [](double l) { return l == 1.0 || l == -1.0; });
    const bool zero_one = std::all_of(labels.begin(), labels.end(), [](double l) { return l == 0.0 || l == 1.0; });

    std::map<long, int> mapping;
    if (signed_binary) {
        mapping = {{-1, -1}, {1, 1}};
    } else if (zero_one) {
        mapping = {{0, -1}, {1, 1}};
    } else {
        std::vector<long> raw;
        raw.reserve(records.size());
        for (const auto& r : records) raw.push_back(static_cast<long>(r.label));
        mapping = binarize_multiclass(raw, label_seed);
    }

    std::vector<Instance> instances;
    instances.reserve(records.size());
    for (auto& r : records) {
        instances.push_back({std::move(r.features), mapping.at(static_cast<long>(r.label))});
    }
    return Dataset(std::move(instances));
}

Dataset load_libsvm(const std::string& path, std::uint64_t label_seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open dataset '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_libsvm(buf.str(), label_seed);
}

std::string serialize_libsvm(const Dataset& data) {
    std::string out;
    for (const auto& inst : data.instances()) {
        out += inst.label > 0 ? "+1" : "-1";
        for (const auto& f : inst.features) {
            out += ' ';
            out += std::to_string(f.index);
            out += ':';
            append_real(out, f.value);
        }
        out += '\n';
    }
    return out;
}

std::map<long, int> binarize_multiclass(const std::vector<long>& raw_labels, std::uint64_t seed) {
    const std::set<long> classes(raw_labels.begin(), raw_labels.end());
    if (classes.size() < 2) {
        throw InvalidInput("binarize_multiclass needs at least two distinct classes, got " +
                           std::to_string(classes.size()));
    }
    SplitMix64 rng(seed);
    std::map<long, int> mapping;
    for (;;) {
        std::size_t positives = 0;
        for (long c : classes) {
            const int label = (rng.next() >> 63) ? 1 : -1;
            mapping[c] = label;
            positives += label > 0;
        }
        if (positives > 0 && positives < classes.size()) return mapping;
    }
}

ScalingRecord fit_scaling(const Dataset& data) {
    ScalingRecord rec;
    rec.lo.assign(data.dim(), 0.0);
    rec.hi.assign(data.dim(), 0.0);
    rec.seen.assign(data.dim(), false);
    std::vector<std::size_t> stored(data.dim(), 0);
    for (const auto& inst : data.instances()) {
        for (const auto& f : inst.features) {
            const std::size_t k = f.index - 1;
            ++stored[k];
            if (!rec.seen[k]) {
                rec.lo[k] = rec.hi[k] = f.value;
                rec.seen[k] = true;
            } else {
                rec.lo[k] = std::min(rec.lo[k], f.value);
                rec.hi[k] = std::max(rec.hi[k], f.value);
            }
        }
    }
    // An instance without a stored value holds an implicit zero, which counts
    // toward the range (svm-scale convention).
    for (std::size_t k = 0; k < data.dim(); ++k) {
        if (rec.seen[k] && stored[k] < data.size()) {
            rec.lo[k] = std::min(rec.lo[k], 0.0);
            rec.hi[k] = std::max(rec.hi[k], 0.0);
        }
    }
    return rec;
}

Dataset apply_scaling(const Dataset& data, const ScalingRecord& record) {
    std::vector<Instance> out;
    out.reserve(data.size());
    for (const auto& inst : data.instances()) {
        Instance scaled{inst.features, inst.label};
        for (auto& f : scaled.features) {
            const std::size_t k = f.index - 1;
            if (k >= record.dim() || !record.seen[k] || record.hi[k] == record.lo[k]) {
                f.value = 0.0;
            } else {
                f.value = 2.0 * (f.value - record.lo[k]) / (record.hi[k] - record.lo[k]) - 1.0;
            }
        }
        out.push_back(std::move(scaled));
    }
    return Dataset(std::move(out), data.dim());
}

ScaledDataset scale_features(const Dataset& data) {
    if (data.empty()) throw InvalidInput("scale_features: dataset is empty");
    auto record = fit_scaling(data);
    auto scaled = apply_scaling(data, record);
    return {std::move(scaled), std::move(record)};
}

std::vector<std::size_t> SplitPlan::fold_rows(std::size_t fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < fold_assignment.size(); ++i) {
        if (fold_assignment[i] == fold) rows.push_back(i);
    }
    return rows;
}

std::vector<std::size_t> SplitPlan::rows_except(std::size_t fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < fold_assignment.size(); ++i) {
        if (fold_assignment[i] != fold) rows.push_back(i);
    }
    return rows;
}

std::vector<std::size_t> SplitPlan::fold_sizes() const {
    std::vector<std::size_t> sizes(fold_count, 0);
    for (auto f : fold_assignment) ++sizes[f];
    return sizes;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    SplitMix64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

SplitPlan split_folds(std::size_t size, std::size_t k, std::uint64_t seed) {
    if (k == 0) throw InvalidInput("split_folds: fold count must be positive");
    if (k > size) {
        throw InvalidInput("split_folds: " + std::to_string(k) + " folds requested for " + std::to_string(size) +
                           " instances");
    }
    SplitPlan plan{seed, k, std::vector<std::size_t>(size)};
    const auto order = seeded_permutation(size, seed);
    for (std::size_t i = 0; i < size; ++i) plan.fold_assignment[order[i]] = i % k;
    return plan;
}

SplitPlan split_folds(const Dataset& data, std::size_t k, std::uint64_t seed) {
    return split_folds(data.size(), k, seed);
}

Dataset permute(const Dataset& data, std::uint64_t seed) {
    return data.select(seeded_permutation(data.size(), seed));
}

Dataset subsample(const Dataset& data, std::size_t cap, std::uint64_t seed) {
    if (cap == 0) throw InvalidInput("subsample: cap must be positive");
    if (data.size() <= cap) return data;
    auto order = seeded_permutation(data.size(), seed);
    order.resize(cap);
    std::sort(order.begin(), order.end());
    return data.select(order);
}

}  // namespace cbr
