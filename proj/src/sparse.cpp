#include "cbr/sparse.hpp"

#include <string>

#include "cbr/error.hpp"

namespace cbr {

std::uint32_t max_index(const SparseVector& v) { return v.empty() ? 0 : v.back().index; }

double dot(std::span<const double> dense, const SparseVector& v) {
    if (max_index(v) > dense.size()) {
        throw ShapeError("feature index " + std::to_string(max_index(v)) +
                         " exceeds model dimension " + std::to_string(dense.size()));
    }
    double sum = 0.0;
    for (const auto& f : v) sum += dense[f.index - 1] * f.value;
    return sum;
}

double squared_norm(const SparseVector& v) {
    double sum = 0.0;
    for (const auto& f : v) sum += f.value * f.value;
    return sum;
}

SparseVector difference(const SparseVector& a, const SparseVector& b) {
    SparseVector out;
    out.reserve(a.size() + b.size());
    auto push = [&out](std::uint32_t index, double value) {
        if (value != 0.0) out.push_back({index, value});
    };
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (i->index == j->index) {
            push(i->index, i->value - j->value);
            ++i;
            ++j;
        } else if (i->index < j->index) {
            push(i->index, i->value);
            ++i;
        } else {
            push(j->index, -j->value);
            ++j;
        }
    }
    for (; i != a.end(); ++i) push(i->index, i->value);
    for (; j != b.end(); ++j) push(j->index, -j->value);
    return out;
}

SparseVector from_dense(std::span<const double> dense) {
    SparseVector out;
    for (std::size_t k = 0; k < dense.size(); ++k) {
        if (dense[k] != 0.0) out.push_back({static_cast<std::uint32_t>(k + 1), dense[k]});
    }
    return out;
}

std::vector<double> to_dense(const SparseVector& v, std::size_t dim) {
    if (max_index(v) > dim) throw ShapeError("sparse vector does not fit dimension " + std::to_string(dim));
    std::vector<double> out(dim, 0.0);
    for (const auto& f : v) out[f.index - 1] = f.value;
    return out;
}

bool is_canonical(const SparseVector& v) {
    std::uint32_t last = 0;
    for (const auto& f : v) {
        if (f.index <= last) return false;
        last = f.index;
    }
    return true;
}

}  // namespace cbr
