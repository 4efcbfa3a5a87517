#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cbr {

/// One stored coordinate. Indices are 1-based, as in LibSVM files.
struct Feature {
    std::uint32_t index = 0;
    double value = 0.0;

    friend bool operator==(const Feature&, const Feature&) = default;
};

/// Sorted by index, indices unique. Absent coordinates are zero.
using SparseVector = std::vector<Feature>;

/// Largest index present, 0 for the empty vector.
std::uint32_t max_index(const SparseVector& v);

/// Dot product with a dense 0-based array; throws ShapeError if an index exceeds dense.size().
double dot(std::span<const double> dense, const SparseVector& v);

double squared_norm(const SparseVector& v);

/// a - b, merged over the union of supports. Exact zeros are dropped.
SparseVector difference(const SparseVector& a, const SparseVector& b);

/// Dense (0-based) to sparse (1-based), keeping nonzeros only.
SparseVector from_dense(std::span<const double> dense);

std::vector<double> to_dense(const SparseVector& v, std::size_t dim);

/// True when indices are strictly increasing and positive.
bool is_canonical(const SparseVector& v);

}  // namespace cbr
