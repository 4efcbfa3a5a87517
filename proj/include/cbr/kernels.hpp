#pragma once

#include <cstddef>
#include <span>

#include "cbr/linalg.hpp"
#include "cbr/sparse.hpp"

// Hot loops of the full-covariance update. Each kernel has a serial reference
// and an OpenMP version; both compute every output element with the same
// operation order, so their results are bit-identical and the reference can
// be used as the oracle in tests.
namespace cbr::kernels {

namespace serial {

/// out = sigma * z for sparse z, accumulated as sum_k z_k * row_k (sigma symmetric).
void symv_sparse(const DenseMatrix& sigma, const SparseVector& z, std::span<double> out);

/// sigma -= beta * s s', upper triangle computed then mirrored.
void rank1_downdate(DenseMatrix& sigma, std::span<const double> s, double beta);

}  // namespace serial

namespace parallel {

void symv_sparse(const DenseMatrix& sigma, const SparseVector& z, std::span<double> out);
void rank1_downdate(DenseMatrix& sigma, std::span<const double> s, double beta);

}  // namespace parallel

/// Below this dimension the dispatchers stay serial; thread start-up dominates.
inline constexpr std::size_t kParallelMinDim = 192;

// Dispatchers: parallel for large dim when not already inside a parallel region.
void symv_sparse(const DenseMatrix& sigma, const SparseVector& z, std::span<double> out);
void rank1_downdate(DenseMatrix& sigma, std::span<const double> s, double beta);

}  // namespace cbr::kernels
