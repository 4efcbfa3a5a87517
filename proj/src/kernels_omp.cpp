#include <omp.h>

#include <algorithm>

#include "cbr/kernels.hpp"

namespace cbr::kernels {
namespace parallel {

void symv_sparse(const DenseMatrix& sigma, const SparseVector& z, std::span<double> out) {
    const auto d = static_cast<std::ptrdiff_t>(sigma.dim());
    constexpr std::ptrdiff_t kBlock = 256;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t lo = 0; lo < d; lo += kBlock) {
        const std::ptrdiff_t hi = std::min(d, lo + kBlock);
        std::fill(out.begin() + lo, out.begin() + hi, 0.0);
        for (const auto& f : z) {
            const auto row = sigma.row(f.index - 1);
            for (std::ptrdiff_t i = lo; i < hi; ++i) out[i] += row[i] * f.value;
        }
    }
}

void rank1_downdate(DenseMatrix& sigma, std::span<const double> s, double beta) {
    const auto d = static_cast<std::ptrdiff_t>(sigma.dim());
    // Row i writes (i, j>=i) and the mirrored (j, i); no two rows touch the same element.
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < d; ++i) {
        for (std::ptrdiff_t j = i; j < d; ++j) {
            const double v = sigma(i, j) - beta * (s[i] * s[j]);
            sigma(i, j) = v;
            sigma(j, i) = v;
        }
    }
}

}  // namespace parallel

namespace {
bool go_parallel(std::size_t dim) {
    return dim >= kParallelMinDim && !omp_in_parallel() && omp_get_max_threads() > 1;
}
}  // namespace

void symv_sparse(const DenseMatrix& sigma, const SparseVector& z, std::span<double> out) {
    if (go_parallel(sigma.dim())) {
        parallel::symv_sparse(sigma, z, out);
    } else {
        serial::symv_sparse(sigma, z, out);
    }
}

void rank1_downdate(DenseMatrix& sigma, std::span<const double> s, double beta) {
    if (go_parallel(sigma.dim())) {
        parallel::rank1_downdate(sigma, s, beta);
    } else {
        serial::rank1_downdate(sigma, s, beta);
    }
}

}  // namespace cbr::kernels
