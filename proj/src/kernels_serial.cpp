#include <algorithm>

#include "cbr/kernels.hpp"

namespace cbr::kernels::serial {

void symv_sparse(const DenseMatrix& sigma, const SparseVector& z, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t d = sigma.dim();
    for (const auto& f : z) {
        const auto row = sigma.row(f.index - 1);
        for (std::size_t i = 0; i < d; ++i) out[i] += row[i] * f.value;
    }
}

void rank1_downdate(DenseMatrix& sigma, std::span<const double> s, double beta) {
    const std::size_t d = sigma.dim();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            const double v = sigma(i, j) - beta * (s[i] * s[j]);
            sigma(i, j) = v;
            sigma(j, i) = v;
        }
    }
}

}  // namespace cbr::kernels::serial
