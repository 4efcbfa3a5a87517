#include "cbr/linalg.hpp"

#include <cmath>
#include <string>

#include "cbr/error.hpp"
#include "cbr/kernels.hpp"

namespace cbr {

DenseMatrix DenseMatrix::identity(std::size_t dim) {
    DenseMatrix m(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

double DenseMatrix::asymmetry() const noexcept {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i + 1; j < dim_; ++j) {
            worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
        }
    }
    return worst;
}

namespace {
void check_shape(const DenseMatrix& sigma, std::span<const double> z) {
    if (sigma.dim() != z.size()) {
        throw ShapeError("matrix is " + std::to_string(sigma.dim()) + "x" + std::to_string(sigma.dim()) +
                         " but vector has length " + std::to_string(z.size()));
    }
}
}  // namespace

double quadratic_form(const DenseMatrix& sigma, std::span<const double> z) {
    check_shape(sigma, z);
    std::vector<double> s(z.size());
    kernels::symv_sparse(sigma, from_dense(z), s);
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) sum += z[i] * s[i];
    return sum;
}

DenseMatrix rank1_covariance_downdate(const DenseMatrix& sigma, std::span<const double> z, double beta) {
    check_shape(sigma, z);
    DenseMatrix out = sigma;
    if (beta == 0.0) return out;
    std::vector<double> s(z.size());
    kernels::symv_sparse(sigma, from_dense(z), s);
    kernels::rank1_downdate(out, s, beta);
    return out;
}

}  // namespace cbr
