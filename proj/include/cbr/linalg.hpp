#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cbr {

/// Dense square matrix, row-major. Used for the full covariance, which the
/// update kernels keep exactly symmetric.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t dim, double fill = 0.0) : dim_(dim), data_(dim * dim, fill) {}

    static DenseMatrix identity(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }

    double& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * dim_ + col]; }
    double operator()(std::size_t row, std::size_t col) const noexcept { return data_[row * dim_ + col]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * dim_, dim_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * dim_, dim_}; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    /// Largest |A(i,j) - A(j,i)|.
    double asymmetry() const noexcept;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// z' * sigma * z. Throws ShapeError on dimension mismatch.
double quadratic_form(const DenseMatrix& sigma, std::span<const double> z);

/// sigma - beta * (sigma z)(sigma z)'. The upper triangle is computed and
/// mirrored, so the result is exactly symmetric. Throws ShapeError on mismatch.
DenseMatrix rank1_covariance_downdate(const DenseMatrix& sigma, std::span<const double> z, double beta);

}  // namespace cbr
