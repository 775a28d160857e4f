#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aclab {

/// Small dense row-major matrix. Sizes here never exceed a few dozen.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix transpose() const;
    std::vector<double> apply(std::span<const double> x) const;

    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Matrix operator-(const Matrix& a, const Matrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Largest absolute entry.
double max_abs(const Matrix& m);

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
struct SymmetricEigen {
    std::vector<double> values;  ///< ascending
    Matrix vectors;              ///< column i is the eigenvector of values[i]
    int sweeps = 0;
};

/// Throws EigenFailure if the off-diagonal mass does not vanish within max_sweeps.
SymmetricEigen jacobi_eigen(const Matrix& sym, int max_sweeps = 64);

/// V f(D) V^T for a symmetric matrix; f is applied to each eigenvalue.
template <class F>
Matrix spectral_function(const SymmetricEigen& eig, F&& f) {
    const std::size_t n = eig.values.size();
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = f(eig.values[k]);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += eig.vectors(i, k) * fk * eig.vectors(j, k);
    }
    return out;
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
Matrix inverse(const Matrix& a);

/// Thomas algorithm for sub/main/super diagonals; all spans have the same length
/// (sub[0] and sup[n-1] are ignored). Throws LinAlgFailure on a zero pivot.
void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> sup, std::span<double> rhs);

}  // namespace aclab
