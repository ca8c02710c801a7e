#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ils {

/// Dense row-major real matrix with finite entries.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }

    std::vector<double> column(std::size_t j) const;
    DenseMatrix transposed() const;
    /// Largest absolute entry.
    double max_abs() const noexcept;
    void swap_columns(std::size_t a, std::size_t b) noexcept;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> operator*(const DenseMatrix& a, std::span<const double> x);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);

/// Square upper-triangular factor with a strictly positive diagonal.
///
/// Entries below the diagonal are stored and always zero. The constructor
/// rejects non-square input, non-finite entries, nonzero sub-diagonal
/// entries and non-positive diagonal entries. Mutable element access exists
/// for the reduction kernels; they keep the invariants.
class UpperTriangular {
public:
    UpperTriangular() = default;
    explicit UpperTriangular(DenseMatrix m);
    UpperTriangular(std::initializer_list<std::initializer_list<double>> rows);

    static UpperTriangular identity(std::size_t n);
    static UpperTriangular diagonal(std::span<const double> d);

    std::size_t size() const noexcept { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    double& operator()(std::size_t i, std::size_t j) noexcept { return m_(i, j); }

    std::vector<double> diag() const;
    const DenseMatrix& dense() const noexcept { return m_; }

    friend bool operator==(const UpperTriangular&, const UpperTriangular&) = default;

private:
    DenseMatrix m_;
};

struct QrFactors {
    DenseMatrix q1;     ///< m x n with orthonormal columns
    UpperTriangular r;  ///< n x n, positive diagonal
};

/// Householder QR of a tall matrix with the sign convention r_ii > 0.
/// Throws RankDeficientError when a pivot falls below 1e-12 * max|a_ij|.
QrFactors qr_factorize(const DenseMatrix& a);

/// 2x2 orthogonal reflection [c s; s -c] acting on rows (k-1, k).
///
/// Produced by the column swap + re-triangularization step; applying it to a
/// right-hand side keeps the transformed least-squares problem consistent.
struct Reflection {
    std::size_t k = 1;  ///< second of the two affected indices (0-based)
    double c = 0.0;
    double s = 1.0;

    void apply(std::span<double> y) const noexcept;
    /// Full n x n orthonormal matrix G such that the result equals G^T R P.
    DenseMatrix as_matrix(std::size_t n) const;
};

/// Swap columns k-1 and k of r (0-based k in [1, n)) and restore triangular
/// form with one reflection. The new pair satisfies
///   rbar_{k-1,k-1}^2 = r_{k-1,k}^2 + r_{kk}^2,
///   rbar_{k-1,k}^2 + rbar_{kk}^2 = r_{k-1,k-1}^2,
/// and the product of the diagonal is unchanged.
Reflection permute_triangularize_in_place(UpperTriangular& r, std::size_t k);

struct PermuteResult {
    UpperTriangular r;
    Reflection rotation;
};
PermuteResult givens_permute_triangularize(const UpperTriangular& r, std::size_t k);

// Text format: "rows cols" on the first line, then one row per line.
DenseMatrix read_matrix(std::istream& in);
std::vector<double> read_vector(std::istream& in);
void write_matrix(std::ostream& out, const DenseMatrix& m);
void write_vector(std::ostream& out, std::span<const double> v);
DenseMatrix load_matrix(const std::string& path);

/// "%.17g" rendering shared by every text emitter.
std::string format_real(double v);

}  // namespace ils
