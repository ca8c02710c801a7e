#include "ils/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ils/error.hpp"

namespace ils {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols) throw DomainError("matrix entry count does not match its shape");
    for (double v : data_)
        if (!std::isfinite(v)) throw DomainError("matrix entries must be finite");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DomainError("ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> DenseMatrix::column(std::size_t j) const {
    std::vector<double> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double DenseMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

void DenseMatrix::swap_columns(std::size_t a, std::size_t b) noexcept {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DomainError("matrix product shape mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

std::vector<double> operator*(const DenseMatrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DomainError("matrix-vector shape mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("matrix difference shape mismatch");
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

// ---------------------------------------------------------------------------

UpperTriangular::UpperTriangular(DenseMatrix m) : m_(std::move(m)) {
    const std::size_t n = m_.rows();
    if (n == 0 || m_.cols() != n) throw DomainError("upper-triangular factor must be square and non-empty");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = m_(i, j);
            if (!std::isfinite(v)) throw DomainError("matrix entries must be finite");
            if (j < i && v != 0.0) throw DomainError("entry below the diagonal is nonzero");
        }
        if (!(m_(i, i) > 0.0)) throw DomainError("diagonal entries must be positive");
    }
}

UpperTriangular::UpperTriangular(std::initializer_list<std::initializer_list<double>> rows)
    : UpperTriangular(DenseMatrix(rows)) {}

UpperTriangular UpperTriangular::identity(std::size_t n) { return UpperTriangular(DenseMatrix::identity(n)); }

UpperTriangular UpperTriangular::diagonal(std::span<const double> d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return UpperTriangular(std::move(m));
}

std::vector<double> UpperTriangular::diag() const {
    std::vector<double> d(size());
    for (std::size_t i = 0; i < size(); ++i) d[i] = m_(i, i);
    return d;
}

// ---------------------------------------------------------------------------

QrFactors qr_factorize(const DenseMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (n == 0 || m < n) throw DomainError("QR needs a non-empty matrix with rows >= cols");
    const double scale = a.max_abs();
    const double pivot_floor = 1e-12 * scale;
    if (!(scale > 0.0)) throw RankDeficientError("matrix is zero");

    DenseMatrix w = a;
    std::vector<std::vector<double>> reflectors(n);
    for (std::size_t j = 0; j < n; ++j) {
        double norm2 = 0.0;
        for (std::size_t i = j; i < m; ++i) norm2 += w(i, j) * w(i, j);
        const double norm = std::sqrt(norm2);
        if (norm <= pivot_floor)
            throw RankDeficientError("matrix is numerically rank deficient at column " + std::to_string(j + 1));

        const double alpha = w(j, j) >= 0.0 ? -norm : norm;
        std::vector<double> v(m - j);
        for (std::size_t i = j; i < m; ++i) v[i - j] = w(i, j);
        v[0] -= alpha;
        double vnorm2 = 0.0;
        for (double x : v) vnorm2 += x * x;
        if (vnorm2 > 0.0) {
            for (std::size_t c = j; c < n; ++c) {
                double dot = 0.0;
                for (std::size_t i = j; i < m; ++i) dot += v[i - j] * w(i, c);
                const double f = 2.0 * dot / vnorm2;
                for (std::size_t i = j; i < m; ++i) w(i, c) -= f * v[i - j];
            }
        }
        reflectors[j] = std::move(v);
    }

    // Q1 = H_0 H_1 ... H_{n-1} applied to the first n columns of I_m.
    DenseMatrix q(m, n);
    for (std::size_t i = 0; i < n; ++i) q(i, i) = 1.0;
    for (std::size_t jj = n; jj-- > 0;) {
        const auto& v = reflectors[jj];
        double vnorm2 = 0.0;
        for (double x : v) vnorm2 += x * x;
        if (vnorm2 == 0.0) continue;
        for (std::size_t c = 0; c < n; ++c) {
            double dot = 0.0;
            for (std::size_t i = jj; i < m; ++i) dot += v[i - jj] * q(i, c);
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = jj; i < m; ++i) q(i, c) -= f * v[i - jj];
        }
    }

    DenseMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) r(i, j) = w(i, j);
    for (std::size_t i = 0; i < n; ++i) {
        if (r(i, i) < 0.0) {
            for (std::size_t j = i; j < n; ++j) r(i, j) = -r(i, j);
            for (std::size_t k = 0; k < m; ++k) q(k, i) = -q(k, i);
        }
    }
    return {std::move(q), UpperTriangular(std::move(r))};
}

// ---------------------------------------------------------------------------

void Reflection::apply(std::span<double> y) const noexcept {
    const double a = y[k - 1];
    const double b = y[k];
    y[k - 1] = c * a + s * b;
    y[k] = s * a - c * b;
}

DenseMatrix Reflection::as_matrix(std::size_t n) const {
    // G^T = [c s; s -c] is symmetric, so G has the same block.
    DenseMatrix g = DenseMatrix::identity(n);
    g(k - 1, k - 1) = c;
    g(k - 1, k) = s;
    g(k, k - 1) = s;
    g(k, k) = -c;
    return g;
}

Reflection permute_triangularize_in_place(UpperTriangular& r, std::size_t k) {
    const std::size_t n = r.size();
    if (k < 1 || k >= n) throw DomainError("permutation index out of range");

    const double a = r(k - 1, k - 1);
    const double b = r(k - 1, k);
    const double d = r(k, k);
    const double rho = std::hypot(b, d);
    const Reflection g{k, b / rho, d / rho};

    // Rows k-1 and k of the swapped columns k-1, k.
    r(k - 1, k - 1) = rho;
    r(k - 1, k) = g.c * a;
    r(k, k) = g.s * a;
    for (std::size_t j = 0; j + 1 < k; ++j) std::swap(r(j, k - 1), r(j, k));
    for (std::size_t j = k + 1; j < n; ++j) {
        const double u = r(k - 1, j);
        const double v = r(k, j);
        r(k - 1, j) = g.c * u + g.s * v;
        r(k, j) = g.s * u - g.c * v;
    }
    return g;
}

PermuteResult givens_permute_triangularize(const UpperTriangular& r, std::size_t k) {
    UpperTriangular out = r;
    const Reflection g = permute_triangularize_in_place(out, k);
    return {std::move(out), g};
}

// ---------------------------------------------------------------------------

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

DenseMatrix read_matrix(std::istream& in) {
    std::size_t rows = 0, cols = 0;
    if (!(in >> rows >> cols)) throw IoError("matrix header \"rows cols\" is missing or malformed");
    if (rows == 0 || cols == 0) throw IoError("matrix dimensions must be positive");
    std::vector<double> entries(rows * cols);
    for (auto& e : entries)
        if (!(in >> e)) throw IoError("matrix body is truncated or contains a non-number");
    return DenseMatrix(rows, cols, std::move(entries));
}

std::vector<double> read_vector(std::istream& in) {
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        double x;
        while (ls >> x) v.push_back(x);
        if (!ls.eof()) throw IoError("vector line contains a non-number");
        if (!v.empty()) break;
    }
    for (double x : v)
        if (!std::isfinite(x)) throw DomainError("vector entries must be finite");
    return v;
}

void write_matrix(std::ostream& out, const DenseMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_real(m(i, j));
        }
        out << '\n';
    }
}

void write_vector(std::ostream& out, std::span<const double> v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ' ';
        out << format_real(v[i]);
    }
    out << '\n';
}

DenseMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_matrix(in);
}

}  // namespace ils
