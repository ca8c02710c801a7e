#include "ils/generators.hpp"

#include <cmath>

#include "ils/error.hpp"

namespace ils {

DenseMatrix random_gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
    DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

DenseMatrix random_orthogonal(std::size_t n, RngStream& rng) {
    return qr_factorize(random_gaussian_matrix(n, n, rng)).q1;
}

DenseMatrix generate_case1(std::size_t n, RngStream& rng) {
    if (n == 0) throw DomainError("dimension must be positive");
    return random_gaussian_matrix(n, n, rng);
}

std::vector<double> case2_singular_values(std::size_t n) {
    if (n < 2) throw DomainError("case 2 needs n >= 2");
    std::vector<double> d(n);
    const double half = 0.5 * static_cast<double>(n);
    for (std::size_t i = 1; i <= n; ++i)
        d[i - 1] = std::pow(10.0, 3.0 * (half - static_cast<double>(i)) / static_cast<double>(n - 1));
    return d;
}

DenseMatrix generate_case2(std::size_t n, RngStream& rng) {
    const auto d = case2_singular_values(n);
    const DenseMatrix u = random_orthogonal(n, rng);
    const DenseMatrix v = random_orthogonal(n, rng);
    DenseMatrix ud = u;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) ud(i, j) *= d[j];
    return ud * v.transposed();
}

double chi_square_draw(int dof, RngStream& rng) {
    double s = 0.0;
    for (int k = 0; k < dof; ++k) {
        const double g = rng.normal();
        s += g * g;
    }
    return s;
}

Case3Model generate_case3(std::size_t n, RngStream& rng) {
    if (n == 0) throw DomainError("dimension must be positive");
    DenseMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        r(i, i) = std::sqrt(chi_square_draw(static_cast<int>(i + 1), rng));
        for (std::size_t j = i + 1; j < n; ++j) r(i, j) = rng.normal();
    }
    UpperTriangular rt(std::move(r));
    const DenseMatrix q = random_orthogonal(n, rng);
    return {q * rt.dense(), std::move(rt)};
}

}  // namespace ils
