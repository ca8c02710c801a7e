#pragma once

#include <cstddef>
#include <vector>

#include "ils/linalg.hpp"
#include "ils/rng.hpp"

namespace ils {

/// n x n matrix of independent N(0, 1) entries.
DenseMatrix random_gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng);

/// Random orthogonal matrix: Q factor (positive-diagonal convention) of a Gaussian matrix.
DenseMatrix random_orthogonal(std::size_t n, RngStream& rng);

/// Case 1: independent standard normal entries.
DenseMatrix generate_case1(std::size_t n, RngStream& rng);

/// d_ii = 10^{3 (n/2 - i) / (n - 1)} for 1-based i; condition number 10^3.
std::vector<double> case2_singular_values(std::size_t n);

/// Case 2: U D V^T with random orthogonal U, V.
DenseMatrix generate_case2(std::size_t n, RngStream& rng);

struct Case3Model {
    DenseMatrix a;      ///< Q R
    UpperTriangular r;  ///< r_ii^2 ~ chi^2(i) (1-based i), r_ij ~ N(0,1) above
};

/// Case 3: A = Q R with the triangular factor drawn directly.
Case3Model generate_case3(std::size_t n, RngStream& rng);

/// Sum of `dof` squared standard normals.
double chi_square_draw(int dof, RngStream& rng);

}  // namespace ils
