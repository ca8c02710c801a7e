#pragma once

namespace ils::special {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series for x < a + 1, Lentz continued fraction for the complement otherwise.
double regularized_gamma_p(double a, double x);

/// Chi-square CDF with `dof` degrees of freedom.
double chi_square_cdf(double x, int dof);

/// log of the volume of the k-dimensional unit Euclidean ball,
/// (k/2) log(pi) - lgamma(k/2 + 1).
double log_unit_ball_volume(int k);

/// log erf(x) for x > 0, accurate near both 0 and +inf.
double log_erf(double x);

}  // namespace ils::special
