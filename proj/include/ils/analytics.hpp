#pragma once

#include <cstddef>
#include <vector>

#include "ils/linalg.hpp"

namespace ils {

/// Probability that |N(0, sigma^2)| <= zeta/2, i.e. erf(zeta / (2 sqrt(2) sigma)).
double phi(double zeta, double sigma);
double log_phi(double zeta, double sigma);

/// Products of probabilities smaller than this are reported as zero with a flag.
inline constexpr double kLogUnderflow = -700.0;

/// Probability accumulated in the log domain.
struct Probability {
    double log_value = 0.0;
    double value() const noexcept;
    bool underflow() const noexcept { return log_value < kLogUnderflow; }
};

/// Success probability of the nearest-plane estimate: prod_i phi(r_ii).
Probability log_success_probability(const UpperTriangular& r, double sigma);
double success_probability(const UpperTriangular& r, double sigma);

/// Chi-square lower bound F(r_min^2 / (4 sigma^2), n).
double chi2_lower_bound(const UpperTriangular& r, double sigma);

/// prod_i phi(gamma_i), gamma_i = max(r_11..r_ii). Bounds the success
/// probability after LLL reduction from above.
double beta1(const UpperTriangular& r, double sigma);

/// All 0-based i in [0, n-2] with max(r_00..r_ii) <= min(r_{i+1,i+1}..r_{n-1,n-1}).
/// Found by one forward running-max and one backward running-min pass.
std::vector<std::size_t> find_block_indices(const UpperTriangular& r);

struct Beta2Result {
    double value = 0.0;
    std::vector<std::size_t> block_indices;  ///< 0-based split points (block ends)
};

/// Block geometric-mean bound: prod_k phi^{len_k}(nu_k) over the blocks cut
/// at find_block_indices. Equals beta3 when there is no split.
Beta2Result beta2(const UpperTriangular& r, double sigma);

/// phi^n(nu), nu = geometric mean of the diagonal.
double beta3(const UpperTriangular& r, double sigma);

struct BoundsReport {
    std::size_t n = 0;
    double sigma = 0.0;
    double p_b = 0.0;
    double log_p_b = 0.0;
    bool p_b_underflow = false;
    double chi2_lower = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    std::vector<std::size_t> block_indices;  ///< 0-based
};

BoundsReport compute_bounds(const UpperTriangular& r, double sigma);

struct ComplexityEstimate {
    double zeta_hat = 0.0;
    std::vector<double> per_level_terms;  ///< term for level i (0-based)
    double log_zeta_hat = 0.0;
    double radius_beta = 0.0;
    bool overflow = false;  ///< zeta_hat saturated to +inf
};

/// sum_i V_{n-i} beta^{n-i} / (r_ii ... r_{n-1,n-1}) (0-based i), the volume
/// estimate of the number of enumerated nodes at fixed radius beta.
ComplexityEstimate complexity_estimate(const UpperTriangular& r, double beta_radius);

}  // namespace ils
