#include "ils/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ils/error.hpp"
#include "ils/special_functions.hpp"

namespace ils {

namespace {

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive and finite");
}

double erf_argument(double zeta, double sigma) {
    if (!(zeta > 0.0)) throw DomainError("phi needs a positive argument");
    check_sigma(sigma);
    return zeta / (2.0 * std::numbers::sqrt2 * sigma);
}

// sum over blocks of len * log phi(geometric mean of block); cuts are block ends.
double log_block_bound(std::span<const double> diag, std::span<const std::size_t> cuts, double sigma) {
    double total = 0.0;
    std::size_t begin = 0;
    auto close_block = [&](std::size_t end) {
        double log_sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) log_sum += std::log(diag[i]);
        const double len = static_cast<double>(end - begin);
        total += len * log_phi(std::exp(log_sum / len), sigma);
        begin = end;
    };
    for (std::size_t c : cuts) close_block(c + 1);
    close_block(diag.size());
    return total;
}

}  // namespace

double phi(double zeta, double sigma) {
    if (std::isinf(zeta) && zeta > 0.0) {
        check_sigma(sigma);
        return 1.0;
    }
    return std::erf(erf_argument(zeta, sigma));
}

double log_phi(double zeta, double sigma) {
    if (std::isinf(zeta) && zeta > 0.0) {
        check_sigma(sigma);
        return 0.0;
    }
    return special::log_erf(erf_argument(zeta, sigma));
}

double Probability::value() const noexcept { return underflow() ? 0.0 : std::exp(log_value); }

Probability log_success_probability(const UpperTriangular& r, double sigma) {
    check_sigma(sigma);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += log_phi(r(i, i), sigma);
    return {s};
}

double success_probability(const UpperTriangular& r, double sigma) {
    return log_success_probability(r, sigma).value();
}

double chi2_lower_bound(const UpperTriangular& r, double sigma) {
    check_sigma(sigma);
    const auto d = r.diag();
    const double rmin = *std::min_element(d.begin(), d.end());
    return special::chi_square_cdf(rmin * rmin / (4.0 * sigma * sigma), static_cast<int>(r.size()));
}

double beta1(const UpperTriangular& r, double sigma) {
    check_sigma(sigma);
    double running_max = 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        running_max = std::max(running_max, r(i, i));
        s += log_phi(running_max, sigma);
    }
    return Probability{s}.value();
}

std::vector<std::size_t> find_block_indices(const UpperTriangular& r) {
    const std::size_t n = r.size();
    std::vector<std::size_t> out;
    if (n < 2) return out;
    std::vector<double> suffix_min(n - 1);
    suffix_min[n - 2] = r(n - 1, n - 1);
    for (std::size_t i = n - 2; i-- > 0;) suffix_min[i] = std::min(r(i + 1, i + 1), suffix_min[i + 1]);
    double prefix_max = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        prefix_max = std::max(prefix_max, r(i, i));
        if (prefix_max <= suffix_min[i]) out.push_back(i);
    }
    return out;
}

Beta2Result beta2(const UpperTriangular& r, double sigma) {
    check_sigma(sigma);
    Beta2Result res;
    res.block_indices = find_block_indices(r);
    const auto d = r.diag();
    res.value = Probability{log_block_bound(d, res.block_indices, sigma)}.value();
    return res;
}

double beta3(const UpperTriangular& r, double sigma) {
    check_sigma(sigma);
    const auto d = r.diag();
    return Probability{log_block_bound(d, {}, sigma)}.value();
}

BoundsReport compute_bounds(const UpperTriangular& r, double sigma) {
    BoundsReport rep;
    rep.n = r.size();
    rep.sigma = sigma;
    const Probability pb = log_success_probability(r, sigma);
    rep.p_b = pb.value();
    rep.log_p_b = pb.log_value;
    rep.p_b_underflow = pb.underflow();
    rep.chi2_lower = chi2_lower_bound(r, sigma);
    rep.beta1 = beta1(r, sigma);
    auto b2 = beta2(r, sigma);
    rep.beta2 = b2.value;
    rep.block_indices = std::move(b2.block_indices);
    rep.beta3 = beta3(r, sigma);
    return rep;
}

ComplexityEstimate complexity_estimate(const UpperTriangular& r, double beta_radius) {
    if (!(beta_radius > 0.0) || !std::isfinite(beta_radius)) throw DomainError("search radius must be positive");
    const std::size_t n = r.size();
    ComplexityEstimate est;
    est.radius_beta = beta_radius;
    est.per_level_terms.resize(n);

    std::vector<double> log_terms(n);
    double log_det_tail = 0.0;
    const double log_beta = std::log(beta_radius);
    for (std::size_t i = n; i-- > 0;) {
        log_det_tail += std::log(r(i, i));
        const int dim = static_cast<int>(n - i);
        log_terms[i] = special::log_unit_ball_volume(dim) + dim * log_beta - log_det_tail;
    }
    // log-sum-exp
    const double top = *std::max_element(log_terms.begin(), log_terms.end());
    double acc = 0.0;
    for (double lt : log_terms) acc += std::exp(lt - top);
    est.log_zeta_hat = top + std::log(acc);

    constexpr double kLogMax = 709.0;
    for (std::size_t i = 0; i < n; ++i)
        est.per_level_terms[i] =
            log_terms[i] > kLogMax ? std::numeric_limits<double>::infinity() : std::exp(log_terms[i]);
    if (est.log_zeta_hat > kLogMax) {
        est.overflow = true;
        est.zeta_hat = std::numeric_limits<double>::infinity();
    } else {
        // Plain summation so zeta_hat is the sum of the reported terms.
        for (double t : est.per_level_terms) est.zeta_hat += t;
    }
    return est;
}

}  // namespace ils
