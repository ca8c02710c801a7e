#pragma once

// Independent reference implementations used only by the tests. None of these
// call into the library's special functions or search routines.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "ils/linalg.hpp"
#include "ils/rng.hpp"

namespace oracle {

// erf(x) = 2/sqrt(pi) e^{-x^2} sum_k 2^k x^{2k+1} / (1*3*...*(2k+1)); all terms positive.
inline long double erf(long double x) {
    if (x < 0) return -oracle::erf(-x);
    if (x == 0) return 0;
    if (x > 6.5L) return 1;  // erfc(6.5) < 1e-19
    long double term = x, sum = x;
    for (int k = 1; k < 2000; ++k) {
        term *= 2 * x * x / (2 * k + 1);
        sum += term;
        if (term < sum * 1e-21L) break;
    }
    return 2 / std::sqrt(std::numbers::pi_v<long double>) * std::exp(-x * x) * sum;
}

// erfc(x) for x >= 2 by the Laplace continued fraction, evaluated bottom-up.
inline long double erfc_large(long double x) {
    long double t = x;
    for (int k = 400; k >= 1; --k) t = x + (k / 2.0L) / t;
    return std::exp(-x * x) / std::sqrt(std::numbers::pi_v<long double>) / t;
}

inline double phi(double zeta, double sigma) {
    return static_cast<double>(oracle::erf(static_cast<long double>(zeta) / (2 * std::sqrt(2.0L) * sigma)));
}

inline double success_probability(const std::vector<double>& diag, double sigma) {
    long double p = 1;
    for (double d : diag) p *= oracle::phi(d, sigma);
    return static_cast<double>(p);
}

// Chi-square CDF as the tail of the degree-of-freedom recursion
// F(q, k) = F(q, k + 2) + (q/2)^{k/2} e^{-q/2} / Gamma(k/2 + 1), summed upward; all terms positive.
inline double chi_square_cdf(double q, int dof) {
    const long double h = q / 2.0L;
    long double g = std::exp(dof / 2.0L * std::log(h) - h - std::lgamma(dof / 2.0L + 1));
    long double f = 0;
    for (int k = dof; k < dof + 100000; k += 2) {
        f += g;
        if (k / 2.0L > h && g < f * 1e-21L) break;
        g *= h / ((k + 2) / 2.0L);
    }
    return static_cast<double>(f);
}

// V_k by V_0 = 1, V_1 = 2, V_k = 2 pi / k * V_{k-2}.
inline double unit_ball_volume(int k) {
    long double a = 1, b = 2;
    if (k == 0) return 1;
    for (int j = 2; j <= k; ++j) {
        const long double c = 2 * std::numbers::pi_v<long double> / j * a;
        a = b;
        b = c;
    }
    return static_cast<double>(b);
}

inline double residual(const ils::UpperTriangular& r, const std::vector<double>& y, const std::vector<std::int64_t>& x) {
    double s = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        double t = y[i];
        for (std::size_t j = i; j < r.size(); ++j) t -= r(i, j) * static_cast<double>(x[j]);
        s += t * t;
    }
    return std::sqrt(s);
}

// Visit every integer vector in the box center +- half.
inline void for_each_in_box(const std::vector<std::int64_t>& center, std::int64_t half,
                            const std::function<void(const std::vector<std::int64_t>&)>& f) {
    std::vector<std::int64_t> x(center.size());
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == center.size()) {
            f(x);
            return;
        }
        for (std::int64_t v = center[i] - half; v <= center[i] + half; ++v) {
            x[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
}

struct BruteForceResult {
    std::vector<std::int64_t> x;
    double residual = std::numeric_limits<double>::infinity();
};

inline BruteForceResult brute_force_ils(const ils::UpperTriangular& r, const std::vector<double>& y,
                                        const std::vector<std::int64_t>& center, std::int64_t half) {
    BruteForceResult best;
    for_each_in_box(center, half, [&](const std::vector<std::int64_t>& x) {
        const double res = residual(r, y, x);
        if (res < best.residual) best = {x, res};
    });
    return best;
}

// Exhaustive ILS: every integer point inside the sphere whose radius is the residual of the
// rounded real solution (a valid lattice point, so the optimum is inside). Per-level integer
// ranges come from the partial distance, scanned in increasing order.
inline BruteForceResult exhaustive_ils(const ils::UpperTriangular& r, const std::vector<double>& y) {
    const std::size_t n = r.size();
    std::vector<double> real(n);
    for (std::size_t i = n; i-- > 0;) {
        double t = y[i];
        for (std::size_t j = i + 1; j < n; ++j) t -= r(i, j) * real[j];
        real[i] = t / r(i, i);
    }
    std::vector<std::int64_t> start(n);
    for (std::size_t i = 0; i < n; ++i) start[i] = std::llround(real[i]);
    const double radius2 = std::pow(residual(r, y, start), 2) * (1 + 1e-12) + 1e-300;

    BruteForceResult best;
    std::vector<std::int64_t> x(n);
    std::function<void(std::size_t, double)> rec = [&](std::size_t level, double used) {
        double c = y[level];
        for (std::size_t j = level + 1; j < n; ++j) c -= r(level, j) * static_cast<double>(x[j]);
        c /= r(level, level);
        const double slack = std::sqrt(std::max(0.0, radius2 - used)) / r(level, level);
        for (auto v = static_cast<std::int64_t>(std::ceil(c - slack)); v <= static_cast<std::int64_t>(std::floor(c + slack)); ++v) {
            x[level] = v;
            const double e = r(level, level) * (c - static_cast<double>(v));
            if (level == 0) {
                const double res = residual(r, y, x);
                if (res < best.residual) best = {x, res};
            } else {
                rec(level - 1, used + e * e);
            }
        }
    };
    rec(n - 1, 0.0);
    return best;
}

// Number of integer points with ||y_{i:n} - R_{i:n,i:n} x_{i:n}|| <= beta (0-based level i).
// The box is centred on the real solution; its half-width beta * ||R^{-1}||_F bounds |x - R^{-1} y|.
inline std::int64_t count_region(const ils::UpperTriangular& r, const std::vector<double>& y, double beta,
                                 std::size_t level) {
    const std::size_t n = r.size();
    const std::size_t m = n - level;
    auto at = [&](std::size_t a, std::size_t b) { return r(level + a, level + b); };
    // Columns of the inverse by back substitution.
    std::vector<std::vector<double>> inv(m, std::vector<double>(m, 0.0));
    double frob = 0;
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t a = m; a-- > 0;) {
            double t = a == c ? 1.0 : 0.0;
            for (std::size_t b = a + 1; b < m; ++b) t -= at(a, b) * inv[b][c];
            inv[a][c] = t / at(a, a);
            frob += inv[a][c] * inv[a][c];
        }
    std::vector<std::int64_t> center(m);
    for (std::size_t a = 0; a < m; ++a) {
        double s = 0;
        for (std::size_t b = 0; b < m; ++b) s += inv[a][b] * y[level + b];
        center[a] = static_cast<std::int64_t>(std::llround(s));
    }
    const auto half = static_cast<std::int64_t>(std::ceil(beta * std::sqrt(frob))) + 1;
    std::int64_t count = 0;
    for_each_in_box(center, half, [&](const std::vector<std::int64_t>& x) {
        double s = 0;
        for (std::size_t a = 0; a < m; ++a) {
            double t = y[level + a];
            for (std::size_t b = a; b < m; ++b) t -= at(a, b) * static_cast<double>(x[b]);
            s += t * t;
        }
        if (s <= beta * beta) ++count;
    });
    return count;
}

inline ils::UpperTriangular random_upper(std::size_t n, ils::RngStream& rng, double diag_lo = 0.2,
                                         double diag_hi = 3.0, double off = 1.0) {
    ils::DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = diag_lo + (diag_hi - diag_lo) * rng.uniform();
        for (std::size_t j = i + 1; j < n; ++j) m(i, j) = off * (2 * rng.uniform() - 1);
    }
    return ils::UpperTriangular(std::move(m));
}

inline double max_abs_diff(const ils::DenseMatrix& a, const ils::DenseMatrix& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

}  // namespace oracle
