#include "ils/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "ils/error.hpp"

namespace ils {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("unimodular matrix entry overflowed int64");
    return out;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_sub_overflow(a, b, &out)) throw OverflowError("unimodular matrix entry overflowed int64");
    return out;
}

void check_delta(double delta) {
    if (!(delta > 0.25 && delta <= 1.0)) throw DomainError("delta must lie in (1/4, 1]");
}

// Generous cap; the loop always terminates in exact arithmetic.
constexpr std::int64_t kMaxIterations = 100'000'000;

template <bool SizeReduce>
ReducedBasis reduce_impl(const UpperTriangular& input, double delta, ReduceOptions opts) {
    check_delta(delta);
    const std::size_t n = input.size();
    ReducedBasis out{input, UnimodularMatrix(n), {}, delta};
    UpperTriangular& r = out.r_bar;
    ReductionTrace& trace = out.trace;
    if (opts.trace_diag) trace.diag_snapshots.push_back(r.diag());

    std::size_t k = 1;
    std::int64_t iterations = 0;
    while (k < n) {
        if (++iterations > kMaxIterations) throw Error("reduction exceeded its iteration cap");

        std::int64_t zeta = 0;
        if constexpr (SizeReduce) {
            zeta = integer_gauss_transform(r, k - 1, k, out.z);
            if (zeta != 0) ++trace.size_reduction_count;
        }

        const double a = r(k - 1, k - 1);
        const double b = r(k - 1, k);
        const double d = r(k, k);
        if (delta * a * a > b * b + d * d) {
            const Reflection g = permute_triangularize_in_place(r, k);
            out.z.swap_columns(k - 1, k);
            ++trace.permutation_count;
            if (zeta != 0) ++trace.superdiag_size_reductions_before_permutation;
            if (opts.trace_diag) trace.diag_snapshots.push_back(r.diag());
            if (opts.record_reflections) trace.reflections.push_back(g);
            if (k > 1) --k;
        } else {
            if constexpr (SizeReduce) {
                for (std::size_t i = k - 1; i-- > 0;)
                    if (integer_gauss_transform(r, i, k, out.z) != 0) ++trace.size_reduction_count;
            }
            ++k;
        }
    }
    return out;
}

}  // namespace

UnimodularMatrix::UnimodularMatrix(std::size_t n) : n_(n), data_(n * n, 0) {
    for (std::size_t i = 0; i < n; ++i) data_[i * n + i] = 1;
}

void UnimodularMatrix::subtract_column_multiple(std::size_t k, std::size_t i, std::int64_t zeta) {
    if (zeta == 0) return;
    for (std::size_t row = 0; row < n_; ++row) {
        auto& dst = data_[row * n_ + k];
        dst = checked_sub(dst, checked_mul(zeta, data_[row * n_ + i]));
    }
}

void UnimodularMatrix::swap_columns(std::size_t a, std::size_t b) noexcept {
    for (std::size_t row = 0; row < n_; ++row) std::swap(data_[row * n_ + a], data_[row * n_ + b]);
}

std::int64_t UnimodularMatrix::determinant() const {
    using Wide = __int128;
    const std::size_t n = n_;
    if (n == 0) return 1;
    std::vector<Wide> m(data_.begin(), data_.end());
    auto at = [&](std::size_t i, std::size_t j) -> Wide& { return m[i * n + j]; };
    auto mul = [](Wide x, Wide y) {
        Wide out;
        if (__builtin_mul_overflow(x, y, &out)) throw OverflowError("determinant elimination overflowed 128 bits");
        return out;
    };
    auto sub = [](Wide x, Wide y) {
        Wide out;
        if (__builtin_sub_overflow(x, y, &out)) throw OverflowError("determinant elimination overflowed 128 bits");
        return out;
    };

    int sign = 1;
    Wide prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (at(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && at(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                at(i, j) = sub(mul(at(i, j), at(k, k)), mul(at(i, k), at(k, j))) / prev;
            at(i, k) = 0;
        }
        prev = at(k, k);
    }
    const Wide det = sign * at(n - 1, n - 1);
    if (det > std::numeric_limits<std::int64_t>::max() || det < std::numeric_limits<std::int64_t>::min())
        throw OverflowError("determinant does not fit int64");
    return static_cast<std::int64_t>(det);
}

DenseMatrix UnimodularMatrix::to_dense() const {
    DenseMatrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) m(i, j) = static_cast<double>((*this)(i, j));
    return m;
}

std::vector<std::int64_t> UnimodularMatrix::apply(std::span<const std::int64_t> z) const {
    if (z.size() != n_) throw DomainError("vector length does not match the unimodular matrix");
    std::vector<std::int64_t> x(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
        std::int64_t s = 0;
        for (std::size_t j = 0; j < n_; ++j) {
            std::int64_t term = checked_mul((*this)(i, j), z[j]);
            if (__builtin_add_overflow(s, term, &s)) throw OverflowError("Z*z overflowed int64");
        }
        x[i] = s;
    }
    return x;
}

// ---------------------------------------------------------------------------

double round_ties_toward_zero(double x) noexcept {
    const double f = std::floor(x);
    const double frac = x - f;
    if (frac > 0.5) return f + 1.0;
    if (frac < 0.5) return f;
    return x > 0.0 ? f : f + 1.0;
}

std::int64_t integer_gauss_transform(UpperTriangular& r, std::size_t i, std::size_t k, UnimodularMatrix& z) {
    if (!(i < k) || k >= r.size()) throw DomainError("integer Gauss transform needs i < k < n");
    const double zeta = round_ties_toward_zero(r(i, k) / r(i, i));
    if (zeta == 0.0) return 0;
    if (!std::isfinite(zeta) || std::abs(zeta) > 9.0e18)
        throw OverflowError("integer Gauss multiplier does not fit int64");
    const auto izeta = static_cast<std::int64_t>(zeta);
    z.subtract_column_multiple(k, i, izeta);
    for (std::size_t j = 0; j <= i; ++j) r(j, k) -= zeta * r(j, i);
    return izeta;
}

ReducedBasis lll_reduce(const UpperTriangular& r, double delta, ReduceOptions opts) {
    return reduce_impl<true>(r, delta, opts);
}

ReducedBasis lll_permute_only(const UpperTriangular& r, double delta, ReduceOptions opts) {
    return reduce_impl<false>(r, delta, opts);
}

void apply_reflections(const ReductionTrace& trace, std::span<double> y) {
    for (const auto& g : trace.reflections) {
        if (g.k >= y.size()) throw DomainError("right-hand side is shorter than the reduced basis");
        g.apply(y);
    }
}

bool is_size_reduced(const UpperTriangular& r, double rel_tol) {
    for (std::size_t k = 0; k < r.size(); ++k)
        for (std::size_t i = 0; i < k; ++i)
            if (std::abs(r(i, k)) > 0.5 * r(i, i) * (1.0 + rel_tol) + 1e-12 * r(i, i)) return false;
    return true;
}

bool satisfies_lovasz(const UpperTriangular& r, double delta, double rel_tol) {
    for (std::size_t k = 1; k < r.size(); ++k) {
        const double lhs = delta * r(k - 1, k - 1) * r(k - 1, k - 1);
        const double rhs = r(k - 1, k) * r(k - 1, k) + r(k, k) * r(k, k);
        if (lhs > rhs * (1.0 + rel_tol)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

namespace {

DenseMatrix permuted_columns(const DenseMatrix& a, std::span<const std::size_t> perm) {
    DenseMatrix ap(a.rows(), perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) ap(i, j) = a(i, perm[j]);
    return ap;
}

void check_ordering_input(const DenseMatrix& a) {
    if (a.empty() || a.rows() < a.cols()) throw DomainError("ordering needs a non-empty matrix with rows >= cols");
}

}  // namespace

OrderedQr sqrd_order(const DenseMatrix& a) {
    check_ordering_input(a);
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const double floor = 1e-12 * a.max_abs();

    DenseMatrix q = a;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> norm2(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) norm2[j] += q(i, j) * q(i, j);

    // Modified Gram-Schmidt with greedy minimum-norm column choice.
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t best = step;
        for (std::size_t j = step + 1; j < n; ++j)
            if (norm2[j] < norm2[best] || (norm2[j] == norm2[best] && perm[j] < perm[best])) best = j;
        if (best != step) {
            q.swap_columns(step, best);
            std::swap(norm2[step], norm2[best]);
            std::swap(perm[step], perm[best]);
        }
        double nn = 0.0;
        for (std::size_t i = 0; i < m; ++i) nn += q(i, step) * q(i, step);
        const double rjj = std::sqrt(nn);
        if (rjj <= floor) throw RankDeficientError("matrix is numerically rank deficient");
        for (std::size_t i = 0; i < m; ++i) q(i, step) /= rjj;
        for (std::size_t j = step + 1; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < m; ++i) dot += q(i, step) * q(i, j);
            norm2[j] = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                q(i, j) -= dot * q(i, step);
                norm2[j] += q(i, j) * q(i, j);
            }
        }
    }
    // The ordering is what SQRD contributes; the factors come from Householder QR.
    return {qr_factorize(permuted_columns(a, perm)), std::move(perm)};
}

OrderedQr vblast_order(const DenseMatrix& a) {
    check_ordering_input(a);
    const std::size_t n = a.cols();
    std::vector<std::size_t> remaining(n);
    std::iota(remaining.begin(), remaining.end(), 0);
    std::vector<std::size_t> perm(n);

    for (std::size_t pos = n; pos-- > 0;) {
        if (remaining.size() == 1) {
            perm[pos] = remaining.front();
            break;
        }
        // distance of column t to span(others) = 1 / ||R^{-T} e_t|| for A_S = Q R.
        const UpperTriangular rs = qr_factorize(permuted_columns(a, remaining)).r;
        const std::size_t s = remaining.size();
        std::size_t chosen = 0;
        double best = -1.0;
        std::vector<double> w(s);
        for (std::size_t t = 0; t < s; ++t) {
            // Forward substitution on R^T w = e_t; w_i = 0 for i < t.
            std::fill(w.begin(), w.end(), 0.0);
            double norm2 = 0.0;
            for (std::size_t i = t; i < s; ++i) {
                double acc = (i == t) ? 1.0 : 0.0;
                for (std::size_t j = t; j < i; ++j) acc -= rs(j, i) * w[j];
                w[i] = acc / rs(i, i);
                norm2 += w[i] * w[i];
            }
            const double dist = 1.0 / std::sqrt(norm2);
            if (dist >= best) {
                best = dist;
                chosen = t;
            }
        }
        perm[pos] = remaining[chosen];
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(chosen));
    }
    return {qr_factorize(permuted_columns(a, perm)), std::move(perm)};
}

std::string trace_json(const ReducedBasis& rb) {
    nlohmann::ordered_json j;
    j["permutations"] = rb.trace.permutation_count;
    j["size_reductions"] = rb.trace.size_reduction_count;
    j["delta"] = rb.delta;
    return j.dump();
}

}  // namespace ils
