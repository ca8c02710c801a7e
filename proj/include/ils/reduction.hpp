#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ils/linalg.hpp"

namespace ils {

/// Square integer matrix with determinant +-1.
///
/// Entries are int64; every update checks for overflow and throws
/// OverflowError instead of wrapping.
class UnimodularMatrix {
public:
    UnimodularMatrix() = default;
    explicit UnimodularMatrix(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    std::int64_t operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    /// column k -= zeta * column i
    void subtract_column_multiple(std::size_t k, std::size_t i, std::int64_t zeta);
    void swap_columns(std::size_t a, std::size_t b) noexcept;

    /// Exact determinant via fraction-free (Bareiss) elimination in 128-bit arithmetic.
    std::int64_t determinant() const;
    DenseMatrix to_dense() const;
    /// Apply to an integer vector: returns Z * z.
    std::vector<std::int64_t> apply(std::span<const std::int64_t> z) const;

    friend bool operator==(const UnimodularMatrix&, const UnimodularMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::int64_t> data_;
};

struct ReductionTrace {
    std::int64_t permutation_count = 0;
    /// IGTs that actually changed an entry (multiplier != 0).
    std::int64_t size_reduction_count = 0;
    /// Nonzero superdiagonal IGTs immediately followed by a permutation.
    std::int64_t superdiag_size_reductions_before_permutation = 0;
    /// Diagonal of R before any permutation and after each one (when requested).
    std::vector<std::vector<double>> diag_snapshots;
    /// Reflections in application order (when requested); replay on a
    /// right-hand side with apply_reflections.
    std::vector<Reflection> reflections;
};

struct ReducedBasis {
    UpperTriangular r_bar;
    UnimodularMatrix z;
    ReductionTrace trace;
    double delta = 1.0;
};

struct ReduceOptions {
    bool trace_diag = false;
    bool record_reflections = false;
};

inline constexpr double kDefaultDelta = 1.0;

/// Nearest integer with ties resolved toward the smaller magnitude.
double round_ties_toward_zero(double x) noexcept;

/// Integer Gauss transformation reducing r(i, k) against r(i, i), 0-based i < k.
/// Returns the multiplier used (0 means nothing changed).
std::int64_t integer_gauss_transform(UpperTriangular& r, std::size_t i, std::size_t k, UnimodularMatrix& z);

/// delta-LLL reduction following the classic column-sweeping loop:
/// size-reduce the superdiagonal, test Lovasz, swap and step back on failure,
/// otherwise finish size-reducing column k and advance.
ReducedBasis lll_reduce(const UpperTriangular& r, double delta = kDefaultDelta, ReduceOptions opts = {});

/// Same loop with every integer Gauss transformation skipped.
ReducedBasis lll_permute_only(const UpperTriangular& r, double delta = kDefaultDelta, ReduceOptions opts = {});

void apply_reflections(const ReductionTrace& trace, std::span<double> y);

/// Size-reduced check (|r_ik| <= r_ii/2) with relative slack on the boundary.
bool is_size_reduced(const UpperTriangular& r, double rel_tol = 1e-12);
/// Lovasz check (delta r_{k-1,k-1}^2 <= r_{k-1,k}^2 + r_kk^2) with relative slack.
bool satisfies_lovasz(const UpperTriangular& r, double delta, double rel_tol = 1e-12);

/// QR of A with reordered columns: A P = Q R, perm[j] is the original
/// column placed at position j.
struct OrderedQr {
    QrFactors qr;
    std::vector<std::size_t> perm;
};

/// Sorted QR: at each step pick the remaining column with the smallest
/// projected residual norm (ties -> lowest original index).
OrderedQr sqrd_order(const DenseMatrix& a);

/// V-BLAST ordering, decided last to first: position k receives the
/// remaining column whose distance to the span of the others is largest
/// (ties -> highest original index, so tied columns keep their order).
OrderedQr vblast_order(const DenseMatrix& a);

/// One-line JSON record {"permutations":p,"size_reductions":s,"delta":d}.
std::string trace_json(const ReducedBasis& rb);

}  // namespace ils
