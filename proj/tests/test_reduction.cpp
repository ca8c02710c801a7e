#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ils/analytics.hpp"
#include "ils/error.hpp"
#include "ils/generators.hpp"
#include "ils/reduction.hpp"
#include "oracles.hpp"

using namespace ils;

namespace {

DenseMatrix gram(const DenseMatrix& m) { return m.transposed() * m; }

double min_diag(const UpperTriangular& r) {
    const auto d = r.diag();
    return *std::min_element(d.begin(), d.end());
}

double zeta_hat(const UpperTriangular& r, double beta) { return complexity_estimate(r, beta).zeta_hat; }

}  // namespace

TEST_SUITE("reduction") {

TEST_CASE("rounding breaks ties toward the smaller magnitude") {
    CHECK(round_ties_toward_zero(1.5) == 1.0);
    CHECK(round_ties_toward_zero(-1.5) == -1.0);
    CHECK(round_ties_toward_zero(2.5) == 2.0);
    CHECK(round_ties_toward_zero(0.5) == 0.0);
    CHECK(round_ties_toward_zero(-0.5) == 0.0);
    CHECK(round_ties_toward_zero(1.50000001) == 2.0);
    CHECK(round_ties_toward_zero(-2.7) == -3.0);
    CHECK(round_ties_toward_zero(3.0) == 3.0);
}

TEST_CASE("integer Gauss transformations") {
    UpperTriangular r{{5, 4}, {0, 2}};
    UnimodularMatrix z(2);
    CHECK(integer_gauss_transform(r, 0, 1, z) == 1);
    CHECK(r(0, 1) == -1.0);
    CHECK(z(0, 1) == -1);

    UpperTriangular r2{{2, 3}, {0, 1}};
    UnimodularMatrix z2(2);
    CHECK(integer_gauss_transform(r2, 0, 1, z2) == 1);
    CHECK(r2(0, 1) == 1.0);

    UpperTriangular r3 = UpperTriangular::identity(2);
    UnimodularMatrix z3(2);
    CHECK(integer_gauss_transform(r3, 0, 1, z3) == 0);
    CHECK(r3 == UpperTriangular::identity(2));
    CHECK(z3 == UnimodularMatrix(2));
}

TEST_CASE("worked 2x2 example: LLL versus permutation only") {
    const UpperTriangular r{{5, 4}, {0, 2}};
    const auto lll = lll_reduce(r, 1.0, {.trace_diag = true});
    CHECK(lll.r_bar(0, 0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
    CHECK(lll.r_bar(1, 1) == doctest::Approx(2 * std::sqrt(5.0)).epsilon(1e-14));
    CHECK(lll.trace.permutation_count == 1);
    CHECK(lll.trace.size_reduction_count >= 1);
    CHECK(lll.trace.diag_snapshots.size() == 2);

    const auto perm = lll_permute_only(r, 1.0);
    CHECK(perm.r_bar(0, 0) == doctest::Approx(2 * std::sqrt(5.0)).epsilon(1e-14));
    CHECK(perm.r_bar(1, 1) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
    CHECK(perm.r_bar(0, 1) == doctest::Approx(2 * std::sqrt(5.0)).epsilon(1e-14));

    for (double sigma : {0.1, 0.5, 2.0})
        CHECK(success_probability(lll.r_bar, sigma) ==
              doctest::Approx(success_probability(perm.r_bar, sigma)).epsilon(1e-12));
    CHECK(trace_json(lll) == R"({"permutations":1,"size_reductions":2,"delta":1.0})");
}

TEST_CASE("already reduced input is left alone") {
    for (double delta : {0.3, 0.75, 1.0}) {
        const auto rb = lll_reduce(UpperTriangular::identity(4), delta);
        CHECK(rb.r_bar == UpperTriangular::identity(4));
        CHECK(rb.z == UnimodularMatrix(4));
        CHECK(rb.trace.permutation_count == 0);
    }
    CHECK(lll_permute_only(UpperTriangular::identity(3)).r_bar == UpperTriangular::identity(3));
}

TEST_CASE("delta outside (1/4, 1] is rejected") {
    const auto r = UpperTriangular::identity(2);
    CHECK_THROWS_AS(lll_reduce(r, 0.25), DomainError);
    CHECK_THROWS_AS(lll_reduce(r, 1.01), DomainError);
    CHECK_THROWS_AS(lll_permute_only(r, 0.1), DomainError);
}

TEST_CASE("Lovasz boundary equality does not permute") {
    const auto rb = lll_reduce(UpperTriangular::identity(2), 1.0);
    CHECK(rb.trace.permutation_count == 0);
    const UpperTriangular r{{13, 5}, {0, 12}};  // 169 == 25 + 144, already size reduced
    CHECK(lll_reduce(r, 1.0).trace.permutation_count == 0);
}

TEST_CASE("counterexample matrix with delta 0.9 swaps only the last pair") {
    const double eta = 0.95, theta = 0.1, d1 = 0.9;
    const UpperTriangular r{{1, 0, 0.5}, {0, std::sqrt(eta), theta}, {0, 0, d1}};
    const auto rb = lll_reduce(r, d1, {.trace_diag = true});
    CHECK(rb.trace.permutation_count == 1);
    const auto d = rb.r_bar.diag();
    CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(std::hypot(theta, d1)).epsilon(1e-14));
    CHECK(d[2] == doctest::Approx(std::sqrt(eta) * d1 / std::hypot(theta, d1)).epsilon(1e-14));

    const auto r2 = lll_reduce(r, 1.0);
    const auto d2 = r2.r_bar.diag();
    CHECK(d2[0] == doctest::Approx(std::sqrt(eta)).epsilon(1e-14));
    CHECK(d2[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d2[2] == doctest::Approx(d1).epsilon(1e-14));
}

TEST_CASE("reduced output properties on random inputs") {
    RngStream rng(2024);
    for (int t = 0; t < 600; ++t) {
        const std::size_t n = 2 + t % 9;
        const double delta = 0.26 + 0.74 * rng.uniform();
        const UpperTriangular r = oracle::random_upper(n, rng, 0.05, 4.0, 5.0);
        const auto rb = lll_reduce(r, delta, {.trace_diag = true, .record_reflections = true});

        CHECK(is_size_reduced(rb.r_bar));
        CHECK(satisfies_lovasz(rb.r_bar, delta));
        const auto det = rb.z.determinant();
        CHECK((det == 1 || det == -1));

        // (R Z)^T (R Z) == Rbar^T Rbar
        const DenseMatrix rz = r.dense() * rb.z.to_dense();
        const DenseMatrix g1 = gram(rz), g2 = gram(rb.r_bar.dense());
        CHECK(oracle::max_abs_diff(g1, g2) <= 1e-9 * std::max(1.0, g1.max_abs()));

        double p0 = 0, p1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            p0 += std::log(r(i, i));
            p1 += std::log(rb.r_bar(i, i));
        }
        CHECK(std::abs(p1 - p0) <= 1e-10 * std::max(1.0, std::abs(p0)));

        CHECK(rb.trace.permutation_count + 1 == static_cast<std::int64_t>(rb.trace.diag_snapshots.size()));
        CHECK(rb.trace.reflections.size() == static_cast<std::size_t>(rb.trace.permutation_count));

        // Each diagonal snapshot stays inside the running min/max envelope of the input.
        const auto d0 = r.diag();
        for (const auto& snap : rb.trace.diag_snapshots) {
            for (std::size_t i = 0; i < n; ++i) {
                const double lo = *std::min_element(d0.begin() + static_cast<std::ptrdiff_t>(i), d0.end());
                const double hi = *std::max_element(d0.begin(), d0.begin() + static_cast<std::ptrdiff_t>(i) + 1);
                CHECK(snap[i] >= lo * (1 - 1e-12));
                CHECK(snap[i] <= hi * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("success probability never decreases and the complexity estimate never increases") {
    RngStream rng(77);
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 2 + t % 8;
        const double delta = 0.26 + 0.74 * rng.uniform();
        const UpperTriangular r = oracle::random_upper(n, rng, 0.05, 3.0, 3.0);
        for (bool permute_only : {false, true}) {
            const auto rb = permute_only ? lll_permute_only(r, delta) : lll_reduce(r, delta);
            for (double sigma : {0.05, 0.3, 1.0}) {
                const double before = success_probability(r, sigma);
                const double after = success_probability(rb.r_bar, sigma);
                CHECK(after >= before - 1e-12);
            }
            for (double beta : {0.5, 2.0, 10.0})
                CHECK(zeta_hat(rb.r_bar, beta) <= zeta_hat(r, beta) * (1 + 1e-12));
        }
    }
}

TEST_CASE("single permutation steps: strict probability and complexity gains") {
    RngStream rng(9);
    int checked = 0;
    while (checked < 300) {
        const UpperTriangular r = oracle::random_upper(2, rng, 0.1, 3.0, 3.0);
        const double a = r(0, 0), b = r(0, 1), d = r(1, 1);
        if (!(a * a > b * b + d * d)) continue;
        ++checked;
        const auto bar = givens_permute_triangularize(r, 0 + 1).r;
        // phi(r11) phi(r22) strictly increases when the superdiagonal is nonzero.
        for (double sigma : {0.2, 0.7}) {
            const double before = oracle::phi(a, sigma) * oracle::phi(d, sigma);
            const double after = oracle::phi(bar(0, 0), sigma) * oracle::phi(bar(1, 1), sigma);
            CHECK(after >= before - 1e-15);
        }
        for (double beta : {0.5, 3.0}) CHECK(zeta_hat(bar, beta) < zeta_hat(r, beta));

        // Size reduction before the swap helps at least as much as swapping directly.
        if (std::abs(b) > a / 2) {
            UpperTriangular sr = r;
            UnimodularMatrix z(2);
            integer_gauss_transform(sr, 0, 1, z);
            if (sr(0, 0) * sr(0, 0) > sr(0, 1) * sr(0, 1) + sr(1, 1) * sr(1, 1)) {
                const auto hat = givens_permute_triangularize(sr, 1).r;
                for (double beta : {0.5, 3.0}) CHECK(zeta_hat(hat, beta) < zeta_hat(bar, beta));
                for (double sigma : {0.2, 0.7})
                    CHECK(oracle::phi(hat(0, 0), sigma) * oracle::phi(hat(1, 1), sigma) >=
                          oracle::phi(bar(0, 0), sigma) * oracle::phi(bar(1, 1), sigma) - 1e-15);
            }
        }
    }
}

TEST_CASE("two-dimensional delta monotonicity") {
    RngStream rng(31);
    for (int t = 0; t < 1000; ++t) {
        const UpperTriangular r = oracle::random_upper(2, rng, 0.1, 3.0, 4.0);
        double d1 = 0.26 + 0.74 * rng.uniform(), d2 = 0.26 + 0.74 * rng.uniform();
        if (d1 > d2) std::swap(d1, d2);
        const double sigma = 0.1 + rng.uniform();
        CHECK(success_probability(lll_reduce(r, d1).r_bar, sigma) <=
              success_probability(lll_reduce(r, d2).r_bar, sigma) + 1e-12);
    }
}

TEST_CASE("unimodular matrix arithmetic") {
    UnimodularMatrix z(3);
    z.subtract_column_multiple(2, 0, 5);
    z.swap_columns(0, 1);
    CHECK(z.determinant() == -1);
    const std::vector<std::int64_t> x{1, 2, 3};
    const auto y = z.apply(x);
    CHECK(y == std::vector<std::int64_t>{2 - 15, 1, 3});
    UnimodularMatrix big(2);
    big.subtract_column_multiple(1, 0, std::int64_t{1} << 62);
    CHECK_THROWS_AS(big.subtract_column_multiple(1, 0, (std::int64_t{1} << 62) + 1), OverflowError);
}

TEST_CASE("SQRD ordering") {
    const auto o = sqrd_order(DenseMatrix{{2, 0}, {0, 1}});
    CHECK(o.perm == std::vector<std::size_t>{1, 0});
    CHECK(o.qr.r(0, 0) == doctest::Approx(1.0));
    CHECK(o.qr.r(1, 1) == doctest::Approx(2.0));
    CHECK(sqrd_order(DenseMatrix::identity(4)).perm == std::vector<std::size_t>{0, 1, 2, 3});
    // Equal norms, orthogonal columns: lowest index first.
    CHECK(sqrd_order(DenseMatrix{{0, 3}, {3, 0}}).perm == std::vector<std::size_t>{0, 1});
}

TEST_CASE("SQRD can lower the success probability relative to plain QR") {
    RngStream root(0);
    bool found = false;
    for (std::uint64_t run = 0; run < 200 && !found; ++run) {
        RngStream rng = root.substream(run);
        const DenseMatrix a = generate_case1(20, rng);
        const double qr = success_probability(qr_factorize(a).r, 0.2);
        const double sq = success_probability(sqrd_order(a).qr.r, 0.2);
        found = sq < qr;
    }
    CHECK(found);
}

TEST_CASE("V-BLAST ordering") {
    const auto o = vblast_order(DenseMatrix{{2, 0}, {0, 1}});
    CHECK(o.qr.r(0, 0) == doctest::Approx(1.0));
    CHECK(o.qr.r(1, 1) == doctest::Approx(2.0));
    CHECK(vblast_order(DenseMatrix::identity(5)).perm == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("V-BLAST maximizes the smallest diagonal entry over all 4x4 orderings") {
    RngStream rng(404);
    for (int t = 0; t < 50; ++t) {
        const DenseMatrix a = random_gaussian_matrix(4, 4, rng);
        const double got = min_diag(vblast_order(a).qr.r);
        std::vector<std::size_t> p{0, 1, 2, 3};
        double best = 0;
        do {
            DenseMatrix ap(4, 4);
            for (std::size_t j = 0; j < 4; ++j)
                for (std::size_t i = 0; i < 4; ++i) ap(i, j) = a(i, p[j]);
            best = std::max(best, min_diag(qr_factorize(ap).r));
        } while (std::next_permutation(p.begin(), p.end()));
        CHECK(got >= best * (1 - 1e-12));
    }
}

TEST_CASE("ordered factors reassemble the permuted matrix") {
    RngStream rng(8);
    for (int t = 0; t < 50; ++t) {
        const DenseMatrix a = random_gaussian_matrix(7, 6, rng);
        for (const auto& o : {sqrd_order(a), vblast_order(a)}) {
            DenseMatrix ap(7, 6);
            for (std::size_t j = 0; j < 6; ++j)
                for (std::size_t i = 0; i < 7; ++i) ap(i, j) = a(i, o.perm[j]);
            CHECK(oracle::max_abs_diff(ap, o.qr.q1 * o.qr.r.dense()) <= 1e-10 * a.max_abs());
        }
    }
}

}  // TEST_SUITE
