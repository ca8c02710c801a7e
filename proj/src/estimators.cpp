#include "ils/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ils/error.hpp"
#include "ils/reduction.hpp"

namespace ils {

namespace {

std::int64_t to_int(double v) {
    if (!std::isfinite(v) || std::abs(v) > 9.0e18) throw OverflowError("integer coordinate does not fit int64");
    return static_cast<std::int64_t>(v);
}

// Shared state of the depth-first walk over levels n-1 .. 0.
struct Enumerator {
    const UpperTriangular& r;
    std::span<const double> y;
    std::size_t n;
    std::vector<double> center;
    std::vector<double> x;
    std::vector<double> step;
    std::vector<double> partial;  // partial[i] = squared distance of levels > i

    Enumerator(const IlsInstance& inst)
        : r(inst.r), y(inst.y_tilde), n(inst.size()), center(n), x(n), step(n), partial(n + 1, 0.0) {}

    void descend_to(std::size_t level) {
        double s = y[level];
        for (std::size_t j = level + 1; j < n; ++j) s -= r(level, j) * x[j];
        center[level] = s / r(level, level);
        x[level] = round_ties_toward_zero(center[level]);
        step[level] = center[level] >= x[level] ? 1.0 : -1.0;
    }

    // Zig-zag: x, x+1, x-1, x+2, ... (direction set by the side of the center).
    void next_sibling(std::size_t level) {
        x[level] += step[level];
        step[level] = -step[level] + (step[level] > 0.0 ? -1.0 : 1.0);
    }

    double distance_at(std::size_t level) const {
        const double d = r(level, level) * (x[level] - center[level]);
        return partial[level + 1] + d * d;
    }
};

}  // namespace

IlsInstance::IlsInstance(UpperTriangular r_, std::vector<double> y_, std::optional<double> sigma_)
    : r(std::move(r_)), y_tilde(std::move(y_)), sigma(sigma_) {
    if (y_tilde.size() != r.size()) throw DomainError("right-hand side length does not match R");
    for (double v : y_tilde)
        if (!std::isfinite(v)) throw DomainError("right-hand side entries must be finite");
    if (sigma && !(*sigma > 0.0)) throw DomainError("sigma must be positive");
}

double residual_norm(const IlsInstance& inst, std::span<const std::int64_t> x) {
    const std::size_t n = inst.size();
    if (x.size() != n) throw DomainError("integer vector length does not match R");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double ri = inst.y_tilde[i];
        for (std::size_t j = i; j < n; ++j) ri -= inst.r(i, j) * static_cast<double>(x[j]);
        s += ri * ri;
    }
    return std::sqrt(s);
}

IntVector babai_point(const IlsInstance& inst) {
    const std::size_t n = inst.size();
    IntVector xb(n);
    std::vector<double> xd(n);
    for (std::size_t i = n; i-- > 0;) {
        double c = inst.y_tilde[i];
        for (std::size_t j = i + 1; j < n; ++j) c -= inst.r(i, j) * xd[j];
        c /= inst.r(i, i);
        xd[i] = round_ties_toward_zero(c);
        xb[i] = to_int(xd[i]);
    }
    return xb;
}

SphereResult sphere_decode(const IlsInstance& inst, SphereOptions opts) {
    const std::size_t n = inst.size();
    double radius;
    if (opts.initial_radius) {
        if (!(*opts.initial_radius > 0.0)) throw DomainError("initial radius must be positive");
        radius = *opts.initial_radius;
    } else {
        const IntVector xb = babai_point(inst);
        radius = residual_norm(inst, xb) * (1.0 + 1e-9);
        // Exact lattice points give a (near) zero residual; keep the sphere non-degenerate.
        radius = std::max(radius, 1e-9 * std::max(1.0, inst.r.dense().max_abs()));
    }

    SphereResult res;
    res.nodes_per_level.assign(n, 0);
    res.radius_history.push_back(radius);
    double radius2 = radius * radius;
    double best2 = std::numeric_limits<double>::infinity();
    std::vector<double> best;

    Enumerator e(inst);
    std::size_t level = n - 1;
    e.descend_to(level);
    for (;;) {
        const double d2 = e.distance_at(level);
        if (d2 <= radius2) {
            ++res.nodes_per_level[level];
            if (++res.nodes_total > opts.node_budget) throw BudgetExceededError("sphere decoder node budget exceeded");
            if (level == 0) {
                if (res.first_leaf.empty())
                    for (double v : e.x) res.first_leaf.push_back(to_int(v));
                if (d2 < best2) {
                    best2 = d2;
                    best = e.x;
                    radius2 = d2;
                    res.radius_history.push_back(std::sqrt(d2));
                }
                e.next_sibling(0);
            } else {
                e.partial[level] = d2;
                --level;
                e.descend_to(level);
            }
        } else {
            if (level == n - 1) break;
            ++level;
            e.next_sibling(level);
        }
    }

    if (!best.empty()) {
        res.found = true;
        for (double v : best) res.solution.push_back(to_int(v));
        res.residual_norm = residual_norm(inst, res.solution);
    }
    return res;
}

std::vector<std::int64_t> count_points_per_level(const IlsInstance& inst, double beta, std::int64_t budget) {
    if (!(beta > 0.0)) throw DomainError("search radius must be positive");
    const std::size_t n = inst.size();
    const double beta2 = beta * beta;
    std::vector<std::int64_t> counts(n, 0);
    std::int64_t visited = 0;

    Enumerator e(inst);
    std::size_t level = n - 1;
    e.descend_to(level);
    for (;;) {
        const double d2 = e.distance_at(level);
        if (d2 <= beta2) {
            ++counts[level];
            if (++visited > budget)
                throw BudgetExceededError("enumeration budget of " + std::to_string(budget) + " nodes exceeded");
            if (level == 0) {
                e.next_sibling(0);
            } else {
                e.partial[level] = d2;
                --level;
                e.descend_to(level);
            }
        } else {
            if (level == n - 1) break;
            ++level;
            e.next_sibling(level);
        }
    }
    return counts;
}

std::int64_t count_points_in_region(const IlsInstance& inst, double beta, std::size_t level, std::int64_t budget) {
    if (level >= inst.size()) throw DomainError("level index out of range");
    return count_points_per_level(inst, beta, budget)[level];
}

}  // namespace ils
