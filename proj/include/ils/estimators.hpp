#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ils/linalg.hpp"

namespace ils {

/// min over integer x of ||y_tilde - R x||^2.
struct IlsInstance {
    UpperTriangular r;
    std::vector<double> y_tilde;
    std::optional<double> sigma;  ///< noise level, only used by analytics

    IlsInstance(UpperTriangular r, std::vector<double> y_tilde, std::optional<double> sigma = std::nullopt);
    std::size_t size() const noexcept { return r.size(); }
};

using IntVector = std::vector<std::int64_t>;

/// ||y - R x||_2
double residual_norm(const IlsInstance& inst, std::span<const std::int64_t> x);

/// Nearest-plane estimate: components are fixed from the last to the first,
/// each rounded to the nearest integer (ties toward smaller magnitude).
IntVector babai_point(const IlsInstance& inst);

struct SphereResult {
    bool found = false;
    IntVector solution;
    double residual_norm = 0.0;
    std::int64_t nodes_total = 0;
    /// nodes_per_level[i] counts partial vectors (x_i..x_{n-1}) that passed the radius test.
    std::vector<std::int64_t> nodes_per_level;
    /// Search radius at start, then after every improvement.
    std::vector<double> radius_history;
    /// First complete integer vector that passed the radius test.
    IntVector first_leaf;
};

struct SphereOptions {
    std::optional<double> initial_radius;
    std::int64_t node_budget = 2'000'000'000;
};

/// Schnorr-Euchner depth-first search with radius shrinking. Without an
/// initial radius the search starts at the Babai residual times (1 + 1e-9).
SphereResult sphere_decode(const IlsInstance& inst, SphereOptions opts = {});

/// Fixed-radius enumeration: E_i for every level i (0-based), the number of
/// integer tails (x_i..x_{n-1}) with ||y_{i:} - R_{i:,i:} x_{i:}|| <= beta.
std::vector<std::int64_t> count_points_per_level(const IlsInstance& inst, double beta,
                                                 std::int64_t budget = 50'000'000);

std::int64_t count_points_in_region(const IlsInstance& inst, double beta, std::size_t level,
                                    std::int64_t budget = 50'000'000);

}  // namespace ils
