#pragma once

// Dynamic time warping: exact dynamic programming, exhaustive path
// enumeration for small inputs, and the multi-resolution FastDTW
// approximation (coarsen, solve, project, refine within a radius).
//
// Paths use 0-based index pairs: a valid path starts at (0, 0), ends at
// (N-1, M-1) and advances by (1,1), (1,0) or (0,1) at every step.

#include "fc/error.hpp"
#include "fc/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace fc {

enum class CostModel { AbsoluteDifference, SquaredDifference };

inline double local_cost(CostModel model, double a, double b) {
    const double d = a - b;
    return model == CostModel::AbsoluteDifference ? std::abs(d) : d * d;
}

struct IndexPair {
    std::size_t n = 0;
    std::size_t m = 0;

    bool operator==(const IndexPair&) const = default;
};

using WarpingPath = std::vector<IndexPair>;

struct DtwResult {
    double distance = 0.0;
    WarpingPath path;
    bool exact = true;
    /// Refinement radius; only meaningful for FastDTW results.
    std::size_t radius = 0;
};

/// Checks boundary, monotonicity and step-size conditions for an (n, m) path.
inline bool is_valid_path(const WarpingPath& path, std::size_t n, std::size_t m) {
    if (path.empty() || n == 0 || m == 0) return false;
    if (!(path.front() == IndexPair{0, 0}) || !(path.back() == IndexPair{n - 1, m - 1})) return false;
    for (std::size_t l = 1; l < path.size(); ++l) {
        const auto& p = path[l - 1];
        const auto& q = path[l];
        if (q.n < p.n || q.m < p.m) return false;
        const auto dn = q.n - p.n;
        const auto dm = q.m - p.m;
        if (dn > 1 || dm > 1 || (dn == 0 && dm == 0)) return false;
    }
    return true;
}

inline double path_cost(std::span<const double> a, std::span<const double> b, const WarpingPath& path,
                        CostModel cost) {
    double total = 0.0;
    for (const auto& p : path) total += local_cost(cost, a[p.n], b[p.m]);
    return total;
}

namespace detail {

/// Inclusive column range [lo, hi] allowed in each row.
struct Window {
    std::vector<std::size_t> lo;
    std::vector<std::size_t> hi;

    static Window full(std::size_t n, std::size_t m) {
        return {std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, m - 1)};
    }
};

inline void require_non_empty(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::EmptySegment, "DTW needs two non-empty sequences");
}

/// Dynamic program restricted to `window`. Ties on backtracking prefer the
/// diagonal predecessor, then (n-1, m), then (n, m-1).
inline DtwResult windowed_dtw(std::span<const double> a, std::span<const double> b, CostModel cost,
                              const Window& window) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> acc(n * m, inf);
    const auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };
    const auto get = [&](std::size_t i, std::size_t j) {
        return (j < window.lo[i] || j > window.hi[i]) ? inf : acc[i * m + j];
    };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = window.lo[i]; j <= window.hi[i]; ++j) {
            const double c = local_cost(cost, a[i], b[j]);
            if (i == 0 && j == 0) {
                at(i, j) = c;
                continue;
            }
            double best = inf;
            if (i > 0 && j > 0) best = get(i - 1, j - 1);
            if (i > 0) best = std::min(best, get(i - 1, j));
            if (j > 0) best = std::min(best, get(i, j - 1));
            at(i, j) = c + best;
        }
    }

    DtwResult r;
    r.distance = acc[n * m - 1];
    std::size_t i = n - 1;
    std::size_t j = m - 1;
    r.path.push_back({i, j});
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = get(i - 1, j - 1);
            const double up = get(i - 1, j);
            const double left = get(i, j - 1);
            if (diag <= up && diag <= left) {
                --i;
                --j;
            } else if (up <= left) {
                --i;
            } else {
                --j;
            }
        }
        r.path.push_back({i, j});
    }
    std::reverse(r.path.begin(), r.path.end());
    return r;
}

} // namespace detail

inline DtwResult dtw_exact(std::span<const double> a, std::span<const double> b,
                           CostModel cost = CostModel::AbsoluteDifference) {
    detail::require_non_empty(a, b);
    return detail::windowed_dtw(a, b, cost, detail::Window::full(a.size(), b.size()));
}

inline DtwResult dtw_exact(const Segment& a, const Segment& b, CostModel cost = CostModel::AbsoluteDifference) {
    return dtw_exact(std::span<const double>(a.values), std::span<const double>(b.values), cost);
}

inline constexpr std::size_t brute_force_cell_limit = 36;

/// Enumerates every valid warping path. Restricted to N * M <= 36.
inline DtwResult dtw_brute_force(std::span<const double> a, std::span<const double> b,
                                 CostModel cost = CostModel::AbsoluteDifference) {
    detail::require_non_empty(a, b);
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    if (n * m > brute_force_cell_limit) {
        throw Error(ErrorKind::TooLarge, "brute-force DTW limited to N*M <= 36, got " + std::to_string(n * m));
    }
    DtwResult best;
    best.distance = std::numeric_limits<double>::infinity();
    WarpingPath current;
    const auto walk = [&](auto&& self, std::size_t i, std::size_t j, double sum) -> void {
        current.push_back({i, j});
        sum += local_cost(cost, a[i], b[j]);
        if (i == n - 1 && j == m - 1) {
            if (sum < best.distance) {
                best.distance = sum;
                best.path = current;
            }
        } else {
            if (i + 1 < n && j + 1 < m) self(self, i + 1, j + 1, sum);
            if (i + 1 < n) self(self, i + 1, j, sum);
            if (j + 1 < m) self(self, i, j + 1, sum);
        }
        current.pop_back();
    };
    walk(walk, 0, 0, 0.0);
    return best;
}

inline DtwResult dtw_brute_force(const Segment& a, const Segment& b, CostModel cost = CostModel::AbsoluteDifference) {
    return dtw_brute_force(std::span<const double>(a.values), std::span<const double>(b.values), cost);
}

/// Halves resolution by averaging adjacent pairs; an odd trailing element is kept as-is.
inline std::vector<double> coarsen(std::span<const double> x) {
    std::vector<double> out;
    out.reserve((x.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < x.size(); i += 2) out.push_back((x[i] + x[i + 1]) / 2.0);
    if (x.size() % 2 == 1) out.push_back(x.back());
    return out;
}

namespace detail {

/// Projects a coarse path onto the finer grid and widens it by `radius` coarse cells.
inline Window project_window(const WarpingPath& coarse, std::size_t coarse_n, std::size_t coarse_m, std::size_t n,
                             std::size_t m, std::size_t radius) {
    std::vector<std::size_t> clo(coarse_n, coarse_m);
    std::vector<std::size_t> chi(coarse_n, 0);
    for (const auto& p : coarse) {
        const std::size_t i0 = p.n >= radius ? p.n - radius : 0;
        const std::size_t i1 = std::min(coarse_n - 1, p.n + radius);
        const std::size_t j0 = p.m >= radius ? p.m - radius : 0;
        const std::size_t j1 = std::min(coarse_m - 1, p.m + radius);
        for (std::size_t i = i0; i <= i1; ++i) {
            clo[i] = std::min(clo[i], j0);
            chi[i] = std::max(chi[i], j1);
        }
    }
    Window w{std::vector<std::size_t>(n), std::vector<std::size_t>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ci = i / 2;
        w.lo[i] = std::min(2 * clo[ci], m - 1);
        w.hi[i] = std::min(2 * chi[ci] + 1, m - 1);
    }
    return w;
}

inline DtwResult fast_dtw(std::span<const double> a, std::span<const double> b, CostModel cost, std::size_t radius) {
    const std::size_t min_size = radius + 2;
    if (a.size() < min_size || b.size() < min_size) {
        return windowed_dtw(a, b, cost, Window::full(a.size(), b.size()));
    }
    const auto ca = coarsen(a);
    const auto cb = coarsen(b);
    const auto coarse = fast_dtw(ca, cb, cost, radius);
    const auto window = project_window(coarse.path, ca.size(), cb.size(), a.size(), b.size(), radius);
    return windowed_dtw(a, b, cost, window);
}

} // namespace detail

inline DtwResult dtw_fast(std::span<const double> a, std::span<const double> b,
                          CostModel cost = CostModel::AbsoluteDifference, std::size_t radius = 1) {
    detail::require_non_empty(a, b);
    auto r = detail::fast_dtw(a, b, cost, radius);
    r.radius = radius;
    r.exact = false;
    return r;
}

inline DtwResult dtw_fast(const Segment& a, const Segment& b, CostModel cost = CostModel::AbsoluteDifference,
                          std::size_t radius = 1) {
    return dtw_fast(std::span<const double>(a.values), std::span<const double>(b.values), cost, radius);
}

} // namespace fc
