#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's evaluators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "bknet/geometry.hpp"

namespace oracle {

using bknet::Rect;
using bknet::Vec2;

/// rho_N by the parity of floor(N x).
inline double checkerboard_value(std::uint64_t n, double c, Vec2 p) {
    const auto col = static_cast<std::uint64_t>(std::floor(static_cast<double>(n) * p.x));
    const std::uint64_t j = std::min(col, n - 1);
    return (j % 2 == 0) ? 1.0 : 1.0 + c;
}

/// Column-by-column closed form of the checkerboard integral.
inline double checkerboard_integral(std::uint64_t n, double c, const Rect& r) {
    double total = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double a = static_cast<double>(i) / static_cast<double>(n);
        const double b = static_cast<double>(i + 1) / static_cast<double>(n);
        const double w = std::min(b, r.x1) - std::max(a, r.x0);
        if (w > 0.0) total += w * r.height() * ((i % 2 == 0) ? 1.0 : 1.0 + c);
    }
    return total;
}

inline double monte_carlo(const std::function<double(Vec2)>& f, const Rect& r, std::size_t samples,
                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(r.x0, r.x1);
    std::uniform_real_distribution<double> uy(r.y0, r.y1);
    double sum = 0.0;
    for (std::size_t s = 0; s < samples; ++s) sum += f({ux(rng), uy(rng)});
    return sum / static_cast<double>(samples) * r.area();
}

/// Minimum Lip * Lip_inv over all bijections, by recursive enumeration.
inline double brute_distortion(const std::vector<Vec2>& x, const std::vector<Vec2>& y) {
    const std::size_t n = x.size();
    std::vector<std::size_t> perm(n);
    std::vector<bool> used(n, false);
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t)> rec = [&](std::size_t depth) {
        if (depth == n) {
            double lip = 0.0, inv = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const double dx = std::hypot(x[i].x - x[j].x, x[i].y - x[j].y);
                    const double dy = std::hypot(y[perm[i]].x - y[perm[j]].x, y[perm[i]].y - y[perm[j]].y);
                    lip = std::max(lip, dy / dx);
                    inv = std::max(inv, dx / dy);
                }
            best = std::min(best, lip * inv);
            return;
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (used[v]) continue;
            used[v] = true;
            perm[depth] = v;
            rec(depth + 1);
            used[v] = false;
        }
    };
    rec(0);
    return best;
}

/// O(n^2) minimum over pairs with at least one point inside `window`.
inline double brute_separation(const std::vector<Vec2>& pts, const Rect& window) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!window.contains(pts[i])) continue;
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (i != j) best = std::min(best, std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y));
    }
    return best;
}

inline double brute_nearest(const std::vector<Vec2>& pts, Vec2 z) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& p : pts) best = std::min(best, std::hypot(p.x - z.x, p.y - z.y));
    return best;
}

inline std::uint64_t brute_floor_sqrt(double v) {
    std::uint64_t n = 0;
    while (static_cast<double>((n + 1) * (n + 1)) <= v) ++n;
    return n;
}

}  // namespace oracle
