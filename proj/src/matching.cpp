#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "bknet/distortion.hpp"

namespace bknet {

namespace {

constexpr std::size_t kMaxExact = 8;

void check_sets(const std::vector<Vec2>& x, const std::vector<Vec2>& y) {
    if (x.size() != y.size()) throw ValidationError("distortion: |X| != |Y|");
    if (x.size() < 2) throw ValidationError("distortion: sets need at least two points");
    for (const auto* set : {&x, &y}) {
        for (std::size_t i = 0; i < set->size(); ++i) {
            const Vec2& p = (*set)[i];
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                throw ValidationError("distortion: points must be finite");
            for (std::size_t j = 0; j < i; ++j)
                if ((*set)[j] == p) throw ValidationError("distortion: repeated point");
        }
    }
}

void check_bijection(const std::vector<std::size_t>& b, std::size_t n) {
    if (b.size() != n) throw ValidationError("distortion: bijection has the wrong size");
    std::vector<bool> seen(n, false);
    for (std::size_t v : b) {
        if (v >= n || seen[v]) throw ValidationError("distortion: not a bijection");
        seen[v] = true;
    }
}

DistortionResult evaluate(const std::vector<Vec2>& x, const std::vector<Vec2>& y,
                          const std::vector<std::size_t>& b) {
    DistortionResult r;
    r.bijection = b;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = distance(x[i], x[j]);
            const double dy = distance(y[b[i]], y[b[j]]);
            r.lip = std::max(r.lip, dy / dx);
            r.lip_inv = std::max(r.lip_inv, dx / dy);
        }
    }
    // The product is >= 1 in exact arithmetic; rounding can land one ulp below.
    r.distortion = std::max(1.0, r.lip * r.lip_inv);
    return r;
}

std::vector<Vec2> normalized(const std::vector<Vec2>& s) {
    Vec2 mean{0.0, 0.0};
    for (const Vec2& p : s) mean = mean + p;
    mean = (1.0 / static_cast<double>(s.size())) * mean;
    double sq = 0.0;
    for (const Vec2& p : s) sq += std::pow(distance(p, mean), 2);
    const double rms = std::sqrt(sq / static_cast<double>(s.size()));
    std::vector<Vec2> out;
    out.reserve(s.size());
    for (const Vec2& p : s) out.push_back((1.0 / rms) * (p - mean));
    return out;
}

}  // namespace

DistortionResult bijection_distortion(const std::vector<Vec2>& x, const std::vector<Vec2>& y,
                                      const std::vector<std::size_t>& bijection) {
    check_sets(x, y);
    check_bijection(bijection, x.size());
    return evaluate(x, y, bijection);
}

DistortionResult pair_distortion(const std::vector<Vec2>& x, const std::vector<Vec2>& y) {
    check_sets(x, y);
    if (x.size() > kMaxExact) throw ValidationError("pair_distortion: exact search needs |X| <= 8");
    std::vector<std::size_t> perm(x.size());
    std::iota(perm.begin(), perm.end(), 0);
    DistortionResult best = evaluate(x, y, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
        DistortionResult r = evaluate(x, y, perm);
        if (r.distortion < best.distortion) best = std::move(r);
    }
    return best;
}

std::vector<std::size_t> nearest_neighbor_matching(const std::vector<Vec2>& x,
                                                   const std::vector<Vec2>& y,
                                                   const std::vector<std::size_t>& order) {
    check_sets(x, y);
    check_bijection(order, x.size());
    const std::vector<Vec2> nx = normalized(x);
    const std::vector<Vec2> ny = normalized(y);
    std::vector<std::size_t> out(x.size());
    std::vector<bool> used(y.size(), false);
    for (std::size_t i : order) {
        std::size_t pick = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < ny.size(); ++j) {
            if (used[j]) continue;
            const double d = distance(nx[i], ny[j]);
            if (d < best) {
                best = d;
                pick = j;
            }
        }
        used[pick] = true;
        out[i] = pick;
    }
    return out;
}

DistortionResult two_swap(const std::vector<Vec2>& x, const std::vector<Vec2>& y,
                          std::vector<std::size_t> start) {
    check_sets(x, y);
    check_bijection(start, x.size());
    DistortionResult cur = evaluate(x, y, start);
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i = 0; i < x.size() && !improved; ++i) {
            for (std::size_t j = i + 1; j < x.size() && !improved; ++j) {
                std::vector<std::size_t> b = cur.bijection;
                std::swap(b[i], b[j]);
                DistortionResult r = evaluate(x, y, b);
                if (r.distortion < cur.distortion) {
                    cur = std::move(r);
                    improved = true;
                }
            }
        }
    }
    return cur;
}

DistortionResult greedy_distortion(const std::vector<Vec2>& x, const std::vector<Vec2>& y,
                                   std::uint64_t restarts, std::uint64_t seed) {
    check_sets(x, y);
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    DistortionResult best = two_swap(x, y, nearest_neighbor_matching(x, y, order));
    std::mt19937_64 rng(seed);
    for (std::uint64_t r = 0; r < restarts; ++r) {
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[rng() % (i + 1)]);
        DistortionResult cand = two_swap(x, y, nearest_neighbor_matching(x, y, order));
        if (cand.distortion < best.distortion) best = std::move(cand);
    }
    return best;
}

}  // namespace bknet
