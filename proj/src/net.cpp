#include "bknet/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bknet/parallel.hpp"

namespace bknet {

namespace {

constexpr Rect kUnitSquare{0.0, 0.0, 1.0, 1.0};

std::uint64_t floor_sqrt(double x) {
    if (!(x >= 0.0)) return 0;
    auto n = static_cast<std::uint64_t>(std::sqrt(x));
    while (static_cast<double>(n + 1) * static_cast<double>(n + 1) <= x) ++n;
    while (n > 0 && static_cast<double>(n) * static_cast<double>(n) > x) --n;
    return n;
}

Vec2 cell_point(const NetCell& cell, std::uint64_t u, std::uint64_t v) {
    const double h = cell.spacing();
    return {cell.rect.x0 + (static_cast<double>(u) + 0.5) * h,
            cell.rect.y0 + (static_cast<double>(v) + 0.5) * h};
}

/// Bucket grid for nearest-point queries over a fixed point set.
class BucketGrid {
public:
    BucketGrid(const std::vector<NetPoint>& pts, const Rect& bounds, double size)
        : pts_(pts), bounds_(bounds), size_(size) {
        nx_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(bounds.width() / size)));
        ny_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(bounds.height() / size)));
        start_.assign(static_cast<std::size_t>(nx_ * ny_ + 1), 0);
        std::vector<std::size_t> key(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            key[i] = bucket(pts[i].p);
            ++start_[key[i] + 1];
        }
        for (std::size_t b = 1; b < start_.size(); ++b) start_[b] += start_[b - 1];
        order_.resize(pts.size());
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < pts.size(); ++i) order_[fill[key[i]]++] = i;
    }

    std::int64_t ix(double x) const {
        return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((x - bounds_.x0) / size_)), 0, nx_ - 1);
    }
    std::int64_t iy(double y) const {
        return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((y - bounds_.y0) / size_)), 0, ny_ - 1);
    }
    std::size_t bucket(Vec2 p) const { return static_cast<std::size_t>(iy(p.y) * nx_ + ix(p.x)); }

    template <class Fn>
    void visit(std::int64_t bx, std::int64_t by, Fn&& fn) const {
        if (bx < 0 || by < 0 || bx >= nx_ || by >= ny_) return;
        const auto b = static_cast<std::size_t>(by * nx_ + bx);
        for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) fn(order_[k]);
    }

    /// Distance from q to the nearest stored point, searching outward ring by ring.
    double nearest(Vec2 q) const {
        const std::int64_t cx = ix(q.x);
        const std::int64_t cy = iy(q.y);
        double best = std::numeric_limits<double>::infinity();
        const std::int64_t max_ring = std::max(nx_, ny_);
        for (std::int64_t r = 0; r <= max_ring; ++r) {
            for (std::int64_t by = cy - r; by <= cy + r; ++by) {
                for (std::int64_t bx = cx - r; bx <= cx + r; ++bx) {
                    if (std::max(std::abs(bx - cx), std::abs(by - cy)) != r) continue;
                    visit(bx, by, [&](std::size_t i) { best = std::min(best, distance(pts_[i].p, q)); });
                }
            }
            // Anything in ring r+1 is at least r * size_ away.
            if (best <= static_cast<double>(r) * size_) break;
        }
        return best;
    }

private:
    const std::vector<NetPoint>& pts_;
    Rect bounds_;
    double size_;
    std::int64_t nx_ = 1;
    std::int64_t ny_ = 1;
    std::vector<std::size_t> start_;
    std::vector<std::size_t> order_;
};

Rect inflate(const Rect& r, double d) { return {r.x0 - d, r.y0 - d, r.x1 + d, r.y1 + d}; }

}  // namespace

NetPlan make_plan(const DensityField& density, std::uint64_t count, std::optional<std::uint64_t> k0) {
    if (density.domain() != kUnitSquare) throw ValidationError("make_plan: density must live on I^2");
    if (density.min_value() < 1.0) throw ValidationError("make_plan: density values must be >= 1");
    NetPlan plan{density, density.max_value() - 1.0, 0, {}};

    const double need = 2.0 * (1.0 + plan.c);
    if (k0) {
        plan.k0 = *k0;
    } else {
        while (std::ldexp(1.0, static_cast<int>(2 * (1 + plan.k0))) / 2.0 < need) ++plan.k0;
    }
    if (count + plan.k0 > 26) throw ValidationError("make_plan: schedule too long (K + k0 > 26)");

    std::uint64_t corner = 0;
    for (std::uint64_t k = 1; k <= count; ++k) {
        const std::uint64_t side = std::uint64_t{1} << (2 * (k + plan.k0));
        const std::uint64_t sub = std::uint64_t{1} << k;
        const auto c0 = static_cast<double>(corner);
        const auto c1 = static_cast<double>(corner + side);
        plan.schedule.push_back({{c0, c0, c1, c1}, side, sub});
        corner += side + 1;
    }
    validate_plan(plan);
    return plan;
}

void validate_plan(const NetPlan& plan) {
    if (plan.density.domain() != kUnitSquare) throw ValidationError("plan: density must live on I^2");
    const double need = 2.0 * (1.0 + plan.c);
    const ScheduledSquare* prev = nullptr;
    for (const ScheduledSquare& s : plan.schedule) {
        const Rect& r = s.square;
        if (r.x0 != std::floor(r.x0) || r.y0 != std::floor(r.y0) || r.x1 != std::floor(r.x1) ||
            r.y1 != std::floor(r.y1))
            throw ValidationError("plan: square vertices must be integers");
        if (r.width() != static_cast<double>(s.side) || r.height() != static_cast<double>(s.side))
            throw ValidationError("plan: square side does not match l_k");
        if (s.subdivisions < 1 || s.side % s.subdivisions != 0)
            throw ValidationError("plan: m_k must divide l_k");
        if (static_cast<double>(s.side / s.subdivisions) < need)
            throw ValidationError("plan: l_k/m_k must be at least 2(1+c)");
        if (prev) {
            if (s.side <= prev->side) throw ValidationError("plan: l_k must increase");
            if (s.subdivisions < prev->subdivisions) throw ValidationError("plan: m_k must not decrease");
            if (static_cast<double>(s.subdivisions) / static_cast<double>(s.side) >=
                static_cast<double>(prev->subdivisions) / static_cast<double>(prev->side))
                throw ValidationError("plan: m_k/l_k must decrease");
        }
        for (const ScheduledSquare& t : plan.schedule) {
            if (&t != &s && t.square.overlaps(s.square))
                throw ValidationError("plan: squares must be disjoint");
        }
        prev = &s;
    }
}

Net::Net(NetPlan plan, std::vector<NetSquare> squares)
    : plan_(std::move(plan)), squares_(std::move(squares)) {
    for (const NetSquare& sq : squares_)
        for (const NetCell& cell : sq.cells) max_spacing_ = std::max(max_spacing_, cell.spacing());
}

bool Net::in_squares(Vec2 center) const {
    for (const NetSquare& sq : squares_) {
        const Rect& r = sq.plan.square;
        if (center.x > r.x0 && center.x < r.x1 && center.y > r.y0 && center.y < r.y1) return true;
    }
    return false;
}

std::vector<NetPoint> Net::window_points(const Rect& window) const {
    require_valid(window, "window");
    std::vector<NetPoint> out;
    for (double y = std::floor(window.y0 - 0.5) + 0.5; y <= window.y1; y += 1.0) {
        if (y < window.y0) continue;
        for (double x = std::floor(window.x0 - 0.5) + 0.5; x <= window.x1; x += 1.0) {
            if (x < window.x0) continue;
            if (!in_squares({x, y})) out.push_back({{x, y}, 0});
        }
    }
    for (std::size_t k = 0; k < squares_.size(); ++k) {
        const NetSquare& sq = squares_[k];
        const Rect& s = sq.plan.square;
        if (s.x1 < window.x0 || s.x0 > window.x1 || s.y1 < window.y0 || s.y0 > window.y1) continue;
        for (const NetCell& cell : sq.cells) {
            const Rect& r = cell.rect;
            if (r.x1 < window.x0 || r.x0 > window.x1 || r.y1 < window.y0 || r.y0 > window.y1) continue;
            const double h = cell.spacing();
            auto lo = [&](double w, double o) {
                return static_cast<std::uint64_t>(std::max(0.0, std::floor((w - o) / h - 0.5)));
            };
            const std::uint64_t u0 = lo(window.x0, r.x0);
            const std::uint64_t v0 = lo(window.y0, r.y0);
            for (std::uint64_t v = v0; v < cell.n; ++v) {
                const Vec2 probe = cell_point(cell, 0, v);
                if (probe.y > window.y1) break;
                if (probe.y < window.y0) continue;
                for (std::uint64_t u = u0; u < cell.n; ++u) {
                    const Vec2 p = cell_point(cell, u, v);
                    if (p.x > window.x1) break;
                    if (p.x >= window.x0) out.push_back({p, static_cast<std::uint32_t>(k + 1)});
                }
            }
        }
    }
    return out;
}

std::vector<Vec2> Net::square_points(std::size_t k) const {
    const NetSquare& sq = squares_.at(k - 1);
    std::vector<Vec2> out;
    for (const NetCell& cell : sq.cells)
        for (std::uint64_t v = 0; v < cell.n; ++v)
            for (std::uint64_t u = 0; u < cell.n; ++u) out.push_back(cell_point(cell, u, v));
    return out;
}

std::uint64_t Net::square_point_count(std::size_t k) const {
    std::uint64_t total = 0;
    for (const NetCell& cell : squares_.at(k - 1).cells) total += cell.n * cell.n;
    return total;
}

Net build_net(const NetPlan& plan) {
    validate_plan(plan);
    std::vector<NetSquare> squares(plan.schedule.size());
    parallel_for(plan.schedule.size(), [&](std::size_t idx) {
        const ScheduledSquare& s = plan.schedule[idx];
        const Similarity phi{static_cast<double>(s.side), {s.square.x0, s.square.y0}};
        const DensityField rho_k = reciprocal_transplant(plan.density, phi);
        const double cell_side = static_cast<double>(s.side / s.subdivisions);
        NetSquare out{s, {}};
        out.cells.reserve(s.subdivisions * s.subdivisions);
        for (std::uint64_t b = 0; b < s.subdivisions; ++b) {
            for (std::uint64_t a = 0; a < s.subdivisions; ++a) {
                const Rect t{s.square.x0 + static_cast<double>(a) * cell_side,
                             s.square.y0 + static_cast<double>(b) * cell_side,
                             s.square.x0 + static_cast<double>(a + 1) * cell_side,
                             s.square.y0 + static_cast<double>(b + 1) * cell_side};
                const double target = rho_k.integrate(t);
                const std::uint64_t n = floor_sqrt(target);
                if (n == 0) throw ValidationError("build_net: a cell received no points (n_ki = 0)");
                out.cells.push_back({t, n, target});
            }
        }
        squares[idx] = std::move(out);
    });
    return Net(plan, std::move(squares));
}

double check_separation(const Net& net, const Rect& window) {
    require_valid(window, "check_separation: window");
    const double reach = 2.0 * net.max_spacing();
    const Rect outer = inflate(window, reach);
    const std::vector<NetPoint> pts = net.window_points(outer);
    std::size_t inside = 0;
    for (const NetPoint& p : pts) inside += window.contains(p.p) ? 1 : 0;
    if (inside < 2) throw ValidationError("check_separation: window holds fewer than 2 points");

    const BucketGrid grid(pts, outer, reach);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!window.contains(pts[i].p)) continue;
        const std::int64_t bx = grid.ix(pts[i].p.x);
        const std::int64_t by = grid.iy(pts[i].p.y);
        for (std::int64_t dy = -1; dy <= 1; ++dy)
            for (std::int64_t dx = -1; dx <= 1; ++dx)
                grid.visit(bx + dx, by + dy, [&](std::size_t j) {
                    if (j != i) best = std::min(best, distance(pts[i].p, pts[j].p));
                });
    }
    if (best >= reach) {
        // Buckets only certify pairs closer than `reach`; fall back to a full scan.
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!window.contains(pts[i].p)) continue;
            for (std::size_t j = 0; j < pts.size(); ++j)
                if (j != i) best = std::min(best, distance(pts[i].p, pts[j].p));
        }
    }
    return best;
}

double check_covering(const Net& net, const Rect& window, double step) {
    require_valid(window, "check_covering: window");
    if (!(step > 0.0) || step > 1.0 / 64.0)
        throw ValidationError("check_covering: sample step must lie in (0, 1/64]");
    const double reach = 2.0 * net.max_spacing();
    const Rect outer = inflate(window, reach);
    const std::vector<NetPoint> pts = net.window_points(outer);
    if (pts.empty()) throw ValidationError("check_covering: no net points near the window");

    const BucketGrid grid(pts, outer, net.max_spacing());
    const auto cols = static_cast<std::size_t>(std::floor(window.width() / step)) + 1;
    const auto rows = static_cast<std::size_t>(std::floor(window.height() / step)) + 1;
    std::vector<double> row_max(rows, 0.0);
    parallel_for(rows, [&](std::size_t b) {
        const double y = std::min(window.y0 + static_cast<double>(b) * step, window.y1);
        double worst = 0.0;
        for (std::size_t a = 0; a < cols; ++a) {
            const double x = std::min(window.x0 + static_cast<double>(a) * step, window.x1);
            worst = std::max(worst, grid.nearest({x, y}));
        }
        row_max[b] = worst;
    });
    return *std::max_element(row_max.begin(), row_max.end());
}

double CellMeasure::bound() const { return 2.0 * std::sqrt(target) + 1.0; }

double CellMeasure::relative_bound() const { return 2.0 / std::sqrt(target) + 1.0 / target; }

std::vector<CellMeasure> measure_report(const Net& net, std::size_t k) {
    if (k < 1 || k > net.squares().size()) throw ValidationError("measure_report: k outside the schedule");
    const NetSquare& sq = net.squares()[k - 1];
    std::vector<CellMeasure> out;
    out.reserve(sq.cells.size());
    for (const NetCell& cell : sq.cells) {
        std::uint64_t count = 0;
        for (std::uint64_t v = 0; v < cell.n; ++v)
            for (std::uint64_t u = 0; u < cell.n; ++u)
                count += contains_half_open(cell.rect, cell_point(cell, u, v), sq.plan.square) ? 1 : 0;
        out.push_back({cell.rect, count, cell.target, std::fabs(static_cast<double>(count) - cell.target)});
    }
    return out;
}

}  // namespace bknet
