#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bknet/certificate.hpp"
#include "bknet/density.hpp"

namespace bknet {

namespace {

constexpr Rect kUnitSquare{0.0, 0.0, 1.0, 1.0};
constexpr Segment kBaseSegment{{0.0, 0.0}, {1.0, 0.0}};
// Grid coordinates live in [0,1]; below this step they stop being exact.
constexpr double kMinGridStep = 0x1p-52;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        throw std::runtime_error(std::string(what) + ": count overflows 64 bits");
    return a * b;
}

/// Horizontal edge (column j, row s) of the marked grid of `p`.
Segment patch_edge(const StripPatch& p, std::uint64_t m, std::uint64_t j, std::uint64_t s) {
    const double step = p.rect.width() / static_cast<double>(p.columns * m);
    const double y = p.rect.y0 + static_cast<double>(s) * step;
    return {{p.rect.x0 + static_cast<double>(j) * step, y},
            {p.rect.x0 + static_cast<double>(j + 1) * step, y}};
}

}  // namespace

double checkerboard_epsilon(double lip, double c, std::uint64_t n) {
    const double nd = static_cast<double>(n);
    return c / (8.0 * nd * nd * lip * lip);
}

void Hierarchy::for_each_segment(std::size_t level,
                                 const std::function<void(const Segment&)>& fn) const {
    const HierarchyLevel& lv = levels_.at(level);
    if (level == 0) {
        fn(kBaseSegment);
        return;
    }
    const std::uint64_t m = options_.M;
    for (std::size_t idx = lv.patch_begin; idx < lv.patch_end; ++idx) {
        const StripPatch& p = field_.patches()[idx];
        for (std::uint64_t s = 0; s <= m; ++s)
            for (std::uint64_t j = 0; j < p.columns * m; ++j) fn(patch_edge(p, m, j, s));
    }
}

std::vector<Segment> Hierarchy::segments(std::size_t level, std::size_t cap) const {
    if (segment_count(level) > cap)
        throw std::runtime_error("Hierarchy::segments: level has too many segments to list");
    std::vector<Segment> out;
    out.reserve(segment_count(level));
    for_each_segment(level, [&](const Segment& s) { out.push_back(s); });
    return out;
}

std::vector<Rect> Hierarchy::neighborhoods(std::size_t level) const {
    const HierarchyLevel& lv = levels_.at(level);
    std::vector<Rect> out;
    for (std::size_t idx = lv.patch_begin; idx < lv.patch_end; ++idx)
        out.push_back(field_.patches()[idx].rect);
    return out;
}

Hierarchy build_hierarchy(const HierarchyOptions& o) {
    if (!(o.L > 1.0) || !std::isfinite(o.L)) throw ValidationError("build_hierarchy: L must be > 1");
    if (!(o.c > 0.0) || !std::isfinite(o.c)) throw ValidationError("build_hierarchy: c must be > 0");
    if (o.N < 2) throw ValidationError("build_hierarchy: N must be >= 2");
    if (o.M < 1) throw ValidationError("build_hierarchy: M must be >= 1");

    const std::uint64_t m = o.M;
    std::vector<StripPatch> patches;
    std::vector<HierarchyLevel> levels;
    levels.push_back({});  // eps_0 = 1, the single base segment

    for (std::uint64_t i = 1; i <= o.depth; ++i) {
        const HierarchyLevel prev = levels.back();
        const double ratio = (i == 1) ? 1.0
                                      : prev.scale / static_cast<double>(prev.columns * m);
        const std::uint64_t count = prev.segment_count;
        if (count > o.max_patches - patches.size())
            throw std::runtime_error("build_hierarchy: level " + std::to_string(i) + " needs " +
                                     std::to_string(count) + " patches, over the limit");

        // Smallest N = o.N * 2^j whose neighborhoods fit half the previous budget.
        std::uint64_t n = o.N;
        const double per_patch_area = ratio * ratio;
        while (static_cast<double>(count) * per_patch_area / static_cast<double>(n) >=
               prev.epsilon / 2.0) {
            if (n > (std::uint64_t{1} << 52)) throw std::runtime_error("build_hierarchy: N overflows");
            n *= 2;
        }
        const double step = ratio / (static_cast<double>(n) * static_cast<double>(m));
        if (!(step >= kMinGridStep))
            throw std::runtime_error("build_hierarchy: level " + std::to_string(i) +
                                     " grid step underflows double precision");

        HierarchyLevel level;
        level.columns = n;
        level.scale = ratio;
        level.segment_count =
            checked_mul(count, checked_mul(checked_mul(n, m, "build_hierarchy"), m + 1, "build_hierarchy"),
                        "build_hierarchy");
        level.patch_begin = patches.size();
        level.epsilon = std::numeric_limits<double>::infinity();

        const double base_eps = checkerboard_epsilon(o.L, o.c, n);
        const double height = ratio / static_cast<double>(n);
        auto place = [&](const Segment& seg, std::int64_t parent, bool below) {
            const double y = seg.a.y;
            const Rect u = below ? Rect{seg.a.x, y - height, seg.b.x, y}
                                 : Rect{seg.a.x, y, seg.b.x, y + height};
            const EmbeddedPatch e = embed_in_neighborhood(seg, u, n, m, o.c, base_eps);
            StripPatch sp;
            sp.rect = e.rect;
            sp.columns = n;
            sp.even_value = 1.0;
            sp.odd_value = 1.0 + o.c;
            sp.parent = parent;
            patches.push_back(sp);
            level.neighborhood_area += u.area();
            level.epsilon = std::min(level.epsilon, e.epsilon);
        };

        if (i == 1) {
            place(kBaseSegment, -1, false);
        } else {
            for (std::size_t idx = prev.patch_begin; idx < prev.patch_end; ++idx) {
                const StripPatch parent = patches[idx];
                for (std::uint64_t s = 0; s <= m; ++s)
                    for (std::uint64_t j = 0; j < parent.columns * m; ++j)
                        place(patch_edge(parent, m, j, s), static_cast<std::int64_t>(idx), s == m);
            }
        }
        level.patch_end = patches.size();
        levels.push_back(level);
    }

    DensityField field(kUnitSquare, 1.0, {}, std::move(patches));
    return Hierarchy(std::move(field), std::move(levels), o);
}

Hierarchy build_hierarchy(double lip, double c, std::uint64_t depth) {
    const CertificateConstants k = schedule_constants(lip, c);
    HierarchyOptions o;
    o.L = lip;
    o.c = c;
    o.N = k.N;
    o.M = k.M;
    o.depth = depth;
    return build_hierarchy(o);
}

std::vector<LimitSquare> default_limit_squares(std::uint64_t count) {
    std::vector<LimitSquare> out;
    for (std::uint64_t k = 1; k <= count; ++k) {
        const double lo = std::ldexp(1.0, -static_cast<int>(k));
        const double side = std::ldexp(1.0, -static_cast<int>(k) - 1);
        out.push_back({{lo, lo, lo + side, lo + side}, k});
    }
    return out;
}

DensityField assemble_limit_density(double c, const std::vector<LimitSquare>& squares,
                                    const LimitOptions& options) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("assemble_limit_density: c must be > 0");
    for (std::size_t a = 0; a < squares.size(); ++a) {
        const Rect& s = squares[a].square;
        require_valid(s, "assemble_limit_density: square");
        if (s.width() != s.height()) throw ValidationError("assemble_limit_density: not a square");
        if (!kUnitSquare.contains(s)) throw ValidationError("assemble_limit_density: square outside I^2");
        if (squares[a].k < 1) throw ValidationError("assemble_limit_density: k must be >= 1");
        for (std::size_t b = 0; b < a; ++b) {
            if (s.overlaps(squares[b].square))
                throw ValidationError("assemble_limit_density: overlapping squares");
        }
    }

    std::vector<StripPatch> all;
    for (const LimitSquare& sq : squares) {
        HierarchyOptions h;
        h.L = static_cast<double>(sq.k) + 1.0;
        h.c = std::min(c, 1.0 / static_cast<double>(sq.k));
        h.N = options.N;
        h.M = options.M;
        h.depth = std::min(sq.k, options.max_depth);
        const Hierarchy hier = build_hierarchy(h);
        const DensityField moved =
            transplant(hier.field(), Similarity::between(kUnitSquare, sq.square));
        const auto offset = static_cast<std::int64_t>(all.size());
        for (StripPatch p : moved.patches()) {
            if (p.parent >= 0) p.parent += offset;
            all.push_back(p);
        }
    }
    return DensityField(kUnitSquare, 1.0, {}, std::move(all));
}

}  // namespace bknet
