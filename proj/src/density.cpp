#include "bknet/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bknet/certificate.hpp"

namespace bknet {

namespace {

constexpr std::uint64_t kMaxCheckerboardCells = std::uint64_t{1} << 24;

void require_value(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ValidationError(std::string(what) + ": density values must be positive and finite");
}

/// Sorted-sweep check that no two rectangles have overlapping interiors.
template <class RectOf>
void require_disjoint(std::size_t count, RectOf rect_of, const char* what) {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return rect_of(a).x0 < rect_of(b).x0; });
    for (std::size_t a = 0; a < order.size(); ++a) {
        const Rect& ra = rect_of(order[a]);
        for (std::size_t b = a + 1; b < order.size() && rect_of(order[b]).x0 < ra.x1; ++b) {
            if (ra.overlaps(rect_of(order[b])))
                throw ValidationError(std::string(what) + ": rectangles overlap");
        }
    }
}

/// `outer` minus interior-disjoint `holes`, as a list of rectangles.
std::vector<Rect> subtract(const Rect& outer, const std::vector<Rect>& holes) {
    if (holes.empty()) return {outer};
    std::vector<double> xs{outer.x0, outer.x1};
    std::vector<double> ys{outer.y0, outer.y1};
    for (const Rect& h : holes) {
        xs.push_back(std::clamp(h.x0, outer.x0, outer.x1));
        xs.push_back(std::clamp(h.x1, outer.x0, outer.x1));
        ys.push_back(std::clamp(h.y0, outer.y0, outer.y1));
        ys.push_back(std::clamp(h.y1, outer.y0, outer.y1));
    }
    auto unique_sorted = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    unique_sorted(xs);
    unique_sorted(ys);

    std::vector<Rect> out;
    for (std::size_t b = 0; b + 1 < ys.size(); ++b) {
        const double cy = 0.5 * (ys[b] + ys[b + 1]);
        std::size_t run = xs.size();
        for (std::size_t a = 0; a + 1 < xs.size(); ++a) {
            const Vec2 c{0.5 * (xs[a] + xs[a + 1]), cy};
            const bool covered = std::any_of(holes.begin(), holes.end(), [&](const Rect& h) {
                return c.x > h.x0 && c.x < h.x1 && c.y > h.y0 && c.y < h.y1;
            });
            if (!covered && run == xs.size()) run = a;
            if (covered && run != xs.size()) {
                out.push_back({xs[run], ys[b], xs[a], ys[b + 1]});
                run = xs.size();
            }
        }
        if (run != xs.size()) out.push_back({xs[run], ys[b], xs.back(), ys[b + 1]});
    }
    return out;
}

/// Measure of odd columns in [0, t], in column units.
double odd_measure(double t) {
    const double pairs = std::floor(t / 2.0);
    return pairs + std::clamp(t - 2.0 * pairs - 1.0, 0.0, 1.0);
}

double strip_integral(const StripPatch& p, const Rect& r) {
    const double xa = std::max(r.x0, p.rect.x0);
    const double xb = std::min(r.x1, p.rect.x1);
    const double ya = std::max(r.y0, p.rect.y0);
    const double yb = std::min(r.y1, p.rect.y1);
    if (!(xb > xa) || !(yb > ya)) return 0.0;
    const double cols = static_cast<double>(p.columns);
    const double ta = (xa - p.rect.x0) * cols / p.rect.width();
    const double tb = std::min((xb - p.rect.x0) * cols / p.rect.width(), cols);
    auto g = [&](double t) {
        return p.even_value * t + (p.odd_value - p.even_value) * odd_measure(t);
    };
    return (g(tb) - g(ta)) * p.column_width() * (yb - ya);
}

}  // namespace

std::uint64_t StripPatch::column_of(double x) const {
    const double t = std::floor((x - rect.x0) * static_cast<double>(columns) / rect.width());
    if (!(t > 0.0)) return 0;
    const auto j = static_cast<std::uint64_t>(t);
    return std::min(j, columns - 1);
}

Rect StripPatch::column_rect(std::uint64_t j) const {
    const double cols = static_cast<double>(columns);
    const double left = rect.x0 + rect.width() * static_cast<double>(j) / cols;
    const double right =
        (j + 1 == columns) ? rect.x1 : rect.x0 + rect.width() * static_cast<double>(j + 1) / cols;
    return {left, rect.y0, right, rect.y1};
}

DensityField::DensityField(Rect domain, double default_value, std::vector<DensityCell> cells,
                           std::vector<StripPatch> patches)
    : domain_(domain), default_(default_value), cells_(std::move(cells)),
      patches_(std::move(patches)) {
    require_valid(domain_, "density domain");
    require_value(default_, "default");
    lo_ = hi_ = default_;
    auto widen = [&](double v) {
        lo_ = std::min(lo_, v);
        hi_ = std::max(hi_, v);
    };

    for (const DensityCell& cell : cells_) {
        require_valid(cell.rect, "density cell");
        if (!domain_.contains(cell.rect)) throw ValidationError("density cell outside domain");
        require_value(cell.value, "cell");
        widen(cell.value);
    }
    require_disjoint(cells_.size(), [&](std::size_t i) -> const Rect& { return cells_[i].rect; },
                     "density cells");

    children_.assign(patches_.size(), {});
    for (std::size_t idx = 0; idx < patches_.size(); ++idx) {
        StripPatch& p = patches_[idx];
        require_valid(p.rect, "strip patch");
        if (p.columns == 0) throw ValidationError("strip patch needs at least one column");
        if (!domain_.contains(p.rect)) throw ValidationError("strip patch outside domain");
        require_value(p.even_value, "patch");
        require_value(p.odd_value, "patch");
        widen(p.even_value);
        if (p.columns > 1) widen(p.odd_value);

        if (p.parent < 0) {
            p.under = default_;
            p.parent_column = 0;
            for (const DensityCell& cell : cells_) {
                if (!cell.rect.overlaps(p.rect)) continue;
                if (!cell.rect.contains(p.rect))
                    throw ValidationError("strip patch straddles a density cell boundary");
                p.under = cell.value;
            }
            roots_.push_back(static_cast<std::uint32_t>(idx));
            continue;
        }
        if (static_cast<std::size_t>(p.parent) >= idx)
            throw ValidationError("strip patch parent must precede the child");
        const StripPatch& parent = patches_[static_cast<std::size_t>(p.parent)];
        const std::uint64_t col = parent.column_of(0.5 * (p.rect.x0 + p.rect.x1));
        const Rect cr = parent.column_rect(col);
        const double tol = 1e-9 * cr.width();
        if (p.rect.x0 < cr.x0 - tol || p.rect.x1 > cr.x1 + tol || p.rect.y0 < cr.y0 ||
            p.rect.y1 > cr.y1)
            throw ValidationError("strip patch must lie in a single column of its parent");
        p.under = parent.column_value(col);
        p.parent_column = col;
        children_[static_cast<std::size_t>(p.parent)].emplace_back(col,
                                                                   static_cast<std::uint32_t>(idx));
    }

    require_disjoint(roots_.size(),
                     [&](std::size_t i) -> const Rect& { return patches_[roots_[i]].rect; },
                     "root strip patches");
    for (auto& kids : children_) {
        std::sort(kids.begin(), kids.end());
        for (std::size_t a = 0; a < kids.size(); ++a) {
            for (std::size_t b = a + 1; b < kids.size() && kids[b].first == kids[a].first; ++b) {
                if (patches_[kids[a].second].rect.overlaps(patches_[kids[b].second].rect))
                    throw ValidationError("sibling strip patches overlap");
            }
        }
    }
}

double DensityField::eval(Vec2 p) const {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !domain_.contains(p))
        throw ValidationError("eval: point outside the density domain");
    for (std::uint32_t r : roots_) {
        if (contains_half_open(patches_[r].rect, p, domain_)) return eval_patch(r, p);
    }
    for (const DensityCell& cell : cells_) {
        if (contains_half_open(cell.rect, p, domain_)) return cell.value;
    }
    return default_;
}

double DensityField::eval_patch(std::uint32_t idx, Vec2 p) const {
    const StripPatch& patch = patches_[idx];
    const std::uint64_t col = patch.column_of(p.x);
    const auto& kids = children_[idx];
    auto it = std::lower_bound(kids.begin(), kids.end(), std::make_pair(col, std::uint32_t{0}));
    for (; it != kids.end() && it->first == col; ++it) {
        if (contains_half_open(patches_[it->second].rect, p, domain_)) return eval_patch(it->second, p);
    }
    return patch.column_value(col);
}

double DensityField::integrate(const Rect& r) const {
    require_valid(r, "integrate");
    if (!domain_.contains(r)) throw ValidationError("integrate: rectangle not contained in domain");
    double sum = default_ * r.area();
    for (const DensityCell& cell : cells_) {
        const double a = intersection_area(cell.rect, r);
        if (a > 0.0) sum += (cell.value - default_) * a;
    }
    for (std::uint32_t root : roots_) sum += integrate_patch(root, r);
    return sum;
}

double DensityField::integrate_patch(std::uint32_t idx, const Rect& r) const {
    const StripPatch& patch = patches_[idx];
    const double a = intersection_area(patch.rect, r);
    if (a == 0.0) return 0.0;
    double sum = strip_integral(patch, r) - patch.under * a;
    const auto& kids = children_[idx];
    if (kids.empty()) return sum;
    const std::uint64_t first = patch.column_of(std::max(r.x0, patch.rect.x0));
    const std::uint64_t last = patch.column_of(std::min(r.x1, patch.rect.x1));
    auto it = std::lower_bound(kids.begin(), kids.end(), std::make_pair(first, std::uint32_t{0}));
    for (; it != kids.end() && it->first <= last; ++it) sum += integrate_patch(it->second, r);
    return sum;
}

DensityField DensityField::flattened(std::size_t max_cells) const {
    std::size_t estimate = cells_.size();
    for (const StripPatch& p : patches_) {
        if (p.columns > max_cells) throw std::runtime_error("flattened: field needs too many cells");
        estimate += p.columns;
        if (estimate > max_cells) throw std::runtime_error("flattened: field needs too many cells");
    }

    std::vector<DensityCell> out;
    auto emit = [&](const Rect& rect, const std::vector<Rect>& holes, double value) {
        if (value == default_) return;
        for (const Rect& piece : subtract(rect, holes)) {
            out.push_back({piece, value});
            if (out.size() > max_cells) throw std::runtime_error("flattened: field needs too many cells");
        }
    };

    for (const DensityCell& cell : cells_) {
        std::vector<Rect> holes;
        for (std::uint32_t r : roots_) {
            if (cell.rect.overlaps(patches_[r].rect)) holes.push_back(patches_[r].rect);
        }
        emit(cell.rect, holes, cell.value);
    }
    for (std::size_t idx = 0; idx < patches_.size(); ++idx) {
        const StripPatch& p = patches_[idx];
        const auto& kids = children_[idx];
        auto it = kids.begin();
        for (std::uint64_t j = 0; j < p.columns; ++j) {
            std::vector<Rect> holes;
            for (; it != kids.end() && it->first == j; ++it) holes.push_back(patches_[it->second].rect);
            emit(p.column_rect(j), holes, p.column_value(j));
        }
    }
    return DensityField(domain_, default_, std::move(out));
}

bool operator==(const DensityField& a, const DensityField& b) {
    if (a.domain_ != b.domain_ || a.default_ != b.default_ || a.cells_ != b.cells_ ||
        a.patches_.size() != b.patches_.size())
        return false;
    for (std::size_t i = 0; i < a.patches_.size(); ++i) {
        const StripPatch& p = a.patches_[i];
        const StripPatch& q = b.patches_[i];
        if (p.rect != q.rect || p.columns != q.columns || p.even_value != q.even_value ||
            p.odd_value != q.odd_value || p.parent != q.parent)
            return false;
    }
    return true;
}

DensityField make_checkerboard(std::uint64_t n, double c) {
    if (n == 0) throw ValidationError("make_checkerboard: N must be >= 1");
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("make_checkerboard: c must be > 0");
    if (n > kMaxCheckerboardCells) throw ValidationError("make_checkerboard: N too large for a flat field");
    const double nd = static_cast<double>(n);
    const double top = 1.0 / nd;
    std::vector<DensityCell> cells;
    cells.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const Rect r{static_cast<double>(i) / nd, 0.0, static_cast<double>(i + 1) / nd, top};
        cells.push_back({r, (i % 2 == 0) ? 1.0 : 1.0 + c});
    }
    return DensityField({0.0, 0.0, 1.0, top}, 1.0, std::move(cells));
}

namespace {

DensityField map_field(const DensityField& field, const Similarity& s, bool reciprocal) {
    if (!(s.scale > 0.0) || !std::isfinite(s.scale) || !std::isfinite(s.shift.x) ||
        !std::isfinite(s.shift.y))
        throw ValidationError("transplant: similarity must have a positive finite scale");
    auto value = [&](double v) { return reciprocal ? 1.0 / v : v; };
    std::vector<DensityCell> cells;
    cells.reserve(field.cells().size());
    for (const DensityCell& c : field.cells()) cells.push_back({s.apply(c.rect), value(c.value)});
    std::vector<StripPatch> patches;
    patches.reserve(field.patches().size());
    for (const StripPatch& p : field.patches()) {
        StripPatch q = p;
        q.rect = s.apply(p.rect);
        q.even_value = value(p.even_value);
        q.odd_value = value(p.odd_value);
        patches.push_back(q);
    }
    return DensityField(s.apply(field.domain()), value(field.default_value()), std::move(cells),
                        std::move(patches));
}

}  // namespace

DensityField transplant(const DensityField& field, const Similarity& s) {
    return map_field(field, s, false);
}

DensityField reciprocal_transplant(const DensityField& field, const Similarity& s) {
    return map_field(field, s, true);
}

DensityField EmbeddedPatch::field() const {
    return transplant(make_checkerboard(columns, c), placement);
}

Segment EmbeddedPatch::pair(std::uint64_t index) const {
    return placement.apply(MarkedGrid(columns, rows).pair(index));
}

std::vector<Segment> EmbeddedPatch::pairs() const {
    const MarkedGrid grid(columns, rows);
    std::vector<Segment> out;
    out.reserve(grid.pair_count());
    for (std::uint64_t i = 0; i < grid.pair_count(); ++i) out.push_back(placement.apply(grid.pair(i)));
    return out;
}

EmbeddedPatch embed_in_neighborhood(const Segment& seg, const Rect& u, std::uint64_t n,
                                    std::uint64_t m, double c, double base_epsilon) {
    if (!seg.horizontal()) throw ValidationError("embed_in_neighborhood: segment must be horizontal");
    require_valid(u, "embed_in_neighborhood: neighborhood");
    if (n == 0 || m == 0) throw ValidationError("embed_in_neighborhood: N and M must be >= 1");
    if (!(c > 0.0)) throw ValidationError("embed_in_neighborhood: c must be > 0");
    if (!(base_epsilon > 0.0)) throw ValidationError("embed_in_neighborhood: epsilon must be > 0");

    Segment s = seg;
    if (s.b.x < s.a.x) std::swap(s.a, s.b);
    if (!u.contains(s.a) || !u.contains(s.b))
        throw ValidationError("embed_in_neighborhood: segment not inside the neighborhood");

    const double ratio = s.b.x - s.a.x;
    const Rect unit_strip{0.0, 0.0, 1.0, 1.0 / static_cast<double>(n)};
    EmbeddedPatch out;
    out.columns = n;
    out.rows = m;
    out.c = c;
    out.base = s;
    out.placement = {ratio, {s.a.x, s.a.y}};
    out.rect = out.placement.apply(unit_strip);
    if (!(out.rect.y1 > out.rect.y0) || !u.contains(out.rect)) {
        out.placement.shift.y = s.a.y - ratio * unit_strip.y1;
        out.rect = out.placement.apply(unit_strip);
        out.rect.y1 = s.a.y;
        out.base_on_top = true;
        if (!(out.rect.y1 > out.rect.y0) || !u.contains(out.rect))
            throw ValidationError(
                "embed_in_neighborhood: neighborhood too small for the rescaled checkerboard");
    }
    out.epsilon = ratio * ratio * base_epsilon;
    return out;
}

}  // namespace bknet
