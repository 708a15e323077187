#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bknet/distortion.hpp"

namespace bknet {

namespace {

/// Columns of the constant differential of one grid triangle.
struct Differential {
    Vec2 col0;
    Vec2 col1;
    double det() const { return col0.x * col1.y - col1.x * col0.y; }
    double sigma_max() const { return 0.5 * (hypot_sum() + hypot_diff()); }
    double sigma_min() const { return 0.5 * std::fabs(hypot_sum() - hypot_diff()); }

private:
    double hypot_sum() const { return std::hypot(col0.x + col1.y, col0.y - col1.x); }
    double hypot_diff() const { return std::hypot(col0.x - col1.y, col0.y + col1.x); }
};

Differential differential(const PLMap& m, std::uint64_t i, std::uint64_t j, int t) {
    const Vec2 a = m.image(i, j);
    const Vec2 c = m.image(i + 1, j + 1);
    const double w = m.grid_x(i + 1) - m.grid_x(i);
    const double h = m.grid_y(j + 1) - m.grid_y(j);
    if (t == 0) {
        const Vec2 b = m.image(i + 1, j);
        return {(1.0 / w) * (b - a), (1.0 / h) * (c - b)};
    }
    const Vec2 d = m.image(i, j + 1);
    return {(1.0 / w) * (c - d), (1.0 / h) * (d - a)};
}

Vec2 centroid(const PLMap& m, std::uint64_t i, std::uint64_t j, int t) {
    const Vec2 a = m.vertex(i, j);
    const Vec2 c = m.vertex(i + 1, j + 1);
    const Vec2 o = (t == 0) ? m.vertex(i + 1, j) : m.vertex(i, j + 1);
    return {(a.x + o.x + c.x) / 3.0, (a.y + o.y + c.y) / 3.0};
}

double cross(Vec2 u, Vec2 v) { return u.x * v.y - u.y * v.x; }

}  // namespace

PLMap::PLMap(Rect domain, std::uint64_t nx, std::uint64_t ny, std::vector<Vec2> images,
             bool allow_reversal)
    : domain_(domain), nx_(nx), ny_(ny), images_(std::move(images)), allow_reversal_(allow_reversal) {
    require_valid(domain_, "PLMap domain");
    if (nx_ == 0 || ny_ == 0) throw ValidationError("PLMap: grid needs at least one cell");
    if (images_.size() != (nx_ + 1) * (ny_ + 1))
        throw ValidationError("PLMap: expected (nx+1)(ny+1) vertex images");
    for (const Vec2& v : images_) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y))
            throw ValidationError("PLMap: vertex images must be finite");
    }
}

double PLMap::grid_x(std::uint64_t i) const {
    if (i == nx_) return domain_.x1;
    return domain_.x0 + domain_.width() * static_cast<double>(i) / static_cast<double>(nx_);
}

double PLMap::grid_y(std::uint64_t j) const {
    if (j == ny_) return domain_.y1;
    return domain_.y0 + domain_.height() * static_cast<double>(j) / static_cast<double>(ny_);
}

PLMap PLMap::identity(Rect domain, std::uint64_t nx, std::uint64_t ny) {
    return linear(domain, nx, ny, 1.0, 0.0, 0.0, 1.0);
}

PLMap PLMap::linear(Rect domain, std::uint64_t nx, std::uint64_t ny, double a, double b, double c,
                    double d) {
    PLMap m(domain, nx, ny, std::vector<Vec2>((nx + 1) * (ny + 1)));
    const bool identity = a == 1.0 && b == 0.0 && c == 0.0 && d == 1.0;
    for (std::uint64_t j = 0; j <= ny; ++j) {
        for (std::uint64_t i = 0; i <= nx; ++i) {
            const Vec2 p = m.vertex(i, j);
            const Vec2 r{p.x - domain.x0, p.y - domain.y0};
            m.image(i, j) = identity ? p
                                     : Vec2{domain.x0 + a * r.x + b * r.y, domain.y0 + c * r.x + d * r.y};
        }
    }
    return m;
}

Vec2 PLMap::operator()(Vec2 p) const {
    if (!domain_.contains(p)) throw ValidationError("PLMap: point outside the domain");
    const double tx = (p.x - domain_.x0) * static_cast<double>(nx_) / domain_.width();
    const double ty = (p.y - domain_.y0) * static_cast<double>(ny_) / domain_.height();
    const auto i = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(tx)), nx_ - 1);
    const auto j = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(ty)), ny_ - 1);
    const double u = tx - static_cast<double>(i);
    const double v = ty - static_cast<double>(j);
    if ((u == 0.0 || u == 1.0) && (v == 0.0 || v == 1.0))
        return image(i + static_cast<std::uint64_t>(u), j + static_cast<std::uint64_t>(v));
    const Vec2 a = image(i, j);
    const Vec2 c = image(i + 1, j + 1);
    if (u >= v) {
        const Vec2 b = image(i + 1, j);
        return a + u * (b - a) + v * (c - b);
    }
    const Vec2 d = image(i, j + 1);
    return a + v * (d - a) + u * (c - d);
}

PLMetrics pl_metrics(const PLMap& map, const DensityField& field) {
    if (field.domain() != map.domain())
        throw ValidationError("pl_metrics: density domain differs from the map domain");
    PLMetrics out;
    const std::size_t cells = map.nx() * map.ny();
    out.det.reserve(2 * cells);
    out.cell_image_area.reserve(cells);
    for (std::uint64_t j = 0; j < map.ny(); ++j) {
        for (std::uint64_t i = 0; i < map.nx(); ++i) {
            const double w = map.grid_x(i + 1) - map.grid_x(i);
            const double h = map.grid_y(j + 1) - map.grid_y(j);
            for (int t = 0; t < 2; ++t) {
                const Differential d = differential(map, i, j, t);
                const double det = d.det();
                if (det == 0.0 || !std::isfinite(det))
                    throw ValidationError("pl_metrics: degenerate triangle");
                if (det < 0.0 && !map.allow_reversal())
                    throw ValidationError("pl_metrics: orientation-reversing triangle");
                const double smax = d.sigma_max();
                const double smin = d.sigma_min();
                const double area = 0.5 * w * h;
                out.det.push_back(det);
                out.sigma_max.push_back(smax);
                out.sigma_min.push_back(smin);
                out.triangle_area.push_back(area);
                out.lip = std::max(out.lip, smax);
                out.lip_inv = std::max(out.lip_inv, 1.0 / smin);
                const double gap = std::fabs(det - field.eval(centroid(map, i, j, t)));
                if (gap > 1e-9) out.mismatch_area += area;
                out.mismatch_l1 += area * gap;
            }
            // Shoelace over the image triangles, independent of the differentials.
            const Vec2 a = map.image(i, j);
            const Vec2 b = map.image(i + 1, j);
            const Vec2 c = map.image(i + 1, j + 1);
            const Vec2 d = map.image(i, j + 1);
            out.cell_image_area.push_back(0.5 * (cross(b - a, c - a) + cross(c - a, d - a)));
        }
    }
    return out;
}

namespace {

struct CachedObjective {
    const PLMap* map;
    std::vector<double> rho;  // density at each triangle centroid
    const CertificateConstants* k;

    double operator()(const PLMap& m) const {
        double l1 = 0.0;
        std::size_t tri = 0;
        for (std::uint64_t j = 0; j < m.ny(); ++j) {
            for (std::uint64_t i = 0; i < m.nx(); ++i) {
                const double area = 0.5 * (m.grid_x(i + 1) - m.grid_x(i)) * (m.grid_y(j + 1) - m.grid_y(j));
                for (int t = 0; t < 2; ++t, ++tri) {
                    const Differential d = differential(m, i, j, t);
                    const double det = d.det();
                    if (!(det > 0.0) || d.sigma_max() > k->L) return std::numeric_limits<double>::infinity();
                    l1 += area * std::fabs(det - rho[tri]);
                }
            }
        }
        const double a = distance(m.image(m.nx(), 0), m.image(0, 0));
        if (!(a > 0.0)) return std::numeric_limits<double>::infinity();
        double worst = 0.0;
        for (std::uint64_t j = 0; j <= m.ny(); ++j) {
            for (std::uint64_t i = 0; i < m.nx(); ++i) {
                const double step = m.grid_x(i + 1) - m.grid_x(i);
                worst = std::max(worst, distance(m.image(i + 1, j), m.image(i, j)) / step);
            }
        }
        return worst / a + kJacobianPenalty * l1;
    }
};

CachedObjective make_objective(const PLMap& map, const DensityField& field,
                               const CertificateConstants& k) {
    CachedObjective obj{&map, {}, &k};
    for (std::uint64_t j = 0; j < map.ny(); ++j)
        for (std::uint64_t i = 0; i < map.nx(); ++i)
            for (int t = 0; t < 2; ++t) obj.rho.push_back(field.eval(centroid(map, i, j, t)));
    return obj;
}

}  // namespace

double stretch_objective(const PLMap& map, const DensityField& field, const CertificateConstants& k) {
    if (field.domain() != map.domain())
        throw ValidationError("stretch_objective: density domain differs from the map domain");
    return make_objective(map, field, k)(map);
}

SearchResult search_min_stretch(const DensityField& field, const CertificateConstants& k,
                                std::int64_t budget, std::uint64_t seed) {
    if (budget < 0) throw ValidationError("search_min_stretch: budget must be >= 0");
    if (k.N < 1 || k.N > 16 || k.M < 1 || k.M > 8)
        throw ValidationError("search_min_stretch: toy sizes only (N <= 16, M <= 8)");
    if (!(k.L > 1.0)) throw ValidationError("search_min_stretch: L must be > 1");
    const Rect strip{0.0, 0.0, 1.0, 1.0 / static_cast<double>(k.N)};
    if (field.domain() != strip) throw ValidationError("search_min_stretch: density must live on R_N");

    PLMap map = PLMap::identity(strip, k.N * k.M, k.M);
    const CachedObjective objective = make_objective(map, field, k);
    double current = objective(map);

    SearchResult out{map, {}, {}, {}, current, 0};
    out.trace.reserve(static_cast<std::size_t>(budget));

    std::mt19937_64 rng(seed);
    const std::uint64_t vertices = (map.nx() + 1) * (map.ny() + 1);
    const double grid_step = 1.0 / static_cast<double>(k.N * k.M);
    const double min_step = std::ldexp(grid_step, -30);
    double h = grid_step / 4.0;
    std::uint64_t stall = 0;

    for (std::int64_t it = 0; it < budget; ++it) {
        const std::uint64_t v = rng() % vertices;
        const std::uint64_t dir = rng() % 4;
        Vec2& img = map.image(v % (map.nx() + 1), v / (map.nx() + 1));
        const Vec2 saved = img;
        switch (dir) {
            case 0: img.x += h; break;
            case 1: img.x -= h; break;
            case 2: img.y += h; break;
            default: img.y -= h; break;
        }
        const double trial = objective(map);
        if (trial < current) {
            current = trial;
            stall = 0;
            ++out.accepted;
        } else {
            img = saved;
            if (++stall >= 4 * vertices) {
                h = std::max(h / 2.0, min_step);
                stall = 0;
            }
        }
        out.trace.push_back(current);
    }

    out.map = map;
    out.objective = current;
    out.report = evaluate_stretch([&](Vec2 p) { return map(p); }, MarkedGrid(k.N, k.M), k);
    out.metrics = pl_metrics(map, field);
    return out;
}

}  // namespace bknet
