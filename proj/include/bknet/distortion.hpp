#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bknet/certificate.hpp"
#include "bknet/density.hpp"
#include "bknet/geometry.hpp"

namespace bknet {

/// Piecewise-affine map on an nx-by-ny grid over `domain`. Each grid cell is
/// split along its main diagonal into a lower-right triangle (t = 0) with
/// vertices (i,j),(i+1,j),(i+1,j+1) and an upper-left one (t = 1) with
/// vertices (i,j),(i+1,j+1),(i,j+1).
class PLMap {
public:
    PLMap(Rect domain, std::uint64_t nx, std::uint64_t ny, std::vector<Vec2> images,
          bool allow_reversal = false);

    static PLMap identity(Rect domain, std::uint64_t nx, std::uint64_t ny);
    /// p -> A (p - domain corner) + domain corner, A = [[a, b], [c, d]].
    static PLMap linear(Rect domain, std::uint64_t nx, std::uint64_t ny, double a, double b,
                        double c, double d);

    const Rect& domain() const { return domain_; }
    std::uint64_t nx() const { return nx_; }
    std::uint64_t ny() const { return ny_; }
    bool allow_reversal() const { return allow_reversal_; }
    const std::vector<Vec2>& images() const { return images_; }

    std::size_t vertex_index(std::uint64_t i, std::uint64_t j) const { return j * (nx_ + 1) + i; }
    double grid_x(std::uint64_t i) const;
    double grid_y(std::uint64_t j) const;
    Vec2 vertex(std::uint64_t i, std::uint64_t j) const { return {grid_x(i), grid_y(j)}; }
    const Vec2& image(std::uint64_t i, std::uint64_t j) const { return images_[vertex_index(i, j)]; }
    Vec2& image(std::uint64_t i, std::uint64_t j) { return images_[vertex_index(i, j)]; }

    /// Evaluates the map; grid vertices return their stored image exactly.
    Vec2 operator()(Vec2 p) const;

    friend bool operator==(const PLMap&, const PLMap&) = default;

private:
    Rect domain_;
    std::uint64_t nx_;
    std::uint64_t ny_;
    std::vector<Vec2> images_;
    bool allow_reversal_;
};

struct PLMetrics {
    std::vector<double> det;        // per triangle, index 2 * (j * nx + i) + t
    std::vector<double> sigma_max;  // largest singular value per triangle
    std::vector<double> sigma_min;
    std::vector<double> triangle_area;
    double lip = 0.0;
    double lip_inv = 0.0;
    double mismatch_area = 0.0;  // area where |det - rho(centroid)| > 1e-9
    double mismatch_l1 = 0.0;    // sum of area * |det - rho(centroid)|
    std::vector<double> cell_image_area;  // signed area of each cell's image
};

/// Throws ValidationError for a degenerate triangle, or a reversed one unless
/// the map allows reversal. The field's domain must equal the map's.
PLMetrics pl_metrics(const PLMap& map, const DensityField& field);

struct DistortionResult {
    std::vector<std::size_t> bijection;  // X[i] -> Y[bijection[i]]
    double lip = 0.0;
    double lip_inv = 0.0;
    double distortion = 0.0;
};

/// Lip * Lip_inv of the given bijection.
DistortionResult bijection_distortion(const std::vector<Vec2>& x, const std::vector<Vec2>& y,
                                      const std::vector<std::size_t>& bijection);

/// Exact minimum over all bijections (|X| = |Y| in [2, 8]); ties go to the
/// lexicographically first bijection.
DistortionResult pair_distortion(const std::vector<Vec2>& x, const std::vector<Vec2>& y);

/// Greedy match of X (visited in `order`) to the nearest unused Y after both
/// sets are centered and scaled to unit RMS radius.
std::vector<std::size_t> nearest_neighbor_matching(const std::vector<Vec2>& x,
                                                   const std::vector<Vec2>& y,
                                                   const std::vector<std::size_t>& order);

/// First-improvement 2-swap descent from `start`.
DistortionResult two_swap(const std::vector<Vec2>& x, const std::vector<Vec2>& y,
                          std::vector<std::size_t> start);

/// Run 0 visits X in index order; each of `restarts` further runs uses a
/// seeded random order. Returns the best run; never better than the optimum.
DistortionResult greedy_distortion(const std::vector<Vec2>& x, const std::vector<Vec2>& y,
                                   std::uint64_t restarts, std::uint64_t seed = 0);

struct SearchResult {
    PLMap map;
    StretchReport report;
    PLMetrics metrics;
    std::vector<double> trace;  // objective after each proposal
    double objective = 0.0;
    std::uint64_t accepted = 0;
};

inline constexpr double kJacobianPenalty = 1e3;

/// max pair ratio / A + kJacobianPenalty * mismatch_l1, or +inf when some
/// triangle is not orientation preserving or Lip > L.
double stretch_objective(const PLMap& map, const DensityField& field, const CertificateConstants& k);

/// Coordinate descent over vertex images of a PL map on the marked grid of
/// R_N, starting from the identity. Deterministic for a given seed.
SearchResult search_min_stretch(const DensityField& field, const CertificateConstants& k,
                                std::int64_t budget, std::uint64_t seed);

}  // namespace bknet
