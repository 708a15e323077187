#pragma once

// Separated nets whose local point density follows 1/rho on a sequence of
// growing squares S_k, with the unit-center lattice everywhere else.

#include <cstdint>
#include <optional>
#include <vector>

#include "bknet/density.hpp"
#include "bknet/geometry.hpp"

namespace bknet {

struct ScheduledSquare {
    Rect square;                  // S_k, integer vertices
    std::uint64_t side = 0;       // l_k
    std::uint64_t subdivisions = 0;  // m_k
};

struct NetPlan {
    DensityField density;  // on I^2, values in [1, 1+c]
    double c = 0.0;
    std::uint64_t k0 = 0;
    std::vector<ScheduledSquare> schedule;
};

/// l_k = 4^(k+k0), m_k = 2^k, squares along the diagonal with unit gaps.
/// k0 defaults to the smallest value with l_1/m_1 >= 2(1+c).
NetPlan make_plan(const DensityField& density, std::uint64_t count,
                  std::optional<std::uint64_t> k0 = std::nullopt);

/// Throws ValidationError naming the first violated plan invariant.
void validate_plan(const NetPlan& plan);

struct NetCell {
    Rect rect;             // T_ki
    std::uint64_t n = 0;   // points per side
    double target = 0.0;   // integral of rho_k over T_ki
    double spacing() const { return rect.width() / static_cast<double>(n); }
};

struct NetSquare {
    ScheduledSquare plan;
    std::vector<NetCell> cells;  // row-major, bottom row first
};

struct NetPoint {
    Vec2 p;
    std::uint32_t tag = 0;  // 0 = background lattice, k = square S_k
};

/// The net X. Points inside the squares are stored implicitly by their cells;
/// the background lattice is produced per query window.
class Net {
public:
    Net(NetPlan plan, std::vector<NetSquare> squares);

    const NetPlan& plan() const { return plan_; }
    const std::vector<NetSquare>& squares() const { return squares_; }
    /// Largest point spacing anywhere in the net (1 for the background).
    double max_spacing() const { return max_spacing_; }

    std::vector<NetPoint> window_points(const Rect& window) const;
    std::vector<Vec2> square_points(std::size_t k) const;  // k is 1-based
    std::uint64_t square_point_count(std::size_t k) const;
    /// True when the unit square centered at `center` lies in some S_k.
    bool in_squares(Vec2 center) const;

private:
    NetPlan plan_;
    std::vector<NetSquare> squares_;
    double max_spacing_ = 1.0;
};

Net build_net(const NetPlan& plan);

/// Minimum distance over pairs with at least one point in `window`.
double check_separation(const Net& net, const Rect& window);

/// Largest distance from a sample in `window` to the net, sampling on a grid
/// with spacing `step` (at most 1/64). This under-estimates the covering
/// radius by at most step * sqrt(2) / 2.
double check_covering(const Net& net, const Rect& window, double step = 1.0 / 64.0);

struct CellMeasure {
    Rect cell;
    std::uint64_t count = 0;
    double target = 0.0;
    double error = 0.0;
    /// 2 sqrt(target) + 1, the floor-rounding bound on `error`.
    double bound() const;
    /// 2/sqrt(target) + 1/target.
    double relative_bound() const;
};

std::vector<CellMeasure> measure_report(const Net& net, std::size_t k);

}  // namespace bknet
