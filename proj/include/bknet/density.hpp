#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "bknet/geometry.hpp"

namespace bknet {

struct DensityCell {
    Rect rect;
    double value = 1.0;
    friend bool operator==(const DensityCell&, const DensityCell&) = default;
};

/// A checkerboard strip laid over the field: `columns` equal vertical columns,
/// column 0 taking `even_value`, column 1 `odd_value`, and so on.
///
/// A root patch (parent < 0) sits inside one flat cell or entirely in the
/// default region; a child patch sits inside a single column of its parent.
/// `under` and `parent_column` are filled in by DensityField.
struct StripPatch {
    Rect rect;
    std::uint64_t columns = 1;
    double even_value = 1.0;
    double odd_value = 1.0;
    std::int64_t parent = -1;
    double under = 0.0;
    std::uint64_t parent_column = 0;

    double column_width() const { return rect.width() / static_cast<double>(columns); }
    double column_value(std::uint64_t j) const { return (j % 2 == 0) ? even_value : odd_value; }
    std::uint64_t column_of(double x) const;
    Rect column_rect(std::uint64_t j) const;
};

/// Piecewise-constant density on an axis-aligned domain.
///
/// Evaluation uses half-open cells [left,right)x[bottom,top), closed on the
/// sides shared with the domain. Patches override cells, children override
/// their parent. Values must be positive and finite.
class DensityField {
public:
    DensityField(Rect domain, double default_value, std::vector<DensityCell> cells = {},
                 std::vector<StripPatch> patches = {});

    static DensityField constant(Rect domain, double value) { return {domain, value}; }

    const Rect& domain() const { return domain_; }
    double default_value() const { return default_; }
    const std::vector<DensityCell>& cells() const { return cells_; }
    const std::vector<StripPatch>& patches() const { return patches_; }
    double min_value() const { return lo_; }
    double max_value() const { return hi_; }

    double eval(Vec2 p) const;
    /// Exact integral over `r`, which must lie in the domain.
    double integrate(const Rect& r) const;

    /// Equivalent field using flat cells only. Throws if it needs more than `max_cells`.
    DensityField flattened(std::size_t max_cells = std::size_t{1} << 22) const;

    friend bool operator==(const DensityField& a, const DensityField& b);

private:
    double eval_patch(std::uint32_t idx, Vec2 p) const;
    double integrate_patch(std::uint32_t idx, const Rect& r) const;

    Rect domain_;
    double default_;
    std::vector<DensityCell> cells_;
    std::vector<StripPatch> patches_;
    std::vector<std::uint32_t> roots_;
    // Per patch, (column, child index) sorted by column.
    std::vector<std::vector<std::pair<std::uint64_t, std::uint32_t>>> children_;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

/// rho_N on R_N = [0,1]x[0,1/N]: 1 where floor(N x) is even, 1+c otherwise.
DensityField make_checkerboard(std::uint64_t n, double c);

/// rho o s^-1 on s(domain).
DensityField transplant(const DensityField& field, const Similarity& s);
/// (1/rho) o s^-1 on s(domain).
DensityField reciprocal_transplant(const DensityField& field, const Similarity& s);

/// A rescaled copy of the R_N checkerboard whose base edge is a given segment.
struct EmbeddedPatch {
    Rect rect;
    std::uint64_t columns = 1;
    std::uint64_t rows = 1;  // M
    double c = 0.0;
    Similarity placement;    // R_N -> rect
    Segment base;
    bool base_on_top = false;
    double epsilon = 0.0;

    double ratio() const { return placement.scale; }
    DensityField field() const;
    std::uint64_t pair_count() const { return columns * rows * (rows + 1); }
    /// Images of the marked pairs, in MarkedGrid order.
    Segment pair(std::uint64_t index) const;
    std::vector<Segment> pairs() const;
};

/// Places the checkerboard on the horizontal segment `seg` inside `u`, above
/// the segment if it fits, otherwise below. `base_epsilon` is the mismatch
/// budget for R_N itself; the patch's budget is ratio^2 times it.
EmbeddedPatch embed_in_neighborhood(const Segment& seg, const Rect& u, std::uint64_t n,
                                    std::uint64_t m, double c, double base_epsilon);

struct HierarchyOptions {
    double L = 2.0;
    double c = 1.0;
    std::uint64_t N = 4;  // smallest checkerboard size; levels may double it
    std::uint64_t M = 2;
    std::uint64_t depth = 0;
    std::size_t max_patches = std::size_t{1} << 20;
};

struct HierarchyLevel {
    std::uint64_t columns = 0;      // N used by this level's patches
    double scale = 1.0;             // length of the segments the patches sit on
    double epsilon = 1.0;           // mismatch budget eps_i
    double neighborhood_area = 0.0; // total area of this level's neighborhoods
    std::uint64_t segment_count = 1;
    std::size_t patch_begin = 0;
    std::size_t patch_end = 0;
};

/// Nested checkerboards: level i puts one patch on every level i-1 segment,
/// level i segments are the marked pairs of those patches.
class Hierarchy {
public:
    Hierarchy(DensityField field, std::vector<HierarchyLevel> levels, HierarchyOptions options)
        : field_(std::move(field)), levels_(std::move(levels)), options_(options) {}

    const DensityField& field() const { return field_; }
    const std::vector<HierarchyLevel>& levels() const { return levels_; }
    const HierarchyOptions& options() const { return options_; }

    std::uint64_t segment_count(std::size_t level) const { return levels_.at(level).segment_count; }
    void for_each_segment(std::size_t level, const std::function<void(const Segment&)>& fn) const;
    std::vector<Segment> segments(std::size_t level, std::size_t cap = std::size_t{1} << 24) const;
    /// Neighborhoods U_k of level `level` (>= 1): the rectangles of its patches.
    std::vector<Rect> neighborhoods(std::size_t level) const;

private:
    DensityField field_;
    std::vector<HierarchyLevel> levels_;
    HierarchyOptions options_;
};

/// Base mismatch budget c / (8 N^2 L^2) for one checkerboard of size N.
double checkerboard_epsilon(double lip, double c, std::uint64_t n);

Hierarchy build_hierarchy(const HierarchyOptions& options);
/// Uses the scheduled certificate constants for N and M.
Hierarchy build_hierarchy(double lip, double c, std::uint64_t depth);

struct LimitOptions {
    std::uint64_t N = 4;
    std::uint64_t M = 2;
    std::uint64_t max_depth = 2;
};

struct LimitSquare {
    Rect square;
    std::uint64_t k = 1;
};

/// Default schedule: S_k = [2^-k, 2^-k + 2^-(k+1)]^2, shrinking to the origin.
std::vector<LimitSquare> default_limit_squares(std::uint64_t count);

/// Density on I^2 equal to 1 outside the squares and, on the k-th square, the
/// transplanted hierarchy built with L = k+1, amplitude min(c, 1/k) and depth
/// min(k, max_depth).
DensityField assemble_limit_density(double c, const std::vector<LimitSquare>& squares,
                                    const LimitOptions& options = {});

}  // namespace bknet
