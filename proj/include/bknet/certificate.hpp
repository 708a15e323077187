#pragma once

// Quantitative stretch certificates for checkerboard Jacobian obstructions.
//
// A map f on R_N = [0,1]x[0,1/N] whose Jacobian matches the checkerboard
// density off a small set must stretch some horizontal marked pair by a
// factor (1+k) more than it stretches the base pair (0,0),(1,0). The
// functions here evaluate the three inequalities that make this quantitative,
// pick one admissible set of constants, and measure stretch on concrete maps.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bknet/geometry.hpp"

namespace bknet {

struct CertificateConstants {
    double L = 2.0;       // biLipschitz bound
    double c = 0.1;       // density amplitude: values in [1, 1+c]
    std::uint64_t N = 1;  // number of checkerboard squares
    std::uint64_t M = 1;  // subdivisions per square side
    double k = 0.0;       // stretch gain
    double l = 0.0;       // regularity slack
    double m = 0.0;       // closeness of regular vectors to W, in units of 1/N
    double mu = 0.0;      // area budget numerator: eps <= mu / N^2
    double epsilon = 0.0; // admissible Jacobian-mismatch area
};

/// Marked vertices of the M x M subdivision of each square S_i of R_N.
///
/// Vertices are indexed by a global column j = p + M(i-1) in [0, NM] and a
/// row q in [0, M]; the point is (j/(NM), q/(NM)). Pairs are the horizontal
/// grid edges (j, s) -> (j+1, s). Nothing is materialized until asked.
class MarkedGrid {
public:
    MarkedGrid(std::uint64_t n, std::uint64_t m);

    std::uint64_t n() const { return n_; }
    std::uint64_t m() const { return m_; }
    std::uint64_t columns() const { return n_ * m_; }
    std::uint64_t point_count() const { return (columns() + 1) * (m_ + 1); }
    std::uint64_t pair_count() const { return columns() * (m_ + 1); }
    double step() const { return 1.0 / static_cast<double>(columns()); }

    Vec2 vertex(std::uint64_t column, std::uint64_t row) const;
    /// x_pq^i with 1 <= i <= N and 0 <= p, q <= M.
    Vec2 point(std::uint64_t i, std::uint64_t p, std::uint64_t q) const;
    /// Pair index runs row-major: index = row * columns() + column.
    Segment pair(std::uint64_t index) const;

    std::vector<Vec2> points() const;
    std::vector<Segment> pairs() const;

private:
    std::uint64_t n_;
    std::uint64_t m_;
};

MarkedGrid marked_grid(std::uint64_t n, std::uint64_t m);

/// W is regular when its x-projection exceeds (1-l)A/N (strict).
bool regularity(Vec2 w, double a, std::uint64_t n, double l);

/// Upper bound on the x-projection of the image polygon used in Claim 1.
double claim1_lhs(const CertificateConstants& k, double a);
/// A - claim1_lhs(A), evaluated without cancellation:
/// A (l q - k (1 - q)) - 2L/N with q = 1/(2M+2).
double claim1_slack(const CertificateConstants& k, double a);
/// 2L sqrt(l^2 + l): bound on N|W - W_pq^i| for regular vectors.
double claim2_bound(const CertificateConstants& k);
/// (2L/N)(m/N + 2L/(MN)) + pi (m/N + 2L/(MN))^2.
double claim3_lhs(const CertificateConstants& k);

struct ClaimCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    /// Fraction of the available slack left unused; 0.05 means 5%.
    double margin = 0.0;
};

struct FeasibilityReport {
    CertificateConstants constants;
    ClaimCheck claim1;  // at the worst-case base stretch A = 1/L
    ClaimCheck claim2;
    ClaimCheck claim3;
    ClaimCheck epsilon_mu;         // eps vs mu / N^2
    ClaimCheck epsilon_lipschitz;  // eps vs c / (8 N^2 L^2)
    bool all_pass() const;
};

FeasibilityReport feasibility_report(const CertificateConstants& k);

/// Constants in the order M, m, l, k, N, each with a factor-two slack.
CertificateConstants schedule_constants(double lip, double c);

/// Smallest i with (1+k)^i > L^2.
std::uint64_t required_depth(double lip, double k);

using PlaneMap = std::function<Vec2(Vec2)>;

struct PairStretch {
    std::uint64_t index = 0;
    Segment pair;
    double ratio = 0.0;
};

struct StretchReport {
    double a = 0.0;          // |f(1,0) - f(0,0)|
    double threshold = 0.0;  // (1+k) A
    std::vector<double> ratios;  // per pair, in MarkedGrid order
    double max_ratio = 0.0;
    std::vector<PairStretch> flagged;  // every pair with ratio >= threshold
    std::optional<PairStretch> first_flagged;

    /// W_pq^i for i in [1, N-1], indexed ((i-1)(M+1) + p)(M+1) + q.
    std::vector<Vec2> w;
    std::vector<bool> w_regular;
    std::vector<bool> square_regular;  // per i in [1, N-1]
    std::uint64_t regular_vectors = 0;
};

StretchReport evaluate_stretch(const PlaneMap& f, const MarkedGrid& grid,
                               const CertificateConstants& k);

/// Row, parity and squares selected by the Claim 1 counting argument.
struct PigeonholeChoice {
    std::uint64_t row = 0;
    int parity = 0;
    std::vector<std::uint64_t> squares;   // increasing i_j, all of one parity
    std::vector<std::uint64_t> columns;   // p_j for each chosen square
};

/// `irregular[i-1]` lists the (p, q) positions of irregular vectors in S_i.
/// Buckets irregular squares by (row, parity) and returns the fullest bucket,
/// using the first irregular position of each square in that row.
PigeonholeChoice pigeonhole_row(
    const std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>>& irregular,
    std::uint64_t m);

}  // namespace bknet
