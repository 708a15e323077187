#include "bknet/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bknet {

namespace {

std::uint64_t next_pow2(double x) {
    if (!(x < 0x1p62)) throw std::runtime_error("schedule_constants: constant exceeds 2^62");
    std::uint64_t p = 1;
    while (static_cast<double>(p) < x) p <<= 1;
    return p;
}

ClaimCheck upper_check(double lhs, double rhs) {
    return {lhs, rhs, lhs < rhs, 1.0 - lhs / rhs};
}

}  // namespace

MarkedGrid::MarkedGrid(std::uint64_t n, std::uint64_t m) : n_(n), m_(m) {
    if (n == 0 || m == 0) throw ValidationError("marked_grid: N and M must be >= 1");
    if (n > (std::uint64_t{1} << 52) / m) throw ValidationError("marked_grid: N*M exceeds 2^52");
}

Vec2 MarkedGrid::vertex(std::uint64_t column, std::uint64_t row) const {
    const double nm = static_cast<double>(columns());
    return {static_cast<double>(column) / nm, static_cast<double>(row) / nm};
}

Vec2 MarkedGrid::point(std::uint64_t i, std::uint64_t p, std::uint64_t q) const {
    if (i < 1 || i > n_ || p > m_ || q > m_) throw ValidationError("marked point index out of range");
    return vertex(p + m_ * (i - 1), q);
}

Segment MarkedGrid::pair(std::uint64_t index) const {
    const std::uint64_t row = index / columns();
    const std::uint64_t col = index % columns();
    return {vertex(col, row), vertex(col + 1, row)};
}

std::vector<Vec2> MarkedGrid::points() const {
    std::vector<Vec2> out;
    out.reserve(point_count());
    for (std::uint64_t q = 0; q <= m_; ++q)
        for (std::uint64_t j = 0; j <= columns(); ++j) out.push_back(vertex(j, q));
    return out;
}

std::vector<Segment> MarkedGrid::pairs() const {
    std::vector<Segment> out;
    out.reserve(pair_count());
    for (std::uint64_t idx = 0; idx < pair_count(); ++idx) out.push_back(pair(idx));
    return out;
}

MarkedGrid marked_grid(std::uint64_t n, std::uint64_t m) { return MarkedGrid(n, m); }

bool regularity(Vec2 w, double a, std::uint64_t n, double l) {
    return w.x > (1.0 - l) * a / static_cast<double>(n);
}

double claim1_lhs(const CertificateConstants& k, double a) {
    const double n = static_cast<double>(k.N);
    const double irregular = n / (2.0 * static_cast<double>(k.M) + 2.0);
    return irregular * ((1.0 - k.l) * a / n) + ((1.0 + k.k) * a / n) * (n - irregular) +
           2.0 * k.L / n;
}

double claim1_slack(const CertificateConstants& k, double a) {
    const double q = 1.0 / (2.0 * static_cast<double>(k.M) + 2.0);
    return a * (k.l * q - k.k * (1.0 - q)) - 2.0 * k.L / static_cast<double>(k.N);
}

double claim2_bound(const CertificateConstants& k) {
    return 2.0 * k.L * std::sqrt(k.l * k.l + k.l);
}

double claim3_lhs(const CertificateConstants& k) {
    const double n = static_cast<double>(k.N);
    const double u = k.m / n + 2.0 * k.L / (static_cast<double>(k.M) * n);
    return (2.0 * k.L / n) * u + std::numbers::pi * u * u;
}

bool FeasibilityReport::all_pass() const {
    return claim1.pass && claim2.pass && claim3.pass && epsilon_mu.pass && epsilon_lipschitz.pass;
}

FeasibilityReport feasibility_report(const CertificateConstants& k) {
    FeasibilityReport r;
    r.constants = k;
    const double a = 1.0 / k.L;
    const double q = 1.0 / (2.0 * static_cast<double>(k.M) + 2.0);
    const double free_slack = a * (k.l * q - k.k * (1.0 - q));
    const double slack = claim1_slack(k, a);
    // The A-proportional terms cancel; the margin is measured on what remains.
    r.claim1 = {claim1_lhs(k, a), a, slack > 0.0 && k.l < 1.0,
                free_slack > 0.0 ? slack / free_slack : -1.0};

    const double b2 = claim2_bound(k);
    r.claim2 = {b2, k.m, b2 <= k.m && k.k <= k.l, 1.0 - b2 / k.m};

    const double n2 = static_cast<double>(k.N) * static_cast<double>(k.N);
    r.claim3 = upper_check(claim3_lhs(k), k.c / (2.0 * n2));

    const double mu_cap = k.mu / n2;
    const double lip_cap = k.c / (8.0 * n2 * k.L * k.L);
    r.epsilon_mu = {k.epsilon, mu_cap, k.epsilon <= mu_cap, 1.0 - k.epsilon / mu_cap};
    r.epsilon_lipschitz = {k.epsilon, lip_cap, k.epsilon <= lip_cap, 1.0 - k.epsilon / lip_cap};
    return r;
}

CertificateConstants schedule_constants(double lip, double c) {
    if (!(lip > 1.0) || !std::isfinite(lip)) throw ValidationError("schedule_constants: L must be > 1");
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("schedule_constants: c must be > 0");

    CertificateConstants k;
    k.L = lip;
    k.c = c;

    // Claim 3 with half the budget: 2Lu + pi u^2 = c/4, u = m + 2L/M.
    const double pi = std::numbers::pi;
    const double u = (c / 4.0) / (lip + std::sqrt(lip * lip + pi * c / 4.0));
    k.M = next_pow2(4.0 * lip / u);
    k.m = u - 2.0 * lip / static_cast<double>(k.M);

    // Claim 2 with half the budget: 2L sqrt(l^2 + l) = m/2.
    const double t = k.m / (4.0 * lip);
    k.l = 2.0 * t * t / (1.0 + std::sqrt(1.0 + 4.0 * t * t));

    const double q = 1.0 / (2.0 * static_cast<double>(k.M) + 2.0);
    k.k = k.l * q / 4.0;

    // Claim 1 at A = 1/L: the 2L/N term may use half of the remaining slack.
    const double free_slack = (1.0 / lip) * (k.l * q - k.k * (1.0 - q));
    k.N = std::max<std::uint64_t>(16, next_pow2(4.0 * lip / free_slack));

    k.mu = c / (8.0 * lip * lip);
    const double n = static_cast<double>(k.N);
    k.epsilon = std::min(k.mu, c / (8.0 * lip * lip)) / (2.0 * n * n);
    return k;
}

std::uint64_t required_depth(double lip, double k) {
    if (!(lip > 1.0)) throw ValidationError("required_depth: L must be > 1");
    if (!(k > 0.0)) throw ValidationError("required_depth: k must be > 0");
    const long double target = 2.0L * std::log(static_cast<long double>(lip));
    const long double rate = std::log1p(static_cast<long double>(k));
    auto exceeds = [&](long double i) { return i * rate > target; };
    long double i = std::floor(target / rate) + 1.0L;
    while (i > 1.0L && exceeds(i - 1.0L)) i -= 1.0L;
    while (!exceeds(i)) i += 1.0L;
    if (i > static_cast<long double>(std::numeric_limits<std::uint64_t>::max()))
        throw std::runtime_error("required_depth: depth exceeds 64 bits");
    return static_cast<std::uint64_t>(i);
}

StretchReport evaluate_stretch(const PlaneMap& f, const MarkedGrid& grid,
                               const CertificateConstants& k) {
    const std::uint64_t nm = grid.columns();
    const std::uint64_t m = grid.m();
    const std::uint64_t n = grid.n();
    if (grid.point_count() > (std::uint64_t{1} << 26))
        throw ValidationError("evaluate_stretch: marked grid too large to evaluate");

    std::vector<Vec2> img(grid.point_count());
    for (std::uint64_t q = 0; q <= m; ++q) {
        for (std::uint64_t j = 0; j <= nm; ++j) {
            const Vec2 v = f(grid.vertex(j, q));
            if (!std::isfinite(v.x) || !std::isfinite(v.y))
                throw ValidationError("evaluate_stretch: map undefined at a marked point");
            img[q * (nm + 1) + j] = v;
        }
    }
    auto at = [&](std::uint64_t j, std::uint64_t q) { return img[q * (nm + 1) + j]; };

    StretchReport r;
    r.a = distance(at(nm, 0), at(0, 0));
    r.threshold = (1.0 + k.k) * r.a;

    const double step = grid.step();
    r.ratios.resize(grid.pair_count());
    for (std::uint64_t idx = 0; idx < grid.pair_count(); ++idx) {
        const std::uint64_t q = idx / nm;
        const std::uint64_t j = idx % nm;
        const double ratio = distance(at(j + 1, q), at(j, q)) / step;
        r.ratios[idx] = ratio;
        r.max_ratio = std::max(r.max_ratio, ratio);
        if (ratio >= r.threshold) {
            PairStretch ps{idx, grid.pair(idx), ratio};
            if (!r.first_flagged) r.first_flagged = ps;
            r.flagged.push_back(ps);
        }
    }

    if (n >= 2) {
        const std::uint64_t side = m + 1;
        r.w.resize((n - 1) * side * side);
        r.w_regular.resize(r.w.size());
        r.square_regular.assign(n - 1, true);
        for (std::uint64_t i = 1; i < n; ++i) {
            for (std::uint64_t p = 0; p <= m; ++p) {
                for (std::uint64_t q = 0; q <= m; ++q) {
                    const std::uint64_t j = p + m * (i - 1);
                    const Vec2 w = at(j + m, q) - at(j, q);
                    const std::uint64_t idx = ((i - 1) * side + p) * side + q;
                    const bool reg = regularity(w, r.a, n, k.l);
                    r.w[idx] = w;
                    r.w_regular[idx] = reg;
                    if (reg) ++r.regular_vectors;
                    else r.square_regular[i - 1] = false;
                }
            }
        }
    }
    return r;
}

PigeonholeChoice pigeonhole_row(
    const std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>>& irregular,
    std::uint64_t m) {
    const std::uint64_t rows = m + 1;
    std::vector<std::vector<std::uint64_t>> count(rows, std::vector<std::uint64_t>(2, 0));
    for (std::size_t s = 0; s < irregular.size(); ++s) {
        const std::uint64_t i = s + 1;
        std::vector<bool> seen(rows, false);
        for (auto [p, q] : irregular[s]) {
            if (q >= rows || p > m) throw ValidationError("pigeonhole_row: position out of range");
            if (!seen[q]) {
                seen[q] = true;
                ++count[q][i % 2];
            }
        }
    }
    PigeonholeChoice best;
    std::uint64_t best_count = 0;
    for (std::uint64_t q = 0; q < rows; ++q) {
        for (int parity = 0; parity < 2; ++parity) {
            if (count[q][parity] > best_count) {
                best_count = count[q][parity];
                best.row = q;
                best.parity = parity;
            }
        }
    }
    for (std::size_t s = 0; s < irregular.size(); ++s) {
        const std::uint64_t i = s + 1;
        if (static_cast<int>(i % 2) != best.parity) continue;
        for (auto [p, q] : irregular[s]) {
            if (q == best.row) {
                best.squares.push_back(i);
                best.columns.push_back(p);
                break;
            }
        }
    }
    return best;
}

}  // namespace bknet
