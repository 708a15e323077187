#include <doctest.h>

#include <algorithm>
#include <random>

#include "bknet/certificate.hpp"
#include "bknet/density.hpp"
#include "oracles.hpp"

using namespace bknet;

namespace {

Rect random_subrect(std::mt19937_64& rng, const Rect& d) {
    std::uniform_real_distribution<double> ux(d.x0, d.x1), uy(d.y0, d.y1);
    double a = ux(rng), b = ux(rng), c = uy(rng), e = uy(rng);
    if (a > b) std::swap(a, b);
    if (c > e) std::swap(c, e);
    return {a, c, b, e};
}

}  // namespace

TEST_CASE("constant field integrates to its area") {
    const DensityField f = DensityField::constant({0, 0, 1, 1}, 1.0);
    CHECK(f.integrate({0, 0, 1, 1}) == 1.0);
    CHECK(f.eval({0.3, 0.7}) == 1.0);
}

TEST_CASE("two-cell checkerboard integrates to 0.75 exactly") {
    const DensityField f = make_checkerboard(2, 1.0);
    CHECK(f.integrate(f.domain()) == 0.75);
}

TEST_CASE("full-strip integral of an even checkerboard is (2+c)/(2N)") {
    for (std::uint64_t n : {2u, 4u, 8u, 16u, 64u}) {
        for (double c : {0.5, 1.0, 3.0}) {
            const DensityField f = make_checkerboard(n, c);
            CHECK(f.integrate(f.domain()) == doctest::Approx((2.0 + c) / (2.0 * n)).epsilon(1e-15));
        }
    }
}

TEST_CASE("checkerboard N=4 on a quarter strip") {
    const DensityField f = make_checkerboard(4, 1.0);
    const Rect r{0.0, 0.0, 0.5, 0.25};
    CHECK(f.integrate(r) == 0.1875);
    const double mc = oracle::monte_carlo([](Vec2 p) { return oracle::checkerboard_value(4, 1.0, p); }, r,
                                          200000, 11);
    CHECK(std::fabs(mc - f.integrate(r)) < 2e-3);
}

TEST_CASE("checkerboard integrals match the column-sum oracle on random rectangles") {
    std::mt19937_64 rng(5);
    for (std::uint64_t n : {2u, 3u, 4u, 8u, 13u}) {
        for (double c : {0.5, 1.0}) {
            const DensityField f = make_checkerboard(n, c);
            for (int t = 0; t < 40; ++t) {
                const Rect r = random_subrect(rng, f.domain());
                if (!r.valid()) continue;
                CHECK(f.integrate(r) == doctest::Approx(oracle::checkerboard_integral(n, c, r)).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("eval follows the parity of floor(N x) with half-open columns") {
    const DensityField f = make_checkerboard(4, 1.0);
    CHECK(f.eval({0.0, 0.0}) == 1.0);
    CHECK(f.eval({0.25, 0.1}) == 2.0);   // left edge of column 1
    CHECK(f.eval({0.2499, 0.1}) == 1.0);
    CHECK(f.eval({1.0, 0.25}) == 2.0);   // top-right corner is closed
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const Vec2 p{u(rng), 0.25 * u(rng)};
        CHECK(f.eval(p) == oracle::checkerboard_value(4, 1.0, p));
    }
    CHECK_THROWS_AS(f.eval({0.5, 0.3}), ValidationError);
}

TEST_CASE("integrate is additive and bounded") {
    const Hierarchy h = build_hierarchy(HierarchyOptions{2.0, 1.0, 4, 2, 2});
    const DensityField& f = h.field();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const Rect r = random_subrect(rng, f.domain());
        if (!r.valid()) continue;
        const double cut = std::ldexp(std::floor(std::ldexp(r.x0 + 0.5 * r.width(), 12)), -12);
        if (!(cut > r.x0 && cut < r.x1)) continue;
        const double whole = f.integrate(r);
        const double parts = f.integrate({r.x0, r.y0, cut, r.y1}) + f.integrate({cut, r.y0, r.x1, r.y1});
        CHECK(whole == doctest::Approx(parts).epsilon(1e-14));
        CHECK(whole >= r.area() * (1.0 - 1e-14));
        CHECK(whole <= 2.0 * r.area() * (1.0 + 1e-14));
    }
    // Dyadic cuts through dyadic fields sum exactly.
    const Rect r{0.0, 0.0, 0.75, 0.5};
    CHECK(f.integrate(r) == f.integrate({0.0, 0.0, 0.5, 0.5}) + f.integrate({0.5, 0.0, 0.75, 0.5}));
}

TEST_CASE("integrate rejects rectangles outside the domain") {
    const DensityField f = make_checkerboard(2, 1.0);
    CHECK_THROWS_AS(f.integrate({0.0, 0.0, 1.0, 1.0}), ValidationError);
}

TEST_CASE("field construction validates its inputs") {
    const Rect d{0, 0, 1, 1};
    CHECK_THROWS_AS(DensityField(d, 0.0), ValidationError);
    CHECK_THROWS_AS(DensityField(d, 1.0, {{{0, 0, 0.6, 1}, 2.0}, {{0.5, 0, 1, 1}, 2.0}}), ValidationError);
    CHECK_THROWS_AS(DensityField(d, 1.0, {{{0, 0, 2, 1}, 2.0}}), ValidationError);
    CHECK_THROWS_AS(DensityField(d, 1.0, {{{0, 0, 1, 1}, -1.0}}), ValidationError);
    CHECK_THROWS_AS(make_checkerboard(0, 1.0), ValidationError);
    CHECK_THROWS_AS(make_checkerboard(4, 0.0), ValidationError);
}

TEST_CASE("transplant composes with the similarity") {
    const DensityField f = make_checkerboard(2, 1.0);
    const Similarity s{2.0, {0.0, 0.0}};
    const DensityField g = transplant(f, s);
    CHECK(g.eval({1.9, 0.1}) == f.eval({0.95, 0.05}));
    CHECK(transplant(f, Similarity{}) == f);

    const DensityField moved = transplant(f, {0.25, {0.5, 0.125}});
    std::mt19937_64 rng(4);
    for (int t = 0; t < 100; ++t) {
        const Rect r = random_subrect(rng, f.domain());
        if (!r.valid()) continue;
        const Rect sr = Similarity{0.25, {0.5, 0.125}}.apply(r);
        CHECK(moved.integrate(sr) == doctest::Approx(0.0625 * f.integrate(r)).epsilon(1e-12));
    }
}

TEST_CASE("reciprocal transplant inverts the values") {
    const DensityField f = DensityField::constant({0, 0, 1, 1}, 1.5);
    const DensityField g = reciprocal_transplant(f, {4.0, {1.0, 1.0}});
    CHECK(g.eval({3.0, 2.0}) == 1.0 / 1.5);
    CHECK(g.domain() == Rect{1, 1, 5, 5});
}

TEST_CASE("embedding at ratio 1 reproduces the checkerboard and its marked pairs") {
    const EmbeddedPatch e = embed_in_neighborhood({{0, 0}, {1, 0}}, {0, 0, 1, 0.25}, 4, 2, 1.0, 0.01);
    CHECK(e.field() == make_checkerboard(4, 1.0));
    CHECK(e.pairs() == MarkedGrid(4, 2).pairs());
    CHECK(e.epsilon == 0.01);
    CHECK_FALSE(e.base_on_top);
}

TEST_CASE("embedding at ratio 1/2 halves the pairs and quarters epsilon") {
    const EmbeddedPatch one = embed_in_neighborhood({{0, 0}, {1, 0}}, {0, 0, 1, 0.25}, 4, 2, 1.0, 0.01);
    const EmbeddedPatch half = embed_in_neighborhood({{0, 0}, {0.5, 0}}, {0, 0, 0.5, 0.125}, 4, 2, 1.0, 0.01);
    CHECK(half.epsilon == 0.0025);
    const auto a = one.pairs();
    const auto b = half.pairs();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(b[i].a == 0.5 * a[i].a);
        CHECK(b[i].b == 0.5 * a[i].b);
    }
    CHECK(half.field().integrate(half.rect) == 0.25 * one.field().integrate(one.rect));
}

TEST_CASE("embedding falls back below the segment and rejects thin neighborhoods") {
    const EmbeddedPatch below =
        embed_in_neighborhood({{0, 0.5}, {1, 0.5}}, {0, 0.25, 1, 0.5}, 4, 2, 1.0, 0.01);
    CHECK(below.base_on_top);
    CHECK(below.rect == Rect{0, 0.25, 1, 0.5});
    CHECK_THROWS_AS(embed_in_neighborhood({{0, 0}, {1, 0}}, {0, 0, 1, 0.1}, 4, 2, 1.0, 0.01), ValidationError);
    CHECK_THROWS_AS(embed_in_neighborhood({{0, 0}, {1, 0}}, {0, 0, 1, 0}, 4, 2, 1.0, 0.01), ValidationError);
    CHECK_THROWS_AS(embed_in_neighborhood({{0, 0}, {0, 1}}, {0, 0, 1, 1}, 4, 2, 1.0, 0.01), ValidationError);
}

TEST_CASE("hierarchy depth 0 is the constant field with one segment") {
    const Hierarchy h = build_hierarchy(HierarchyOptions{2.0, 1.0, 4, 2, 0});
    CHECK(h.field() == DensityField::constant({0, 0, 1, 1}, 1.0));
    CHECK(h.segment_count(0) == 1);
    CHECK(h.levels()[0].epsilon == 1.0);
    CHECK(h.segments(0) == std::vector<Segment>{{{0, 0}, {1, 0}}});
}

TEST_CASE("hierarchy depth 1 is one embedded patch on the base segment") {
    const Hierarchy h = build_hierarchy(HierarchyOptions{2.0, 1.0, 4, 2, 1});
    REQUIRE(h.field().patches().size() == 1);
    const HierarchyLevel& lv = h.levels()[1];
    const EmbeddedPatch e = embed_in_neighborhood({{0, 0}, {1, 0}}, {0, 0, 1, 1}, lv.columns, 2, 1.0,
                                                  checkerboard_epsilon(2.0, 1.0, lv.columns));
    const DensityField patch = e.field();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
        const Vec2 p{u(rng), u(rng)};
        const double want = patch.domain().contains(p) && p.y < patch.domain().y1 ? patch.eval(p) : 1.0;
        CHECK(h.field().eval(p) == want);
    }
    CHECK(lv.epsilon == e.epsilon);
    CHECK(h.segments(1) == e.pairs());
}

TEST_CASE("hierarchy depth 2 segment count is the product of patch pair counts") {
    const Hierarchy h = build_hierarchy(HierarchyOptions{2.0, 1.0, 4, 2, 2});
    std::uint64_t expected = 0;
    for (std::size_t idx = h.levels()[2].patch_begin; idx < h.levels()[2].patch_end; ++idx) {
        const StripPatch& p = h.field().patches()[idx];
        expected += MarkedGrid(p.columns, 2).pair_count();
    }
    CHECK(h.segment_count(2) == expected);
    CHECK(h.segment_count(2) == h.segment_count(1) * MarkedGrid(h.levels()[2].columns, 2).pair_count());
    std::uint64_t enumerated = 0;
    h.for_each_segment(2, [&](const Segment& s) {
        CHECK(s.horizontal());
        ++enumerated;
    });
    CHECK(enumerated == expected);

    // Same-level neighborhoods are interior-disjoint.
    const std::vector<Rect> u = h.neighborhoods(2);
    for (std::size_t a = 0; a < u.size(); ++a)
        for (std::size_t b = 0; b < a; ++b) CHECK_FALSE(u[a].overlaps(u[b]));
}

TEST_CASE("toy hierarchy of depth 3 meets every area budget") {
    const Hierarchy h = build_hierarchy(HierarchyOptions{2.0, 1.0, 4, 2, 3});
    REQUIRE(h.levels().size() == 4);
    CHECK(h.levels()[1].columns == 4);
    CHECK(h.levels()[2].columns == 512);
    CHECK(h.levels()[3].columns == (std::uint64_t{1} << 21));
    CHECK(h.levels()[3].patch_end - h.levels()[3].patch_begin == 73728);
    for (std::size_t i = 1; i < h.levels().size(); ++i) {
        double area = 0.0;
        for (const Rect& r : h.neighborhoods(i)) area += r.area();
        CHECK(area == doctest::Approx(h.levels()[i].neighborhood_area).epsilon(1e-12));
        CHECK(area < h.levels()[i - 1].epsilon / 2.0);
        const double ratio = h.levels()[i].scale;
        CHECK(h.levels()[i].epsilon == doctest::Approx(ratio * ratio * checkerboard_epsilon(2.0, 1.0, h.levels()[i].columns)));
    }
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 20000; ++t) {
        const double v = h.field().eval({u(rng), u(rng)});
        CHECK((v == 1.0 || v == 2.0));
    }
    CHECK(h.field().integrate({0, 0, 1, 1}) > 1.0);
    CHECK(h.field().integrate({0, 0, 1, 1}) < 2.0);
}

TEST_CASE("hierarchy reports depths it cannot build") {
    CHECK_THROWS_AS(build_hierarchy(HierarchyOptions{2.0, 1.0, 4, 2, 4}), std::runtime_error);
    CHECK_THROWS_AS(build_hierarchy(HierarchyOptions{1.0, 1.0, 4, 2, 1}), ValidationError);
}

TEST_CASE("flattened fields agree with the patched original") {
    const Hierarchy h = build_hierarchy(HierarchyOptions{2.0, 0.5, 4, 2, 2});
    const DensityField flat = h.field().flattened();
    CHECK(flat.patches().empty());
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 5000; ++t) {
        const Vec2 p{u(rng), u(rng)};
        CHECK(flat.eval(p) == h.field().eval(p));
    }
    for (int t = 0; t < 100; ++t) {
        const Rect r = random_subrect(rng, flat.domain());
        if (!r.valid()) continue;
        CHECK(flat.integrate(r) == doctest::Approx(h.field().integrate(r)).epsilon(1e-12));
    }
}

TEST_CASE("limit density respects the per-square amplitude") {
    const auto squares = default_limit_squares(3);
    const DensityField f = assemble_limit_density(0.5, squares);
    CHECK(f.eval({0.95, 0.95}) == 1.0);
    CHECK(f.eval({0.0, 0.0}) == 1.0);
    std::mt19937_64 rng(9);
    for (const LimitSquare& s : squares) {
        std::uniform_real_distribution<double> ux(s.square.x0, s.square.x1), uy(s.square.y0, s.square.y1);
        const double cap = 1.0 + std::min(0.5, 1.0 / static_cast<double>(s.k));
        double seen_hi = 1.0;
        for (int t = 0; t < 20000; ++t) {
            const double v = f.eval({ux(rng), uy(rng)});
            CHECK(v >= 1.0);
            CHECK(v <= cap);
            seen_hi = std::max(seen_hi, v);
        }
        CHECK(seen_hi == cap);
    }
    std::vector<LimitSquare> bad{{{0.1, 0.1, 0.3, 0.3}, 1}, {{0.2, 0.2, 0.4, 0.4}, 2}};
    CHECK_THROWS_AS(assemble_limit_density(0.5, bad), ValidationError);
}
