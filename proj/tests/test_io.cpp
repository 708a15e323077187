#include <doctest.h>

#include <cstring>
#include <random>
#include <sstream>

#include "bknet/io.hpp"

using namespace bknet;

namespace {

template <class T, class Parse>
void check_round_trip(const T& value, Parse parse) {
    const std::string text = dump(to_json(value));
    const T back = parse(Json::parse(text));
    CHECK(dump(to_json(back)) == text);
}

}  // namespace

TEST_CASE("reals survive a decimal round trip bit for bit") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20000; ++t) {
        std::uint64_t bits = rng();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v)) continue;
        const double back = parse_real(Json(format_real(v)));
        CHECK(std::memcmp(&v, &back, sizeof v) == 0);
    }
    CHECK(parse_real(Json(0.5)) == 0.5);
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK_THROWS_AS(parse_real(Json("1.5x")), ValidationError);
    CHECK_THROWS_AS(parse_real(Json(true)), ValidationError);
}

TEST_CASE("density fields round trip") {
    for (const DensityField& f :
         {make_checkerboard(8, 0.5), build_hierarchy(HierarchyOptions{2.0, 1.0, 4, 2, 2}).field(),
          assemble_limit_density(0.5, default_limit_squares(3)),
          DensityField({0, 0, 1, 1}, 1.0, {{{0, 0, 0.5, 0.5}, 3.0}})}) {
        const DensityField back = density_from_json(Json::parse(dump(to_json(f))));
        CHECK(back == f);
    }
    CHECK_THROWS_AS(density_from_json(Json::parse(R"({"domain": ["0","0","1","1"]})")), ValidationError);
}

TEST_CASE("PL maps round trip") {
    PLMap m = PLMap::linear({0, 0, 1, 0.25}, 8, 2, 1.1, 0.3, -0.2, 0.9);
    m.image(3, 1) = m.image(3, 1) + Vec2{1e-17, 3.3e-9};
    CHECK(plmap_from_json(Json::parse(dump(to_json(m)))) == m);
    const PLMap r({0, 0, 1, 1}, 1, 1, {{0, 0}, {-1, 0}, {0, 1}, {-1, 1}}, true);
    CHECK(plmap_from_json(to_json(r)) == r);
    CHECK_THROWS_AS(plmap_from_json(Json::parse(R"({"nx": 1, "ny": 1, "domain": ["0","0","1","1"], "vertices": []})")),
                    ValidationError);
}

TEST_CASE("reports round trip") {
    const CertificateConstants k = schedule_constants(2.0, 0.1);
    check_round_trip(feasibility_report(k), feasibility_from_json);

    CertificateConstants toy = k;
    toy.N = 4;
    toy.M = 2;
    toy.k = 0.05;
    const MarkedGrid g(4, 2);
    const Vec2 v = g.vertex(3, 1);
    const StretchReport s = evaluate_stretch([&](Vec2 p) { return p == v ? p + Vec2{0.0625, 0} : p; }, g, toy);
    REQUIRE(s.first_flagged);
    check_round_trip(s, stretch_report_from_json);

    const SearchResult r = search_min_stretch(make_checkerboard(4, 1.0), toy, 200, 7);
    check_round_trip(r, search_result_from_json);
    const SearchResult back = search_result_from_json(to_json(r));
    CHECK(back.map == r.map);
    CHECK(back.trace == r.trace);
    CHECK(back.report.ratios == r.report.ratios);
    CHECK(back.metrics.det == r.metrics.det);
}

TEST_CASE("net CSV round trips") {
    const Net net = build_net(make_plan(build_hierarchy(HierarchyOptions{2.0, 1.0, 4, 2, 1}).field(), 2));
    const auto pts = net.window_points({-2, -2, 30, 30});
    std::stringstream ss;
    write_net_csv(ss, pts);
    const std::string text = ss.str();
    CHECK(text.rfind("x,y,tag\n", 0) == 0);
    CHECK(text.find(",background\n") != std::string::npos);
    CHECK(text.find(",1\n") != std::string::npos);
    std::istringstream in(text);
    const auto back = read_net_csv(in);
    REQUIRE(back.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(back[i].p == pts[i].p);
        CHECK(back[i].tag == pts[i].tag);
    }
    std::istringstream bad("x,y\n1,2\n");
    CHECK_THROWS_AS(read_net_csv(bad), ValidationError);
    std::istringstream bad_tag("x,y,tag\n1,2,zero\n");
    CHECK_THROWS_AS(read_net_csv(bad_tag), ValidationError);
}

TEST_CASE("plan specs round trip") {
    PlanSpec p{"density.json", 3, 1};
    const PlanSpec back = plan_spec_from_json(Json::parse(dump(to_json(p))));
    CHECK(back.density_ref == p.density_ref);
    CHECK(back.K == 3);
    CHECK(back.k0 == std::optional<std::uint64_t>(1));
    CHECK_FALSE(plan_spec_from_json(Json::parse(R"({"density_ref": "d.json", "K": 2})")).k0);
    CHECK_THROWS_AS(plan_spec_from_json(Json::parse(R"({"density_ref": "d.json", "K": -2})")), ValidationError);
}

TEST_CASE("SVG output is self-contained") {
    const std::vector<NetPoint> pts{{{0.5, 0.5}, 0}, {{1.5, 0.5}, 1}};
    const std::string a = svg_scatter(pts, {0, 0, 2, 1});
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("href") == std::string::npos);
    CHECK(a.find("<circle") != std::string::npos);
    const std::string b = svg_mesh(PLMap::identity({0, 0, 1, 0.25}, 8, 2));
    CHECK(b.find("href") == std::string::npos);
    CHECK(b.find("<polygon") != std::string::npos);
    CHECK(b.find("</svg>") != std::string::npos);
}

TEST_CASE("missing files are validation errors") {
    CHECK_THROWS_AS(read_file("/nonexistent/file.json"), ValidationError);
    CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), ValidationError);
}
