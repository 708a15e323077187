#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "bknet/cli.hpp"
#include "bknet/io.hpp"

using namespace bknet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    const fs::path dir = fs::temp_directory_path() / ("bknet_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("schedule prints a passing feasibility report") {
    const Outcome r = cli({"schedule", "--L", "2", "--c", "0.1"});
    CHECK(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("claim1").at("pass").get<bool>());
    CHECK(j.at("claim2").at("pass").get<bool>());
    CHECK(j.at("claim3").at("pass").get<bool>());
    CHECK(j.at("all_pass").get<bool>());
    CHECK(j.contains("epsilon_caps"));
}

TEST_CASE("usage and validation errors exit with 2 and one diagnostic line") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"gen-net", "--K", "-1"},
             {"frobnicate"},
             {},
             {"schedule", "--L", "1"},
             {"schedule", "--L", "abc"},
             {"certify", "--in", "/nonexistent/map.json"},
             {"gen-density", "spiral"},
             {"gen-net", "--window", "0,0,1"}}) {
        const Outcome r = cli(args);
        CAPTURE(args.empty() ? std::string("<none>") : args[0]);
        CHECK(r.code == 2);
        CHECK(lines(r.err) == 1);
        CHECK(r.out.empty());
    }
    const fs::path bad = scratch() / "bad.json";
    write_file(bad.string(), "{not json");
    CHECK(cli({"certify", "--in", bad.string()}).code == 2);
}

TEST_CASE("runtime failures exit with 1") {
    const Outcome r = cli({"gen-density", "hierarchy", "--depth", "4"});
    CHECK(r.code == 1);
    CHECK(lines(r.err) == 1);
}

TEST_CASE("check-net on the bare lattice") {
    const Outcome r = cli({"check-net", "--K", "0", "--window", "0,0,8,8"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string a, b;
    std::getline(in, a);
    std::getline(in, b);
    CHECK(a == "a=1");
    REQUIRE(b.rfind("b=", 0) == 0);
    CHECK(std::stod(b.substr(2)) == doctest::Approx(0.70710678).epsilon(0.02));
}

TEST_CASE("gen-density output parses back to the same field") {
    const Outcome r = cli({"gen-density", "checkerboard", "--N", "8", "--c", "0.5"});
    REQUIRE(r.code == 0);
    CHECK(density_from_json(Json::parse(r.out)) == make_checkerboard(8, 0.5));
    const Outcome h = cli({"gen-density", "hierarchy", "--depth", "2"});
    REQUIRE(h.code == 0);
    CHECK(density_from_json(Json::parse(h.out)) == build_hierarchy(HierarchyOptions{2.0, 1.0, 4, 2, 2}).field());
    const Outcome l = cli({"gen-density", "limit", "--K", "3", "--c", "0.5"});
    REQUIRE(l.code == 0);
    CHECK(density_from_json(Json::parse(l.out)) == assemble_limit_density(0.5, default_limit_squares(3)));
}

TEST_CASE("gen-net from a plan file matches the direct construction") {
    const fs::path dir = scratch();
    CHECK(cli({"gen-density", "hierarchy", "--depth", "1", "--out", (dir / "rho.json").string()}).code == 0);
    write_file((dir / "plan.json").string(), dump(to_json(PlanSpec{"rho.json", 2, std::nullopt})));
    const Outcome a = cli({"gen-net", "--plan", (dir / "plan.json").string(), "--window", "-2,-2,20,20"});
    const Outcome b = cli({"gen-net", "--in", (dir / "rho.json").string(), "--K", "2", "--window", "-2,-2,20,20"});
    const Outcome c = cli({"gen-net", "--K", "2", "--window", "-2,-2,20,20"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    std::istringstream in(a.out);
    const auto pts = read_net_csv(in);
    const Net net = build_net(make_plan(build_hierarchy(HierarchyOptions{2.0, 1.0, 4, 2, 1}).field(), 2));
    const auto want = net.window_points({-2, -2, 20, 20});
    REQUIRE(pts.size() == want.size());
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pts[i].p == want[i].p);
}

TEST_CASE("search output is byte-identical across runs and plot leaves it untouched") {
    const fs::path dir = scratch();
    const std::string one = (dir / "one.json").string(), two = (dir / "two.json").string();
    const std::vector<std::string> base{"search", "--N", "4", "--M", "2", "--c", "1", "--L", "2", "--seed", "42",
                                        "--budget", "500"};
    auto with_out = [&](const std::string& path) {
        auto args = base;
        args.insert(args.end(), {"--out", path});
        return args;
    };
    REQUIRE(cli(with_out(one)).code == 0);
    REQUIRE(cli(with_out(two)).code == 0);
    const std::string text = read_file(one);
    CHECK(text == read_file(two));
    const SearchResult r = search_result_from_json(Json::parse(text).at("result"));
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);

    const std::string svg = (dir / "map.svg").string();
    CHECK(cli({"plot", "--in", one, "--out", svg}).code == 0);
    CHECK(read_file(one) == text);
    CHECK(read_file(svg).rfind("<svg", 0) == 0);

    const std::string csv = (dir / "net.csv").string();
    REQUIRE(cli({"gen-net", "--K", "1", "--out", csv}).code == 0);
    const std::string net_text = read_file(csv);
    CHECK(cli({"plot", "--in", csv, "--out", (dir / "net.svg").string()}).code == 0);
    CHECK(read_file(csv) == net_text);
}

TEST_CASE("certify reports the planted stretch in a serialized map") {
    const fs::path dir = scratch();
    PLMap m = PLMap::identity({0, 0, 1, 0.25}, 8, 2);
    write_file((dir / "id.json").string(), dump(to_json(m)));
    const Outcome clean = cli({"certify", "--in", (dir / "id.json").string(), "--k", "0.05"});
    REQUIRE(clean.code == 0);
    CHECK(Json::parse(clean.out).at("report").at("flagged").empty());

    m.image(3, 1) = m.image(3, 1) + Vec2{1.0 / 16.0, 0.0};
    write_file((dir / "bump.json").string(), dump(to_json(m)));
    const Outcome bump = cli({"certify", "--in", (dir / "bump.json").string(), "--k", "0.05"});
    REQUIRE(bump.code == 0);
    const Json rep = Json::parse(bump.out).at("report");
    REQUIRE(rep.at("flagged").size() == 1);
    CHECK(parse_real(rep.at("flagged")[0].at("ratio")) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("distort reads point sets from JSON") {
    const fs::path dir = scratch();
    write_file((dir / "pts.json").string(), R"({"X": [[0,0],[1,0],[2,0]], "Y": [[0,0],[1,0],[1.5,0]]})");
    const Outcome exact = cli({"distort", "--in", (dir / "pts.json").string()});
    REQUIRE(exact.code == 0);
    CHECK(parse_real(Json::parse(exact.out).at("distortion")) == 2.0);
    const Outcome greedy = cli({"distort", "--in", (dir / "pts.json").string(), "--mode", "greedy"});
    REQUIRE(greedy.code == 0);
    CHECK(parse_real(Json::parse(greedy.out).at("distortion")) >= 2.0);
    CHECK(cli({"distort", "--in", (dir / "pts.json").string(), "--mode", "fast"}).code == 2);
}
