#include "bknet/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "bknet/io.hpp"

namespace bknet {

namespace {

struct Options {
    double L = 2.0;
    double c = 1.0;
    std::uint64_t N = 4;
    std::uint64_t M = 2;
    std::int64_t K = 3;
    std::optional<std::uint64_t> depth;
    std::uint64_t seed = 0;
    std::int64_t budget = 10000;
    std::uint64_t restarts = 8;
    std::optional<std::uint64_t> k0;
    std::optional<double> k;
    std::optional<std::uint64_t> grid_n;
    std::optional<std::uint64_t> grid_m;
    std::string window;
    std::string in;
    std::string plan;
    std::string out;
    std::string kind;
    std::string mode = "exact";
    double step = 1.0 / 64.0;
};

Rect parse_window(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) v.push_back(parse_real(Json(part)));
    if (v.size() != 4) throw ValidationError("--window expects x0,y0,x1,y1");
    return require_valid(Rect{v[0], v[1], v[2], v[3]}, "--window");
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
    if (o.out.empty())
        out << text;
    else
        write_file(o.out, text);
}

NetPlan load_plan(const Options& o) {
    if (o.K < 0) throw ValidationError("--K must be >= 0");
    if (!o.plan.empty()) {
        const PlanSpec spec = plan_spec_from_json(read_json_file(o.plan));
        const std::filesystem::path base = std::filesystem::path(o.plan).parent_path();
        const DensityField d = density_from_json(read_json_file((base / spec.density_ref).string()));
        return make_plan(d, spec.K, spec.k0);
    }
    if (!o.in.empty()) return make_plan(density_from_json(read_json_file(o.in)), static_cast<std::uint64_t>(o.K), o.k0);
    HierarchyOptions h;
    h.L = o.L;
    h.c = o.c;
    h.N = o.N;
    h.M = o.M;
    h.depth = 1;
    return make_plan(build_hierarchy(h).field(), static_cast<std::uint64_t>(o.K), o.k0);
}

/// S_1 and S_2 with a margin of 2, or [0,8]^2 for the bare lattice.
Rect default_window(const NetPlan& plan) {
    if (plan.schedule.empty()) return {0.0, 0.0, 8.0, 8.0};
    Rect w = plan.schedule.front().square;
    const Rect& last = plan.schedule[std::min<std::size_t>(1, plan.schedule.size() - 1)].square;
    w = {std::min(w.x0, last.x0) - 2.0, std::min(w.y0, last.y0) - 2.0, std::max(w.x1, last.x1) + 2.0,
         std::max(w.y1, last.y1) + 2.0};
    return w;
}

Rect window_of(const Options& o, const NetPlan& plan) {
    return o.window.empty() ? default_window(plan) : parse_window(o.window);
}

int cmd_gen_density(const Options& o, std::ostream& out) {
    DensityField field = DensityField::constant({0, 0, 1, 1}, 1.0);
    if (o.kind == "checkerboard") {
        field = make_checkerboard(o.N, o.c);
    } else if (o.kind == "hierarchy") {
        HierarchyOptions h;
        h.L = o.L;
        h.c = o.c;
        h.N = o.N;
        h.M = o.M;
        h.depth = o.depth.value_or(1);
        field = build_hierarchy(h).field();
    } else if (o.kind == "limit") {
        if (o.K < 0) throw ValidationError("--K must be >= 0");
        LimitOptions lo;
        lo.N = o.N;
        lo.M = o.M;
        if (o.depth) lo.max_depth = *o.depth;
        field = assemble_limit_density(o.c, default_limit_squares(static_cast<std::uint64_t>(o.K)), lo);
    } else {
        throw ValidationError("gen-density: kind must be checkerboard, hierarchy or limit");
    }
    emit(o, out, dump(to_json(field)));
    return 0;
}

int cmd_gen_net(const Options& o, std::ostream& out) {
    const NetPlan plan = load_plan(o);
    const Rect window = window_of(o, plan);
    const Net net = build_net(plan);
    std::ostringstream csv;
    write_net_csv(csv, net.window_points(window));
    emit(o, out, csv.str());
    return 0;
}

int cmd_check_net(const Options& o, std::ostream& out) {
    const NetPlan plan = load_plan(o);
    const Rect window = window_of(o, plan);
    const Net net = build_net(plan);
    std::ostringstream os;
    os << "a=" << format_real(check_separation(net, window)) << '\n';
    os << "b=" << format_real(check_covering(net, window, o.step)) << '\n';
    for (std::size_t k = 1; k <= plan.schedule.size(); ++k) {
        const std::vector<CellMeasure> cells = measure_report(net, k);
        double max_error = 0.0;
        double max_relative = 0.0;
        bool floor_ok = true;
        for (const CellMeasure& c : cells) {
            max_error = std::max(max_error, c.error);
            max_relative = std::max(max_relative, c.relative_bound());
            floor_ok = floor_ok && c.error <= c.bound();
        }
        os << "k=" << k << " cells=" << cells.size() << " points=" << net.square_point_count(k)
           << " max_error=" << format_real(max_error) << " floor_bound=" << (floor_ok ? "ok" : "violated")
           << " max_relative_bound=" << format_real(max_relative) << '\n';
    }
    emit(o, out, os.str());
    return 0;
}

int cmd_schedule(const Options& o, std::ostream& out) {
    emit(o, out, dump(to_json(feasibility_report(schedule_constants(o.L, o.c)))));
    return 0;
}

int cmd_certify(const Options& o, std::ostream& out) {
    if (o.in.empty()) throw ValidationError("certify: --in PLMap JSON is required");
    const Json doc = read_json_file(o.in);
    const PLMap map = plmap_from_json(doc.contains("map") ? doc.at("map") : doc);
    CertificateConstants k = schedule_constants(o.L, o.c);
    k.M = o.grid_m.value_or(map.ny());
    if (k.M == 0 || map.nx() % k.M != 0) throw ValidationError("certify: cannot infer N from the map grid; pass --N");
    k.N = o.grid_n.value_or(map.nx() / k.M);
    if (o.k) k.k = *o.k;
    const StretchReport r = evaluate_stretch([&](Vec2 p) { return map(p); }, MarkedGrid(k.N, k.M), k);
    Json j{{"N", k.N}, {"M", k.M}, {"k", format_real(k.k)}, {"report", to_json(r)}};
    emit(o, out, dump(j));
    return 0;
}

std::vector<Vec2> points_from_json(const Json& j) {
    std::vector<Vec2> out;
    for (const Json& p : j) {
        if (!p.is_array() || p.size() != 2) throw ValidationError("distort: points must be [x, y]");
        out.push_back({parse_real(p[0]), parse_real(p[1])});
    }
    return out;
}

int cmd_distort(const Options& o, std::ostream& out) {
    if (o.in.empty()) throw ValidationError("distort: --in JSON {X, Y} is required");
    const Json doc = read_json_file(o.in);
    if (!doc.contains("X") || !doc.contains("Y")) throw ValidationError("distort: input needs X and Y");
    const std::vector<Vec2> x = points_from_json(doc.at("X"));
    const std::vector<Vec2> y = points_from_json(doc.at("Y"));
    DistortionResult r;
    if (o.mode == "exact")
        r = pair_distortion(x, y);
    else if (o.mode == "greedy")
        r = greedy_distortion(x, y, o.restarts, o.seed);
    else
        throw ValidationError("distort: --mode must be exact or greedy");
    Json j = to_json(r);
    j["mode"] = o.mode;
    emit(o, out, dump(j));
    return 0;
}

int cmd_search(const Options& o, std::ostream& out) {
    CertificateConstants k = schedule_constants(o.L, o.c);
    k.N = o.N;
    k.M = o.M;
    if (o.k) k.k = *o.k;
    const SearchResult r = search_min_stretch(make_checkerboard(o.N, o.c), k, o.budget, o.seed);
    Json j{{"N", k.N}, {"M", k.M}, {"L", format_real(k.L)}, {"c", format_real(k.c)}, {"k", format_real(k.k)},
           {"seed", o.seed}, {"budget", o.budget}};
    j["result"] = to_json(r);
    emit(o, out, dump(j));
    return 0;
}

int cmd_plot(const Options& o, std::ostream& out) {
    if (o.in.empty()) throw ValidationError("plot: --in is required");
    const std::string ext = std::filesystem::path(o.in).extension().string();
    if (ext == ".csv") {
        std::istringstream is(read_file(o.in));
        const std::vector<NetPoint> pts = read_net_csv(is);
        Rect window;
        if (!o.window.empty()) {
            window = parse_window(o.window);
        } else {
            if (pts.empty()) throw ValidationError("plot: empty net and no --window");
            window = {pts[0].p.x, pts[0].p.y, pts[0].p.x, pts[0].p.y};
            for (const NetPoint& p : pts)
                window = {std::min(window.x0, p.p.x), std::min(window.y0, p.p.y), std::max(window.x1, p.p.x),
                          std::max(window.y1, p.p.y)};
            window = {window.x0 - 1.0, window.y0 - 1.0, window.x1 + 1.0, window.y1 + 1.0};
        }
        emit(o, out, svg_scatter(pts, window));
        return 0;
    }
    Json doc = read_json_file(o.in);
    if (doc.contains("result")) doc = doc.at("result");
    emit(o, out, svg_mesh(plmap_from_json(doc.contains("map") ? doc.at("map") : doc)));
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Separated nets, checkerboard densities and stretch certificates", "bknet"};
    app.require_subcommand(1);
    Options o;

    auto window_opt = [&](CLI::App* s) { s->add_option("--window", o.window, "x0,y0,x1,y1"); };
    auto plan_opts = [&](CLI::App* s) {
        s->add_option("--in", o.in, "density JSON on [0,1]^2");
        s->add_option("--plan", o.plan, "plan JSON {density_ref, K, k0}");
        s->add_option("--K", o.K, "number of scheduled squares");
        s->add_option("--k0", o.k0, "offset of the side schedule");
        s->add_option("--c", o.c, "amplitude of the default density");
        s->add_option("--L", o.L);
        s->add_option("--N", o.N);
        s->add_option("--M", o.M);
        window_opt(s);
        s->add_option("--out", o.out);
    };

    CLI::App* gen_density = app.add_subcommand("gen-density", "write a density field as JSON");
    gen_density->add_option("kind", o.kind, "checkerboard | hierarchy | limit")->required();
    gen_density->add_option("--N", o.N);
    gen_density->add_option("--M", o.M);
    gen_density->add_option("--c", o.c);
    gen_density->add_option("--L", o.L);
    gen_density->add_option("--depth", o.depth);
    gen_density->add_option("--K", o.K, "number of limit squares");
    gen_density->add_option("--out", o.out);

    CLI::App* gen_net = app.add_subcommand("gen-net", "write the net points in a window as CSV");
    plan_opts(gen_net);

    CLI::App* check_net = app.add_subcommand("check-net", "separation, covering and measure report");
    plan_opts(check_net);
    check_net->add_option("--step", o.step, "covering sample spacing");

    CLI::App* schedule = app.add_subcommand("schedule", "feasible certificate constants as JSON");
    schedule->add_option("--L", o.L);
    schedule->add_option("--c", o.c);
    schedule->add_option("--out", o.out);

    CLI::App* certify = app.add_subcommand("certify", "stretch report for a serialized PL map");
    certify->add_option("--in", o.in)->required();
    certify->add_option("--L", o.L);
    certify->add_option("--c", o.c);
    certify->add_option("--N", o.grid_n);
    certify->add_option("--M", o.grid_m);
    certify->add_option("--k", o.k, "stretch gain (default: scheduled)");
    certify->add_option("--out", o.out);

    CLI::App* distort = app.add_subcommand("distort", "distortion between two point sets");
    distort->add_option("--in", o.in, "JSON {X: [[x,y],...], Y: [...]}")->required();
    distort->add_option("--mode", o.mode, "exact | greedy");
    distort->add_option("--restarts", o.restarts);
    distort->add_option("--seed", o.seed);
    distort->add_option("--out", o.out);

    CLI::App* search = app.add_subcommand("search", "stretch-minimizing PL map search");
    search->add_option("--N", o.N);
    search->add_option("--M", o.M);
    search->add_option("--c", o.c);
    search->add_option("--L", o.L);
    search->add_option("--k", o.k);
    search->add_option("--seed", o.seed);
    search->add_option("--budget", o.budget);
    search->add_option("--out", o.out);

    CLI::App* plot = app.add_subcommand("plot", "SVG of a net CSV or a PL map JSON");
    plot->add_option("--in", o.in)->required();
    window_opt(plot);
    plot->add_option("--out", o.out);

    if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
        const auto subs = app.get_subcommands([](CLI::App*) { return true; });
        const bool known = std::any_of(subs.begin(), subs.end(),
                                       [&](const CLI::App* s) { return s->get_name() == args[0]; });
        if (!known) {
            err << "bknet: error: unknown command '" << args[0] << "'\n";
            return 2;
        }
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "bknet: error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*gen_density) return cmd_gen_density(o, out);
        if (*gen_net) return cmd_gen_net(o, out);
        if (*check_net) return cmd_check_net(o, out);
        if (*schedule) return cmd_schedule(o, out);
        if (*certify) return cmd_certify(o, out);
        if (*distort) return cmd_distort(o, out);
        if (*search) return cmd_search(o, out);
        if (*plot) return cmd_plot(o, out);
    } catch (const ValidationError& e) {
        err << "bknet: error: " << e.what() << '\n';
        return 2;
    } catch (const Json::exception& e) {
        err << "bknet: error: malformed input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "bknet: runtime error: " << e.what() << '\n';
        return 1;
    }
    err << "bknet: error: no command\n";
    return 2;
}

}  // namespace bknet
