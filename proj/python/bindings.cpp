#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bknet/cli.hpp"
#include "bknet/io.hpp"

namespace py = pybind11;
using namespace bknet;

namespace {

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(dump(j)); }

Json from_python(const py::object& o) {
    return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Rect as_rect(const std::vector<double>& v) {
    if (v.size() != 4) throw ValidationError("rectangle must be (x0, y0, x1, y1)");
    return {v[0], v[1], v[2], v[3]};
}

std::vector<Vec2> as_points(const std::vector<std::pair<double, double>>& pts) {
    std::vector<Vec2> out;
    out.reserve(pts.size());
    for (auto [x, y] : pts) out.push_back({x, y});
    return out;
}

Net make_net(const DensityField& rho, std::uint64_t count, std::optional<std::uint64_t> k0) {
    return build_net(make_plan(rho, count, k0));
}

}  // namespace

PYBIND11_MODULE(_bknet, m) {
    m.doc() = "Separated nets, checkerboard densities and stretch certificates";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    py::class_<DensityField>(m, "DensityField")
        .def("eval", [](const DensityField& f, double x, double y) { return f.eval({x, y}); })
        .def("integrate", [](const DensityField& f, const std::vector<double>& r) { return f.integrate(as_rect(r)); })
        .def_property_readonly("domain",
                               [](const DensityField& f) {
                                   const Rect d = f.domain();
                                   return std::vector<double>{d.x0, d.y0, d.x1, d.y1};
                               })
        .def("to_json", [](const DensityField& f) { return to_python(to_json(f)); })
        .def_static("from_json", [](const py::object& o) { return density_from_json(from_python(o)); });

    m.def("checkerboard", &make_checkerboard, py::arg("N"), py::arg("c"));
    m.def(
        "hierarchy",
        [](double L, double c, std::uint64_t N, std::uint64_t M, std::uint64_t depth) {
            return build_hierarchy(HierarchyOptions{L, c, N, M, depth}).field();
        },
        py::arg("L") = 2.0, py::arg("c") = 1.0, py::arg("N") = 4, py::arg("M") = 2, py::arg("depth") = 1);

    m.def(
        "schedule_constants",
        [](double L, double c) { return to_python(to_json(feasibility_report(schedule_constants(L, c)))); },
        py::arg("L"), py::arg("c"));

    m.def(
        "generate_net",
        [](const DensityField& rho, std::uint64_t K, const std::vector<double>& window,
           std::optional<std::uint64_t> k0) {
            std::vector<std::tuple<double, double, std::int64_t>> out;
            for (const NetPoint& p : make_net(rho, K, k0).window_points(as_rect(window)))
                out.emplace_back(p.p.x, p.p.y, static_cast<std::int64_t>(p.tag));
            return out;
        },
        py::arg("density"), py::arg("K"), py::arg("window"), py::arg("k0") = py::none());

    m.def(
        "check_net",
        [](const DensityField& rho, std::uint64_t K, const std::vector<double>& window,
           std::optional<std::uint64_t> k0) {
            const Net net = make_net(rho, K, k0);
            const Rect w = as_rect(window);
            py::dict d;
            d["separation"] = check_separation(net, w);
            d["covering"] = check_covering(net, w);
            return d;
        },
        py::arg("density"), py::arg("K"), py::arg("window"), py::arg("k0") = py::none());

    m.def(
        "pair_distortion",
        [](const std::vector<std::pair<double, double>>& x, const std::vector<std::pair<double, double>>& y) {
            return to_python(to_json(pair_distortion(as_points(x), as_points(y))));
        },
        py::arg("X"), py::arg("Y"));

    m.def(
        "greedy_distortion",
        [](const std::vector<std::pair<double, double>>& x, const std::vector<std::pair<double, double>>& y,
           std::uint64_t restarts, std::uint64_t seed) {
            return to_python(to_json(greedy_distortion(as_points(x), as_points(y), restarts, seed)));
        },
        py::arg("X"), py::arg("Y"), py::arg("restarts") = 8, py::arg("seed") = 0);

    m.def(
        "search_min_stretch",
        [](std::uint64_t N, std::uint64_t M, double c, double L, std::optional<double> k, std::int64_t budget,
           std::uint64_t seed) {
            CertificateConstants kc = schedule_constants(L, c);
            kc.N = N;
            kc.M = M;
            if (k) kc.k = *k;
            const SearchResult r = [&] {
                py::gil_scoped_release release;
                return search_min_stretch(make_checkerboard(N, c), kc, budget, seed);
            }();
            return to_python(to_json(r));
        },
        py::arg("N") = 4, py::arg("M") = 2, py::arg("c") = 1.0, py::arg("L") = 2.0, py::arg("k") = py::none(),
        py::arg("budget") = 10000, py::arg("seed") = 42);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
