#include "bknet/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bknet {

namespace {

Json vec_json(Vec2 v) { return Json::array({format_real(v.x), format_real(v.y)}); }

Vec2 vec_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw ValidationError("expected a 2-element point");
    return {parse_real(j[0]), parse_real(j[1])};
}

Json reals_json(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(format_real(x));
    return out;
}

std::vector<double> reals_from_json(const Json& j) {
    std::vector<double> out;
    for (const Json& x : j) out.push_back(parse_real(x));
    return out;
}

Json bools_json(const std::vector<bool>& v) {
    Json out = Json::array();
    for (bool b : v) out.push_back(b);
    return out;
}

std::vector<bool> bools_from_json(const Json& j) {
    std::vector<bool> out;
    for (const Json& x : j) out.push_back(x.get<bool>());
    return out;
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw ValidationError(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::uint64_t uint_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number_unsigned()) throw ValidationError(std::string("field '") + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

Json check_json(const ClaimCheck& c) {
    return {{"lhs", format_real(c.lhs)}, {"rhs", format_real(c.rhs)}, {"pass", c.pass},
            {"margin", format_real(c.margin)}};
}

ClaimCheck check_from_json(const Json& j) {
    return {parse_real(field(j, "lhs")), parse_real(field(j, "rhs")), field(j, "pass").get<bool>(),
            parse_real(field(j, "margin"))};
}

Json pair_json(const PairStretch& p) {
    return {{"index", p.index},
            {"pair", Json::array({vec_json(p.pair.a), vec_json(p.pair.b)})},
            {"ratio", format_real(p.ratio)}};
}

PairStretch pair_from_json(const Json& j) {
    const Json& seg = field(j, "pair");
    return {uint_field(j, "index"), {vec_from_json(seg.at(0)), vec_from_json(seg.at(1))},
            parse_real(field(j, "ratio"))};
}

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_real(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw ValidationError("expected a real number");
    const std::string& s = j.get_ref<const std::string&>();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || (errno == ERANGE && std::isinf(v)))
        throw ValidationError("malformed real '" + s + "'");
    return v;
}

Json to_json(const Rect& r) {
    return Json::array({format_real(r.x0), format_real(r.y0), format_real(r.x1), format_real(r.y1)});
}

Rect rect_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 4) throw ValidationError("expected a rectangle [x0,y0,x1,y1]");
    return {parse_real(j[0]), parse_real(j[1]), parse_real(j[2]), parse_real(j[3])};
}

Json to_json(const DensityField& f) {
    Json cells = Json::array();
    for (const DensityCell& c : f.cells())
        cells.push_back({{"rect", to_json(c.rect)}, {"value", format_real(c.value)}});
    Json out{{"domain", to_json(f.domain())}, {"default", format_real(f.default_value())}, {"cells", cells}};
    if (!f.patches().empty()) {
        Json patches = Json::array();
        for (const StripPatch& p : f.patches())
            patches.push_back({{"rect", to_json(p.rect)},
                               {"columns", p.columns},
                               {"even", format_real(p.even_value)},
                               {"odd", format_real(p.odd_value)},
                               {"parent", p.parent}});
        out["patches"] = patches;
    }
    return out;
}

DensityField density_from_json(const Json& j) {
    std::vector<DensityCell> cells;
    for (const Json& c : field(j, "cells"))
        cells.push_back({rect_from_json(field(c, "rect")), parse_real(field(c, "value"))});
    std::vector<StripPatch> patches;
    if (j.contains("patches")) {
        for (const Json& p : j.at("patches")) {
            StripPatch sp;
            sp.rect = rect_from_json(field(p, "rect"));
            sp.columns = uint_field(p, "columns");
            sp.even_value = parse_real(field(p, "even"));
            sp.odd_value = parse_real(field(p, "odd"));
            sp.parent = field(p, "parent").get<std::int64_t>();
            patches.push_back(sp);
        }
    }
    return DensityField(rect_from_json(field(j, "domain")), parse_real(field(j, "default")),
                        std::move(cells), std::move(patches));
}

Json to_json(const CertificateConstants& k) {
    return {{"L", format_real(k.L)},   {"c", format_real(k.c)},       {"N", k.N},
            {"M", k.M},                {"k", format_real(k.k)},       {"l", format_real(k.l)},
            {"m", format_real(k.m)},   {"mu", format_real(k.mu)},     {"epsilon", format_real(k.epsilon)}};
}

CertificateConstants constants_from_json(const Json& j) {
    CertificateConstants k;
    k.L = parse_real(field(j, "L"));
    k.c = parse_real(field(j, "c"));
    k.N = uint_field(j, "N");
    k.M = uint_field(j, "M");
    k.k = parse_real(field(j, "k"));
    k.l = parse_real(field(j, "l"));
    k.m = parse_real(field(j, "m"));
    k.mu = parse_real(field(j, "mu"));
    k.epsilon = parse_real(field(j, "epsilon"));
    return k;
}

Json to_json(const FeasibilityReport& r) {
    return {{"constants", to_json(r.constants)},
            {"claim1", check_json(r.claim1)},
            {"claim2", check_json(r.claim2)},
            {"claim3", check_json(r.claim3)},
            {"epsilon_caps", {{"mu", check_json(r.epsilon_mu)}, {"lipschitz", check_json(r.epsilon_lipschitz)}}},
            {"all_pass", r.all_pass()}};
}

FeasibilityReport feasibility_from_json(const Json& j) {
    FeasibilityReport r;
    r.constants = constants_from_json(field(j, "constants"));
    r.claim1 = check_from_json(field(j, "claim1"));
    r.claim2 = check_from_json(field(j, "claim2"));
    r.claim3 = check_from_json(field(j, "claim3"));
    const Json& caps = field(j, "epsilon_caps");
    r.epsilon_mu = check_from_json(field(caps, "mu"));
    r.epsilon_lipschitz = check_from_json(field(caps, "lipschitz"));
    return r;
}

Json to_json(const PLMap& map) {
    Json vertices = Json::array();
    for (const Vec2& v : map.images()) vertices.push_back(vec_json(v));
    Json out{{"nx", map.nx()}, {"ny", map.ny()}, {"domain", to_json(map.domain())}, {"vertices", vertices}};
    if (map.allow_reversal()) out["allow_reversal"] = true;
    return out;
}

PLMap plmap_from_json(const Json& j) {
    std::vector<Vec2> images;
    for (const Json& v : field(j, "vertices")) images.push_back(vec_from_json(v));
    const bool reversal = j.contains("allow_reversal") && j.at("allow_reversal").get<bool>();
    return PLMap(rect_from_json(field(j, "domain")), uint_field(j, "nx"), uint_field(j, "ny"),
                 std::move(images), reversal);
}

Json to_json(const StretchReport& r) {
    Json flagged = Json::array();
    for (const PairStretch& p : r.flagged) flagged.push_back(pair_json(p));
    Json w = Json::array();
    for (const Vec2& v : r.w) w.push_back(vec_json(v));
    return {{"A", format_real(r.a)},
            {"threshold", format_real(r.threshold)},
            {"max_ratio", format_real(r.max_ratio)},
            {"first_flagged", r.first_flagged ? pair_json(*r.first_flagged) : Json(nullptr)},
            {"flagged", flagged},
            {"ratios", reals_json(r.ratios)},
            {"w", w},
            {"w_regular", bools_json(r.w_regular)},
            {"square_regular", bools_json(r.square_regular)},
            {"regular_vectors", r.regular_vectors}};
}

StretchReport stretch_report_from_json(const Json& j) {
    StretchReport r;
    r.a = parse_real(field(j, "A"));
    r.threshold = parse_real(field(j, "threshold"));
    r.max_ratio = parse_real(field(j, "max_ratio"));
    if (!field(j, "first_flagged").is_null()) r.first_flagged = pair_from_json(j.at("first_flagged"));
    for (const Json& p : field(j, "flagged")) r.flagged.push_back(pair_from_json(p));
    r.ratios = reals_from_json(field(j, "ratios"));
    for (const Json& v : field(j, "w")) r.w.push_back(vec_from_json(v));
    r.w_regular = bools_from_json(field(j, "w_regular"));
    r.square_regular = bools_from_json(field(j, "square_regular"));
    r.regular_vectors = uint_field(j, "regular_vectors");
    return r;
}

Json to_json(const PLMetrics& m) {
    return {{"lip", format_real(m.lip)},
            {"lip_inv", format_real(m.lip_inv)},
            {"mismatch_area", format_real(m.mismatch_area)},
            {"mismatch_l1", format_real(m.mismatch_l1)},
            {"det", reals_json(m.det)},
            {"sigma_max", reals_json(m.sigma_max)},
            {"sigma_min", reals_json(m.sigma_min)},
            {"triangle_area", reals_json(m.triangle_area)},
            {"cell_image_area", reals_json(m.cell_image_area)}};
}

PLMetrics metrics_from_json(const Json& j) {
    PLMetrics m;
    m.lip = parse_real(field(j, "lip"));
    m.lip_inv = parse_real(field(j, "lip_inv"));
    m.mismatch_area = parse_real(field(j, "mismatch_area"));
    m.mismatch_l1 = parse_real(field(j, "mismatch_l1"));
    m.det = reals_from_json(field(j, "det"));
    m.sigma_max = reals_from_json(field(j, "sigma_max"));
    m.sigma_min = reals_from_json(field(j, "sigma_min"));
    m.triangle_area = reals_from_json(field(j, "triangle_area"));
    m.cell_image_area = reals_from_json(field(j, "cell_image_area"));
    return m;
}

Json to_json(const DistortionResult& r) {
    return {{"bijection", r.bijection},
            {"lip", format_real(r.lip)},
            {"lip_inv", format_real(r.lip_inv)},
            {"distortion", format_real(r.distortion)}};
}

Json to_json(const SearchResult& r) {
    return {{"objective", format_real(r.objective)},
            {"accepted", r.accepted},
            {"trace", reals_json(r.trace)},
            {"map", to_json(r.map)},
            {"metrics", to_json(r.metrics)},
            {"report", to_json(r.report)}};
}

SearchResult search_result_from_json(const Json& j) {
    return {plmap_from_json(field(j, "map")),
            stretch_report_from_json(field(j, "report")),
            metrics_from_json(field(j, "metrics")),
            reals_from_json(field(j, "trace")),
            parse_real(field(j, "objective")),
            uint_field(j, "accepted")};
}

Json to_json(const PlanSpec& p) {
    Json out{{"density_ref", p.density_ref}, {"K", p.K}};
    if (p.k0) out["k0"] = *p.k0;
    return out;
}

PlanSpec plan_spec_from_json(const Json& j) {
    PlanSpec p;
    p.density_ref = field(j, "density_ref").get<std::string>();
    p.K = uint_field(j, "K");
    if (j.contains("k0") && !j.at("k0").is_null()) p.k0 = uint_field(j, "k0");
    return p;
}

void write_net_csv(std::ostream& os, const std::vector<NetPoint>& points) {
    os << "x,y,tag\n";
    for (const NetPoint& p : points) {
        os << format_real(p.p.x) << ',' << format_real(p.p.y) << ',';
        if (p.tag == 0)
            os << "background";
        else
            os << p.tag;
        os << '\n';
    }
}

std::vector<NetPoint> read_net_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "x,y,tag") throw ValidationError("net CSV: missing header x,y,tag");
    std::vector<NetPoint> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string x, y, tag;
        if (!std::getline(row, x, ',') || !std::getline(row, y, ',') || !std::getline(row, tag))
            throw ValidationError("net CSV: malformed row '" + line + "'");
        NetPoint p{{parse_real(x), parse_real(y)}, 0};
        if (tag != "background") {
            char* end = nullptr;
            const unsigned long v = std::strtoul(tag.c_str(), &end, 10);
            if (tag.empty() || *end != '\0' || v == 0) throw ValidationError("net CSV: bad tag '" + tag + "'");
            p.tag = static_cast<std::uint32_t>(v);
        }
        out.push_back(p);
    }
    return out;
}

std::string svg_scatter(const std::vector<NetPoint>& points, const Rect& window) {
    require_valid(window, "svg_scatter window");
    const double span = std::max(window.width(), window.height());
    const double r = span / 400.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << svg_num(window.x0) << ' '
       << svg_num(-window.y1) << ' ' << svg_num(window.width()) << ' ' << svg_num(window.height())
       << "\" width=\"800\" height=\"" << svg_num(800.0 * window.height() / window.width()) << "\">\n";
    os << "<rect x=\"" << svg_num(window.x0) << "\" y=\"" << svg_num(-window.y1) << "\" width=\""
       << svg_num(window.width()) << "\" height=\"" << svg_num(window.height()) << "\" fill=\"white\"/>\n";
    for (const NetPoint& p : points) {
        if (!window.contains(p.p)) continue;
        os << "<circle cx=\"" << svg_num(p.p.x) << "\" cy=\"" << svg_num(-p.p.y) << "\" r=\"" << svg_num(r)
           << "\" fill=\"" << (p.tag == 0 ? "#888888" : "#c0392b") << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_mesh(const PLMap& map) {
    Rect box{map.images()[0].x, map.images()[0].y, map.images()[0].x, map.images()[0].y};
    for (const Vec2& v : map.images()) {
        box.x0 = std::min(box.x0, v.x);
        box.y0 = std::min(box.y0, v.y);
        box.x1 = std::max(box.x1, v.x);
        box.y1 = std::max(box.y1, v.y);
    }
    const double pad = 0.05 * std::max(box.width(), box.height());
    box = {box.x0 - pad, box.y0 - pad, box.x1 + pad, box.y1 + pad};
    const double stroke = std::max(box.width(), box.height()) / 800.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << svg_num(box.x0) << ' ' << svg_num(-box.y1)
       << ' ' << svg_num(box.width()) << ' ' << svg_num(box.height()) << "\" width=\"800\" height=\""
       << svg_num(800.0 * box.height() / box.width()) << "\">\n";
    os << "<g fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"" << svg_num(stroke) << "\">\n";
    auto pt = [&](std::uint64_t i, std::uint64_t j) {
        const Vec2 v = map.image(i, j);
        return svg_num(v.x) + "," + svg_num(-v.y);
    };
    for (std::uint64_t j = 0; j < map.ny(); ++j) {
        for (std::uint64_t i = 0; i < map.nx(); ++i) {
            os << "<polygon points=\"" << pt(i, j) << ' ' << pt(i + 1, j) << ' ' << pt(i + 1, j + 1)
               << "\"/>\n";
            os << "<polygon points=\"" << pt(i, j) << ' ' << pt(i + 1, j + 1) << ' ' << pt(i, j + 1)
               << "\"/>\n";
        }
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Json read_json_file(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError("malformed JSON in '" + path + "': " + e.what());
    }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace bknet
