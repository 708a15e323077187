#pragma once

// JSON, CSV and SVG forms of the artifacts. Reals are written as decimal
// strings with 17 significant digits so every double reads back unchanged.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bknet/certificate.hpp"
#include "bknet/density.hpp"
#include "bknet/distortion.hpp"
#include "bknet/net.hpp"

namespace bknet {

using Json = nlohmann::ordered_json;

std::string format_real(double v);
/// Accepts a decimal string or a JSON number.
double parse_real(const Json& j);

Json to_json(const Rect& r);
Rect rect_from_json(const Json& j);

Json to_json(const DensityField& field);
DensityField density_from_json(const Json& j);

Json to_json(const CertificateConstants& k);
CertificateConstants constants_from_json(const Json& j);

Json to_json(const FeasibilityReport& r);
FeasibilityReport feasibility_from_json(const Json& j);

Json to_json(const PLMap& map);
PLMap plmap_from_json(const Json& j);

Json to_json(const StretchReport& r);
StretchReport stretch_report_from_json(const Json& j);

Json to_json(const PLMetrics& m);
PLMetrics metrics_from_json(const Json& j);

Json to_json(const DistortionResult& r);

/// Experiment report: final map, stretch report, metrics, objective trace.
Json to_json(const SearchResult& r);
SearchResult search_result_from_json(const Json& j);

/// {density_ref, K, k0}; density_ref is resolved relative to `base_dir`.
struct PlanSpec {
    std::string density_ref;
    std::uint64_t K = 0;
    std::optional<std::uint64_t> k0;
};
Json to_json(const PlanSpec& p);
PlanSpec plan_spec_from_json(const Json& j);

void write_net_csv(std::ostream& os, const std::vector<NetPoint>& points);
std::vector<NetPoint> read_net_csv(std::istream& is);

std::string svg_scatter(const std::vector<NetPoint>& points, const Rect& window);
std::string svg_mesh(const PLMap& map);

/// Missing or unreadable files raise ValidationError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);
Json read_json_file(const std::string& path);
/// Two-space indented JSON with a trailing newline.
std::string dump(const Json& j);

}  // namespace bknet
