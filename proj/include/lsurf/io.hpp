#pragma once

#include <string>
#include <vector>

#include "lsurf/geometry.hpp"
#include "lsurf/shooting.hpp"
#include "lsurf/verify.hpp"

namespace lsurf {

// Write content to path via a temp file and rename, so readers never observe
// a partial file. Throws IoError with the path in the message.
void atomic_write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// CSV, header "s,x,z,theta", 17 significant digits per field.
std::string render_profile_csv(const std::vector<ProfilePoint>& pts);
std::vector<ProfilePoint> parse_profile_csv(const std::string& text);
void write_profile_csv(const std::string& path, const std::vector<ProfilePoint>& pts);
std::vector<ProfilePoint> read_profile_csv(const std::string& path);

// Wavefront OBJ, v/f records only, 1-based face indices.
std::string render_mesh_obj(const RevolutionMesh& mesh);
RevolutionMesh parse_mesh_obj(const std::string& text);
void write_mesh_obj(const std::string& path, const RevolutionMesh& mesh);
RevolutionMesh read_mesh_obj(const std::string& path);

// A labeled point drawn on the SVG plot.
struct SvgMark {
    std::string label;
    double x = 0.0;
    double z = 0.0;
};

// Closed profile plot: polyline, coordinate axes, labeled marks. The viewBox
// fits the profile bounding box with a 5% margin.
std::string render_profile_svg(const std::vector<ProfilePoint>& pts,
                               const std::vector<SvgMark>& marks);
void write_profile_svg(const std::string& path, const std::vector<ProfilePoint>& pts,
                       const std::vector<SvgMark>& marks);

// Standard marks for a closed profile: s1, s_m, s2 and the self-intersections.
std::vector<SvgMark> profile_marks(const ClosedProfile& profile,
                                   const IntersectionReport& intersections);

// One shot plus the checks evaluated on it.
struct ShotRecord {
    ShotReport shot;
    std::vector<CheckResult> checks;
};

// JSON reports. All doubles serialize with round-trip precision; key order is
// deterministic, so identical inputs give bitwise-identical reports.
std::string render_shot_report(const Params& p, const ShotRecord& rec);

// Sweep report: one record per (check_id, b), sorted by that key.
std::string render_sweep_report(const Params& p, const std::vector<ShotRecord>& recs);

// Full critical-height pipeline report.
struct FindReport {
    Params params;
    FindResult result;
    std::vector<CheckResult> checks;  // check_b0 followed by the lemma checks at b0
    IntersectionReport intersections;
    ResidualScan residual_first;
    ResidualScan residual_second;
};
std::string render_find_report(const FindReport& fr);

// Exact-solution residual report for the special solutions at given params.
struct SpecialRecord {
    std::string name;       // sphere, cylinder, plane
    double radius = 0.0;    // 0 for the plane
    double max_residual = 0.0;
    std::size_t samples = 0;
};
std::string render_special_report(const Params& p, const std::vector<SpecialRecord>& recs);

// Output manifest: every artifact a CLI run wrote, with the parameters that
// produced it. The timestamp lives only here.
struct ManifestEntry {
    std::string path;    // relative to the manifest directory
    std::string kind;    // profile_csv, profile_svg, mesh_obj, report
};
std::string render_manifest(const Params& p, const std::string& command,
                            const std::vector<ManifestEntry>& entries,
                            const std::string& timestamp);

}  // namespace lsurf
