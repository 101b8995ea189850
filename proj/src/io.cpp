#include "lsurf/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "lsurf/errors.hpp"

namespace lsurf {

using nlohmann::json;

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& field, const std::string& where) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || errno == ERANGE)
        throw IoError("bad numeric field '" + field + "' in " + where);
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

json state_json(const CurveState& st) {
    return {{"s", st.s}, {"x", st.x}, {"z", st.z}, {"theta", st.theta}};
}

json event_json(const Event& ev) {
    json j = {{"kind", to_string(ev.kind)}, {"state", state_json(ev.state)}};
    if (ev.theta_target != 0.0) j["theta_target"] = ev.theta_target;
    return j;
}

json params_json(const Params& p) {
    return {{"n", p.n},
            {"lambda", p.lambda},
            {"rel_tol", p.rel_tol},
            {"abs_tol", p.abs_tol},
            {"event_tol_s", p.event_tol_s},
            {"axis_eps", p.axis_eps},
            {"max_step", p.max_step},
            {"z_ceiling", p.z_ceiling},
            {"s_max", p.s_max},
            {"sphere_radius", p.sphere_radius()},
            {"cylinder_radius", p.cylinder_radius()},
            {"conjugate_cylinder_radius", p.conjugate_cylinder_radius()}};
}

json check_json(const CheckResult& c) {
    return {{"check_id", c.check_id}, {"statement", c.statement}, {"b", c.b},
            {"n", c.n},               {"lambda", c.lambda},       {"passed", c.passed},
            {"skipped", c.skipped},   {"margin", c.margin},       {"detail", c.detail}};
}

json branch_json(const DenseBranch& br) {
    return {{"s_begin", br.s_begin()},
            {"s_end", br.s_end()},
            {"nodes", br.states.size()},
            {"analytic", br.kind == BranchKind::Analytic}};
}

json shot_json(const ShotReport& r) {
    json j;
    j["b"] = r.b;
    j["terminal"] = to_string(r.terminal);
    j["anomaly"] = r.anomaly;
    j["regime_warning"] = r.regime_warning;
    j["positive"] = r.positive();
    j["shoot_value"] = r.shoot_value() ? json(*r.shoot_value()) : json(nullptr);
    j["first"] = branch_json(r.first);
    j["second"] = r.second ? branch_json(*r.second) : json(nullptr);
    j["s1"] = r.s1 ? event_json(*r.s1) : json(nullptr);
    j["s_m"] = r.sm ? event_json(*r.sm) : json(nullptr);
    j["s2"] = r.s2 ? event_json(*r.s2) : json(nullptr);
    j["x_at_axis"] = r.x_at_axis ? json(*r.x_at_axis) : json(nullptr);
    json crossings = json::array();
    for (const Event& ev : r.z_axis_crossings) crossings.push_back(event_json(ev));
    j["z_axis_crossings"] = crossings;
    return j;
}

json crossing_json(const Crossing& cr) {
    return {{"x", cr.x}, {"z", cr.z}, {"t_a", cr.t_a}, {"t_b", cr.t_b}, {"angle", cr.angle}};
}

json gridpoint_json(const GridPoint& g) {
    return {{"b", g.b},
            {"class", to_string(g.cls)},
            {"positive", g.positive},
            {"shoot_value", g.shoot_value ? json(*g.shoot_value) : json(nullptr)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open '" + tmp + "' for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw IoError("short write to '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

std::string read_text(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string render_profile_csv(const std::vector<ProfilePoint>& pts) {
    std::string out = "s,x,z,theta\n";
    for (const ProfilePoint& pt : pts)
        out += g17(pt.t) + "," + g17(pt.x) + "," + g17(pt.z) + "," + g17(pt.theta) + "\n";
    return out;
}

std::vector<ProfilePoint> parse_profile_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "s,x,z,theta")
        throw IoError("profile CSV: missing 's,x,z,theta' header");
    std::vector<ProfilePoint> pts;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 4)
            throw IoError("profile CSV: expected 4 fields on line " + std::to_string(lineno));
        const std::string where = "profile CSV line " + std::to_string(lineno);
        ProfilePoint pt;
        pt.t = parse_double(fields[0], where);
        pt.x = parse_double(fields[1], where);
        pt.z = parse_double(fields[2], where);
        pt.theta = parse_double(fields[3], where);
        pts.push_back(pt);
    }
    return pts;
}

void write_profile_csv(const std::string& path, const std::vector<ProfilePoint>& pts) {
    atomic_write_text(path, render_profile_csv(pts));
}

std::vector<ProfilePoint> read_profile_csv(const std::string& path) {
    return parse_profile_csv(read_text(path));
}

std::string render_mesh_obj(const RevolutionMesh& mesh) {
    std::string out;
    out.reserve(mesh.vertices.size() * 60 + mesh.triangles.size() * 24);
    for (const auto& v : mesh.vertices)
        out += "v " + g17(v[0]) + " " + g17(v[1]) + " " + g17(v[2]) + "\n";
    for (const auto& t : mesh.triangles)
        out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " +
               std::to_string(t[2] + 1) + "\n";
    return out;
}

RevolutionMesh parse_mesh_obj(const std::string& text) {
    RevolutionMesh mesh;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string rec;
        ls >> rec;
        if (rec == "v") {
            std::array<double, 3> v{};
            if (!(ls >> v[0] >> v[1] >> v[2]))
                throw IoError("OBJ: bad vertex on line " + std::to_string(lineno));
            mesh.vertices.push_back(v);
        } else if (rec == "f") {
            std::array<long long, 3> f{};
            if (!(ls >> f[0] >> f[1] >> f[2]))
                throw IoError("OBJ: bad face on line " + std::to_string(lineno));
            for (long long idx : f)
                if (idx < 1 || static_cast<std::size_t>(idx) > mesh.vertices.size())
                    throw IoError("OBJ: face index out of range on line " +
                                  std::to_string(lineno));
            mesh.triangles.push_back({static_cast<std::size_t>(f[0] - 1),
                                      static_cast<std::size_t>(f[1] - 1),
                                      static_cast<std::size_t>(f[2] - 1)});
        } else {
            throw IoError("OBJ: unsupported record '" + rec + "' on line " +
                          std::to_string(lineno));
        }
    }
    return mesh;
}

void write_mesh_obj(const std::string& path, const RevolutionMesh& mesh) {
    atomic_write_text(path, render_mesh_obj(mesh));
}

RevolutionMesh read_mesh_obj(const std::string& path) {
    return parse_mesh_obj(read_text(path));
}

std::string render_profile_svg(const std::vector<ProfilePoint>& pts,
                               const std::vector<SvgMark>& marks) {
    if (pts.empty()) throw IoError("SVG: empty profile");
    double x0 = pts[0].x, x1 = pts[0].x, z0 = pts[0].z, z1 = pts[0].z;
    for (const ProfilePoint& pt : pts) {
        x0 = std::min(x0, pt.x);
        x1 = std::max(x1, pt.x);
        z0 = std::min(z0, pt.z);
        z1 = std::max(z1, pt.z);
    }
    const double pad_x = 0.05 * std::max(x1 - x0, 1e-9);
    const double pad_z = 0.05 * std::max(z1 - z0, 1e-9);
    x0 -= pad_x;
    x1 += pad_x;
    z0 -= pad_z;
    z1 += pad_z;
    // SVG y grows downward: plot (x, -z).
    const double w = x1 - x0, h = z1 - z0;
    const double dim = std::max(w, h);

    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(x0) << " " << num(-z1)
       << " " << num(w) << " " << num(h) << "\">\n";
    // coordinate axes
    os << "  <g stroke=\"#999999\" stroke-width=\"" << num(dim * 0.003) << "\">\n";
    if (x0 < 0.0 && x1 > 0.0)
        os << "    <line x1=\"0\" y1=\"" << num(-z1) << "\" x2=\"0\" y2=\"" << num(-z0)
           << "\"/>\n";
    if (z0 < 0.0 && z1 > 0.0)
        os << "    <line x1=\"" << num(x0) << "\" y1=\"0\" x2=\"" << num(x1) << "\" y2=\"0\"/>\n";
    os << "  </g>\n";
    os << "  <path fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"" << num(dim * 0.006)
       << "\" d=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
        os << (i == 0 ? "M" : " L") << num(pts[i].x) << " " << num(-pts[i].z);
    os << "\"/>\n";
    for (const SvgMark& m : marks) {
        os << "  <circle cx=\"" << num(m.x) << "\" cy=\"" << num(-m.z) << "\" r=\""
           << num(dim * 0.009) << "\" fill=\"#d62728\"/>\n";
        os << "  <text x=\"" << num(m.x + dim * 0.015) << "\" y=\"" << num(-m.z - dim * 0.01)
           << "\" font-size=\"" << num(dim * 0.035) << "\" fill=\"#333333\">" << m.label
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_profile_svg(const std::string& path, const std::vector<ProfilePoint>& pts,
                       const std::vector<SvgMark>& marks) {
    atomic_write_text(path, render_profile_svg(pts, marks));
}

std::vector<SvgMark> profile_marks(const ClosedProfile& profile,
                                   const IntersectionReport& intersections) {
    std::vector<SvgMark> marks;
    const ShotReport& shot = profile.shot;
    if (shot.s1) marks.push_back({"s1", shot.s1->state.x, shot.s1->state.z});
    if (shot.sm) marks.push_back({"s_m", shot.sm->state.x, shot.sm->state.z});
    if (shot.s2) marks.push_back({"s2", 0.0, shot.s2->state.z});
    for (std::size_t i = 0; i < intersections.crossings.size(); ++i)
        marks.push_back({"x" + std::to_string(i + 1), intersections.crossings[i].x,
                         intersections.crossings[i].z});
    return marks;
}

std::string render_shot_report(const Params& p, const ShotRecord& rec) {
    json j;
    j["params"] = params_json(p);
    j["shot"] = shot_json(rec.shot);
    json checks = json::array();
    for (const CheckResult& c : rec.checks) checks.push_back(check_json(c));
    j["checks"] = checks;
    return dump(j);
}

std::string render_sweep_report(const Params& p, const std::vector<ShotRecord>& recs) {
    json j;
    j["params"] = params_json(p);

    std::vector<const ShotReport*> shots;
    shots.reserve(recs.size());
    for (const ShotRecord& r : recs) shots.push_back(&r.shot);
    std::sort(shots.begin(), shots.end(),
              [](const ShotReport* a, const ShotReport* b) { return a->b < b->b; });
    json shot_list = json::array();
    for (const ShotReport* s : shots) shot_list.push_back(shot_json(*s));
    j["shots"] = shot_list;

    std::vector<const CheckResult*> checks;
    for (const ShotRecord& r : recs)
        for (const CheckResult& c : r.checks) checks.push_back(&c);
    std::sort(checks.begin(), checks.end(), [](const CheckResult* a, const CheckResult* b) {
        if (a->check_id != b->check_id) return a->check_id < b->check_id;
        return a->b < b->b;
    });
    json records = json::array();
    for (const CheckResult* c : checks) records.push_back(check_json(*c));
    j["records"] = records;
    return dump(j);
}

std::string render_find_report(const FindReport& fr) {
    json j;
    j["params"] = params_json(fr.params);

    json scan = json::array();
    for (const GridPoint& g : fr.result.bracket.scan) scan.push_back(gridpoint_json(g));
    j["search"] = {{"b_min_used", fr.result.b_min_used},
                   {"b_max_used", fr.result.b_max_used},
                   {"window_slides", fr.result.window_slides},
                   {"scan", scan},
                   {"bracket",
                    {{"b_lo", fr.result.bracket.b_lo},
                     {"b_hi", fr.result.bracket.b_hi},
                     {"flip_count", fr.result.bracket.flip_count}}},
                   {"iterations", fr.result.bisect.iterations},
                   {"bracket_width", fr.result.bisect.bracket_width}};

    j["b0"] = fr.result.bisect.b0;
    j["shot"] = shot_json(fr.result.bisect.shot);
    j["profile"] = {{"s_half", fr.result.profile.s_half},
                    {"length", 2.0 * fr.result.profile.s_half},
                    {"points", fr.result.profile.full.size()}};

    json checks = json::array();
    for (const CheckResult& c : fr.checks) checks.push_back(check_json(c));
    j["checks"] = checks;

    json crossings = json::array();
    for (const Crossing& cr : fr.intersections.crossings) crossings.push_back(crossing_json(cr));
    json artifacts = json::array();
    for (const Crossing& cr : fr.intersections.mirror_artifacts)
        artifacts.push_back(crossing_json(cr));
    j["self_intersections"] = {{"count", fr.intersections.count},
                               {"crossings", crossings},
                               {"mirror_artifacts", artifacts}};

    j["residuals"] = {{"first",
                       {{"max", fr.residual_first.max_residual},
                        {"samples", fr.residual_first.samples}}},
                      {"second",
                       {{"max", fr.residual_second.max_residual},
                        {"samples", fr.residual_second.samples}}}};
    return dump(j);
}

std::string render_special_report(const Params& p, const std::vector<SpecialRecord>& recs) {
    json j;
    j["params"] = params_json(p);
    json sols = json::array();
    for (const SpecialRecord& r : recs)
        sols.push_back({{"name", r.name},
                        {"radius", r.radius},
                        {"max_residual", r.max_residual},
                        {"samples", r.samples}});
    j["solutions"] = sols;
    return dump(j);
}

std::string render_manifest(const Params& p, const std::string& command,
                            const std::vector<ManifestEntry>& entries,
                            const std::string& timestamp) {
    json j;
    j["command"] = command;
    j["params"] = params_json(p);
    j["timestamp"] = timestamp;
    json outs = json::array();
    for (const ManifestEntry& e : entries) outs.push_back({{"path", e.path}, {"kind", e.kind}});
    j["outputs"] = outs;
    return dump(j);
}

}  // namespace lsurf
