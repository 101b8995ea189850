#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "lsurf/errors.hpp"
#include "lsurf/geometry.hpp"
#include "lsurf/io.hpp"
#include "lsurf/ode.hpp"
#include "lsurf/shooting.hpp"
#include "lsurf/verify.hpp"

namespace {

using namespace lsurf;

constexpr double kPi = 3.14159265358979323846;

struct Opts {
    int n = 2;
    double lambda = -0.05;
    double b = 0.0;
    double b_min = 0.0;   // 0 selects the per-command default
    double b_max = 0.0;
    std::size_t grid = 12;
    double tol_b = 1e-12;
    double tol_f = 1e-9;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t segments = 128;
    std::string out = ".";
    std::size_t jobs = 1;
    std::vector<std::string> formats{"csv", "svg", "obj", "json"};
    std::string dump_config;
};

Params opts_params(const Opts& o) {
    Params p = make_params(o.n, o.lambda);
    p.rel_tol = o.rel_tol;
    p.abs_tol = o.abs_tol;
    p.validate();
    return p;
}

bool wants(const Opts& o, const std::string& fmt) {
    for (const std::string& f : o.formats)
        if (f == fmt || f == "all") return true;
    return false;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Writes everything a command produced plus the manifest naming it all.
struct OutputDir {
    std::filesystem::path dir;
    std::vector<ManifestEntry> entries;

    explicit OutputDir(const std::string& out) : dir(out) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory '" + out + "': " + ec.message());
    }
    void write(const std::string& name, const std::string& kind, const std::string& content) {
        atomic_write_text((dir / name).string(), content);
        entries.push_back({name, kind});
    }
    void finish(const Params& p, const std::string& command) {
        atomic_write_text((dir / "manifest.json").string(),
                          render_manifest(p, command, entries, timestamp_utc()));
    }
};

// True when any evaluated (not skipped) check failed.
bool any_failed(const std::vector<CheckResult>& checks) {
    for (const CheckResult& c : checks)
        if (!c.skipped && !c.passed) return true;
    return false;
}

int count_failed(const std::vector<CheckResult>& checks) {
    int k = 0;
    for (const CheckResult& c : checks)
        if (!c.skipped && !c.passed) ++k;
    return k;
}

std::vector<ProfilePoint> branch_points(const ShotReport& shot, double h) {
    std::vector<ProfilePoint> pts;
    const double s_end = shot.second ? shot.second->s_end() : shot.first.s_end();
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(s_end / h)));
    for (std::size_t k = 0; k <= n; ++k) {
        const double s = s_end * static_cast<double>(k) / static_cast<double>(n);
        const DenseBranch& br =
            (shot.second && s > shot.s1->state.s) ? *shot.second : shot.first;
        const CurveState st = br.eval(s);
        pts.push_back({st.s, st.x, st.z, st.theta});
    }
    return pts;
}

int cmd_special(const Opts& o) {
    const Params p = opts_params(o);
    std::vector<SpecialRecord> recs;
    const std::size_t samples = 1000;

    auto scan_branch = [&](const DenseBranch& br, double dtheta, const char* name,
                           double radius) {
        double worst = 0.0;
        for (std::size_t k = 0; k <= samples; ++k) {
            const double s = br.s_begin() + (br.s_end() - br.s_begin()) *
                                                static_cast<double>(k) /
                                                static_cast<double>(samples);
            worst = std::max(worst, std::abs(equation_residual(br.eval(s), dtheta, p)));
        }
        recs.push_back({name, radius, worst, samples + 1});
    };

    // Sample the circle away from its two axis touch points (z = 0 there).
    const double a = p.sphere_radius();
    scan_branch(circle_branch(p, 0.05 * a, (kPi - 0.05) * a), 1.0 / a, "sphere", a);
    scan_branch(cylinder_branch(p, -1.0, 2.0), 0.0, "cylinder", p.cylinder_radius());
    if (p.lambda == 0.0) scan_branch(plane_branch(p, 0.1, 2.0), 0.0, "plane", 0.0);

    OutputDir out(o.out);
    if (wants(o, "json")) out.write("report.json", "report", render_special_report(p, recs));
    out.finish(p, "special");

    bool ok = true;
    for (const SpecialRecord& r : recs) {
        std::printf("%-8s  max residual %.3e over %zu samples\n", r.name.c_str(),
                    r.max_residual, r.samples);
        ok = ok && r.max_residual <= 1e-10;
    }
    return ok ? 0 : 1;
}

int cmd_trace(const Opts& o, bool classify_only) {
    const Params p = opts_params(o);
    if (!(o.b > 0.0)) throw CLI::ValidationError("--b", "trace/shoot need --b > 0");

    ShotReport shot = shoot(o.b, p);
    ShotRecord rec{shot, run_all_checks(shot, p)};

    OutputDir out(o.out);
    if (wants(o, "json"))
        out.write("report.json", "report", render_shot_report(p, rec));
    if (!classify_only && wants(o, "csv"))
        out.write("curve.csv", "profile_csv", render_profile_csv(branch_points(shot, 1e-3)));
    out.finish(p, classify_only ? "shoot" : "trace");

    // Exploration commands succeed once the class is recorded, whatever it is;
    // only the search pipeline treats an anomalous shot as a hard error.
    std::printf("b=%.17g  class=%s  F=%s%s%s\n", shot.b, to_string(shot.terminal),
                shot.shoot_value() ? std::to_string(*shot.shoot_value()).c_str() : "n/a",
                shot.anomaly.empty() ? "" : "  anomaly: ", shot.anomaly.c_str());
    return 0;
}

int cmd_find_b0(const Opts& o, bool mesh_only) {
    const Params p = opts_params(o);

    if (mesh_only && p.n != 2)
        throw CLI::ValidationError("--n", "mesh output needs n = 2 (a surface in R^3)");

    FindResult fr;
    if (mesh_only && o.b > 0.0) {
        // Mesh a user-supplied critical height without rerunning the search.
        fr.bisect.b0 = o.b;
        fr.bisect.shot = shoot(o.b, p);
        fr.profile = close_profile(fr.bisect.shot, p, o.tol_f);
        fr.b_min_used = fr.b_max_used = o.b;
    } else {
        fr = find_critical_height(p, o.b_min, o.b_max, std::max<std::size_t>(o.grid, 24),
                                  o.tol_b, o.tol_f);
    }

    FindReport rep;
    rep.params = p;
    rep.checks = check_b0(fr.profile, p, o.tol_f);
    auto lemmas = run_all_checks(fr.bisect.shot, p);
    rep.checks.insert(rep.checks.end(), lemmas.begin(), lemmas.end());
    rep.intersections = count_self_intersections(fr.profile);
    rep.residual_first = residual_along(fr.bisect.shot.first, p);
    rep.residual_second = residual_along(*fr.bisect.shot.second, p);

    OutputDir out(o.out);
    if (!mesh_only && wants(o, "csv"))
        out.write("profile.csv", "profile_csv",
                  render_profile_csv(resample_profile(fr.profile, 1e-3)));
    if (!mesh_only && wants(o, "svg"))
        out.write("profile.svg", "profile_svg",
                  render_profile_svg(resample_profile(fr.profile, 5e-3),
                                     profile_marks(fr.profile, rep.intersections)));
    if (p.n == 2 && wants(o, "obj"))
        out.write("mesh.obj", "mesh_obj",
                  render_mesh_obj(revolve(fr.profile, o.segments)));
    if (wants(o, "json")) {
        rep.result = fr;
        out.write("report.json", "report", render_find_report(rep));
    }
    out.finish(p, mesh_only ? "mesh" : "find-b0");

    std::printf("b0 = %.15f  (window [%.6g, %.6g], %d slide%s, %zu bisection steps)\n",
                fr.bisect.b0, fr.b_min_used, fr.b_max_used, fr.window_slides,
                fr.window_slides == 1 ? "" : "s", fr.bisect.iterations);
    const int failed = count_failed(rep.checks);
    if (failed > 0) {
        std::printf("%d check%s failed\n", failed, failed == 1 ? "" : "s");
        return 1;
    }
    return 0;
}

int cmd_verify(const Opts& o) {
    const Params p = opts_params(o);
    const double b_min = o.b_min > 0.0 ? o.b_min : 1e-3;
    const double b_max = o.b_max > 0.0 ? o.b_max : 0.3;
    if (!(b_min < b_max)) throw CLI::ValidationError("--b-min", "need b-min < b-max");
    const std::size_t grid = std::max<std::size_t>(o.grid, 2);

    std::vector<ShotRecord> recs(grid);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid) return;
            const double f = static_cast<double>(i) / static_cast<double>(grid - 1);
            const double b = b_min * std::exp(std::log(b_max / b_min) * f);
            recs[i].shot = shoot(b, p);
            recs[i].checks = run_all_checks(recs[i].shot, p);
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, o.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    OutputDir out(o.out);
    if (wants(o, "json")) out.write("report.json", "report", render_sweep_report(p, recs));
    out.finish(p, "verify");

    int failed = 0, passed = 0, skipped = 0;
    for (const ShotRecord& r : recs)
        for (const CheckResult& c : r.checks) {
            if (c.skipped)
                ++skipped;
            else if (c.passed)
                ++passed;
            else
                ++failed;
        }
    std::printf("verify: %d passed, %d skipped, %d failed over %zu shots\n", passed, skipped,
                failed, grid);
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lambda-hypersurface profile curves: exact solutions, shooting, meshes"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);

    Opts o;
    app.add_option("--n", o.n, "ambient dimension parameter n >= 2")->capture_default_str();
    app.add_option("--lambda", o.lambda, "lambda <= 0")->capture_default_str();
    app.add_option("--b", o.b, "initial height for trace/shoot/mesh");
    app.add_option("--b-min", o.b_min, "scan window lower end (0 = default)");
    app.add_option("--b-max", o.b_max, "scan window upper end (0 = default)");
    app.add_option("--grid", o.grid, "scan grid size")->capture_default_str();
    app.add_option("--tol-b", o.tol_b, "bisection width tolerance")->capture_default_str();
    app.add_option("--tol-f", o.tol_f, "|x(s2)| tolerance")->capture_default_str();
    app.add_option("--rel-tol", o.rel_tol, "integrator relative tolerance")
        ->capture_default_str();
    app.add_option("--abs-tol", o.abs_tol, "integrator absolute tolerance")
        ->capture_default_str();
    app.add_option("--segments", o.segments, "angular mesh segments")->capture_default_str();
    app.add_option("--out", o.out, "output directory")->capture_default_str();
    app.add_option("--jobs", o.jobs, "verify worker threads")->capture_default_str();
    app.add_option("--format", o.formats, "artifact formats (csv svg obj json all)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--dump-config", o.dump_config, "write the effective config to a file")
        ->configurable(false);

    auto* sp_special = app.add_subcommand("special", "exact solution residual report");
    auto* sp_trace = app.add_subcommand("trace", "integrate one profile and dump the curve");
    auto* sp_shoot = app.add_subcommand("shoot", "classify one initial height");
    auto* sp_find = app.add_subcommand("find-b0", "run the critical height pipeline");
    auto* sp_verify = app.add_subcommand("verify", "sweep checks over a height grid");
    auto* sp_mesh = app.add_subcommand("mesh", "emit the revolution mesh only");
    for (CLI::App* sub : {sp_special, sp_trace, sp_shoot, sp_find, sp_verify, sp_mesh})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    if (!o.dump_config.empty()) {
        try {
            lsurf::atomic_write_text(o.dump_config, app.config_to_str(true, false));
        } catch (const lsurf::IoError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 3;
        }
    }

    try {
        if (sp_special->parsed()) return cmd_special(o);
        if (sp_trace->parsed()) return cmd_trace(o, false);
        if (sp_shoot->parsed()) return cmd_trace(o, true);
        if (sp_find->parsed()) return cmd_find_b0(o, false);
        if (sp_mesh->parsed()) return cmd_find_b0(o, true);
        if (sp_verify->parsed()) return cmd_verify(o);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const lsurf::NoBracketError& e) {
        std::fprintf(stderr, "anomaly: %s\n", e.what());
        return 2;
    } catch (const lsurf::ClassFlipAnomalyError& e) {
        std::fprintf(stderr, "anomaly: %s\n", e.what());
        return 2;
    } catch (const lsurf::JunctionMismatchError& e) {
        std::fprintf(stderr, "anomaly: %s\n", e.what());
        return 2;
    } catch (const lsurf::DegenerateCrossingError& e) {
        std::fprintf(stderr, "anomaly: %s\n", e.what());
        return 2;
    } catch (const lsurf::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const lsurf::Error& e) {
        std::fprintf(stderr, "anomaly: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        // parameter validation (n, lambda, tolerances) rejects the values
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "anomaly: %s\n", e.what());
        return 2;
    }
    return 3;
}
