#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lsurf/errors.hpp"
#include "lsurf/geometry.hpp"
#include "lsurf/io.hpp"
#include "lsurf/ode.hpp"
#include "lsurf/shooting.hpp"
#include "lsurf/verify.hpp"

namespace py = pybind11;
using namespace lsurf;

PYBIND11_MODULE(_lsurf, m) {
    m.doc() = "profile-curve shooting for rotationally symmetric lambda-hypersurfaces";

    py::register_exception<Error>(m, "LsurfError");

    py::class_<Params>(m, "Params")
        .def(py::init<>())
        .def_readwrite("n", &Params::n)
        .def_readwrite("lambda_", &Params::lambda)
        .def_readwrite("rel_tol", &Params::rel_tol)
        .def_readwrite("abs_tol", &Params::abs_tol)
        .def_readwrite("event_tol_s", &Params::event_tol_s)
        .def_readwrite("z_ceiling", &Params::z_ceiling)
        .def_readwrite("s_max", &Params::s_max)
        .def_readwrite("axis_eps", &Params::axis_eps)
        .def_readwrite("max_step", &Params::max_step)
        .def("sphere_radius", &Params::sphere_radius)
        .def("cylinder_radius", &Params::cylinder_radius)
        .def("conjugate_cylinder_radius", &Params::conjugate_cylinder_radius)
        .def("validate", &Params::validate)
        .def("__repr__", [](const Params& p) {
            return "Params(n=" + std::to_string(p.n) +
                   ", lambda=" + std::to_string(p.lambda) + ")";
        });
    m.def("make_params", &make_params, py::arg("n"), py::arg("lambda_"));

    py::class_<CurveState>(m, "CurveState")
        .def_readonly("s", &CurveState::s)
        .def_readonly("x", &CurveState::x)
        .def_readonly("z", &CurveState::z)
        .def_readonly("theta", &CurveState::theta)
        .def("__repr__", [](const CurveState& st) {
            return "CurveState(s=" + std::to_string(st.s) + ", x=" + std::to_string(st.x) +
                   ", z=" + std::to_string(st.z) + ", theta=" + std::to_string(st.theta) +
                   ")";
        });

    py::class_<Event>(m, "Event")
        .def_readonly("state", &Event::state)
        .def_property_readonly("kind",
                               [](const Event& e) { return std::string(to_string(e.kind)); });

    m.def(
        "rhs",
        [](const CurveState& st, const Params& p) {
            const Derivative d = rhs(st, p);
            return py::make_tuple(d.dx, d.dz, d.dtheta);
        },
        py::arg("state"), py::arg("params"));
    m.def("equation_residual", &equation_residual, py::arg("state"), py::arg("dtheta_ds"),
          py::arg("params"));
    m.def("axis_series_start", &axis_series_start, py::arg("b"), py::arg("params"));

    py::class_<ShotReport>(m, "ShotReport")
        .def_readonly("b", &ShotReport::b)
        .def_property_readonly("terminal",
                               [](const ShotReport& s) {
                                   return std::string(to_string(s.terminal));
                               })
        .def_readonly("anomaly", &ShotReport::anomaly)
        .def_readonly("regime_warning", &ShotReport::regime_warning)
        .def_readonly("s1", &ShotReport::s1)
        .def_readonly("sm", &ShotReport::sm)
        .def_readonly("s2", &ShotReport::s2)
        .def_readonly("x_at_axis", &ShotReport::x_at_axis)
        .def("positive", &ShotReport::positive)
        .def("shoot_value", &ShotReport::shoot_value);
    m.def("shoot", &shoot, py::arg("b"), py::arg("params"));

    py::class_<ProfilePoint>(m, "ProfilePoint")
        .def_readonly("t", &ProfilePoint::t)
        .def_readonly("x", &ProfilePoint::x)
        .def_readonly("z", &ProfilePoint::z)
        .def_readonly("theta", &ProfilePoint::theta);

    py::class_<ClosedProfile>(m, "ClosedProfile")
        .def_readonly("b0", &ClosedProfile::b0)
        .def_readonly("s_half", &ClosedProfile::s_half)
        .def("sample", &ClosedProfile::sample, py::arg("t"));
    m.def("close_profile", &close_profile, py::arg("shot"), py::arg("params"),
          py::arg("tol_F") = 1e-9);
    m.def("resample_profile", &resample_profile, py::arg("profile"), py::arg("h"));

    py::class_<BisectResult>(m, "BisectResult")
        .def_readonly("b0", &BisectResult::b0)
        .def_readonly("shot", &BisectResult::shot)
        .def_readonly("iterations", &BisectResult::iterations)
        .def_readonly("bracket_width", &BisectResult::bracket_width);

    py::class_<FindResult>(m, "FindResult")
        .def_readonly("bisect", &FindResult::bisect)
        .def_readonly("profile", &FindResult::profile)
        .def_readonly("b_min_used", &FindResult::b_min_used)
        .def_readonly("b_max_used", &FindResult::b_max_used)
        .def_readonly("window_slides", &FindResult::window_slides);
    m.def("find_critical_height", &find_critical_height, py::arg("params"),
          py::arg("b_min") = 0.0, py::arg("b_max") = 0.0, py::arg("grid") = 24,
          py::arg("tol_b") = 1e-12, py::arg("tol_F") = 1e-9);

    py::class_<CheckResult>(m, "CheckResult")
        .def_readonly("check_id", &CheckResult::check_id)
        .def_readonly("statement", &CheckResult::statement)
        .def_readonly("b", &CheckResult::b)
        .def_readonly("passed", &CheckResult::passed)
        .def_readonly("skipped", &CheckResult::skipped)
        .def_readonly("margin", &CheckResult::margin)
        .def_readonly("detail", &CheckResult::detail);
    m.def("run_all_checks", &run_all_checks, py::arg("shot"), py::arg("params"),
          py::arg("samples") = 1000);
    m.def("check_b0", &check_b0, py::arg("profile"), py::arg("params"),
          py::arg("tol_F") = 1e-9);

    py::class_<Crossing>(m, "Crossing")
        .def_readonly("x", &Crossing::x)
        .def_readonly("z", &Crossing::z)
        .def_readonly("t_a", &Crossing::t_a)
        .def_readonly("t_b", &Crossing::t_b)
        .def_readonly("angle", &Crossing::angle);
    py::class_<IntersectionReport>(m, "IntersectionReport")
        .def_readonly("count", &IntersectionReport::count)
        .def_readonly("crossings", &IntersectionReport::crossings)
        .def_readonly("mirror_artifacts", &IntersectionReport::mirror_artifacts);
    m.def(
        "count_self_intersections",
        [](const ClosedProfile& prof) { return count_self_intersections(prof); },
        py::arg("profile"));

    py::class_<RevolutionMesh>(m, "RevolutionMesh")
        .def_readonly("vertices", &RevolutionMesh::vertices)
        .def_readonly("triangles", &RevolutionMesh::triangles)
        .def("vertex_count", &RevolutionMesh::vertex_count)
        .def("triangle_count", &RevolutionMesh::triangle_count)
        .def("edge_count", &RevolutionMesh::edge_count)
        .def("euler_characteristic", &RevolutionMesh::euler_characteristic)
        .def("watertight", &RevolutionMesh::watertight);
    m.def("revolve", &revolve, py::arg("profile"), py::arg("segments"),
          py::arg("interior_step") = 1e-2);
    m.def("revolve_polyline", &revolve_polyline, py::arg("points"), py::arg("segments"));

    m.def("render_profile_csv", &render_profile_csv, py::arg("points"));
    m.def("render_mesh_obj", &render_mesh_obj, py::arg("mesh"));
    m.def(
        "render_shot_report",
        [](const Params& p, const ShotReport& shot) {
            ShotRecord rec{shot, run_all_checks(shot, p)};
            return render_shot_report(p, rec);
        },
        py::arg("params"), py::arg("shot"));
}
