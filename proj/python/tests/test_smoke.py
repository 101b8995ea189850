import json
import math

import pytest

import lsurf


def test_params_radii():
    p = lsurf.make_params(2, 0.0)
    assert p.sphere_radius() == pytest.approx(math.sqrt(2.0), abs=1e-15)
    assert p.cylinder_radius() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        lsurf.make_params(2, 0.5)


def test_rhs_and_residual():
    p = lsurf.make_params(2, -0.1)
    st = lsurf.axis_series_start(0.1, p)
    dx, dz, dtheta = lsurf.rhs(st, p)
    assert math.hypot(dx, dz) == pytest.approx(1.0, abs=1e-12)
    assert lsurf.equation_residual(st, dtheta, p) == pytest.approx(0.0, abs=1e-12)


def test_shot_classification():
    p = lsurf.make_params(2, 0.0)
    low = lsurf.shoot(0.05, p)
    assert low.terminal == "second_vertical_tangent"
    assert low.positive()
    assert low.shoot_value() > 0.0
    assert low.s1.state.theta == pytest.approx(math.pi, abs=1e-12)

    circle = lsurf.shoot(p.sphere_radius(), p)
    assert circle.terminal == "axis_hit"
    assert circle.x_at_axis == pytest.approx(-p.sphere_radius(), abs=1e-6)


def test_find_critical_height():
    p = lsurf.make_params(2, 0.0)
    fr = lsurf.find_critical_height(p)
    assert fr.bisect.b0 == pytest.approx(0.278215802428993, abs=1e-6)
    assert abs(fr.bisect.shot.shoot_value()) <= 1e-9

    prof = fr.profile
    start = prof.sample(0.0)
    assert start.x == pytest.approx(prof.b0, abs=1e-12)
    assert start.z == pytest.approx(0.0, abs=1e-12)
    end = prof.sample(2.0 * prof.s_half)
    assert end.x == pytest.approx(-prof.b0, abs=1e-12)

    rep = lsurf.count_self_intersections(prof)
    assert rep.count == 2

    checks = lsurf.check_b0(prof, p)
    assert all(c.passed or c.skipped for c in checks)


def test_resample_and_mesh():
    p = lsurf.make_params(2, -0.05)
    fr = lsurf.find_critical_height(p)
    pts = lsurf.resample_profile(fr.profile, 0.01)
    assert all(b.t - a.t <= 0.01 + 1e-12 for a, b in zip(pts, pts[1:]))

    mesh = lsurf.revolve(fr.profile, 32)
    assert mesh.watertight()
    assert mesh.euler_characteristic() == 2
    assert mesh.vertex_count() - mesh.edge_count() + mesh.triangle_count() == 2

    obj = lsurf.render_mesh_obj(mesh)
    assert obj.startswith("# ") or obj.startswith("v ")

    csv = lsurf.render_profile_csv(pts)
    assert csv.startswith("s,x,z,theta\n")


def test_checks_and_report():
    p = lsurf.make_params(2, 0.0)
    shot = lsurf.shoot(1e-3, p)
    checks = lsurf.run_all_checks(shot, p)
    by_id = {c.check_id: c for c in checks}
    assert by_id["lemma_3_1"].passed
    assert by_id["lemma_3_5"].skipped
    assert not any((not c.skipped) and (not c.passed) for c in checks)

    report = json.loads(lsurf.render_shot_report(p, shot))
    assert report["shot"]["terminal"] == "second_vertical_tangent"
    assert report["params"]["n"] == 2


def test_error_mapping():
    p = lsurf.make_params(2, 0.0)
    shot = lsurf.shoot(0.2, p)  # far from critical
    with pytest.raises(lsurf.LsurfError):
        lsurf.close_profile(shot, p, 1e-9)
