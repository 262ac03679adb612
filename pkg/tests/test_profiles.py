import io
import math

import numpy as np
import pytest

from enstab import (NonlinearitySpec, ShootConfig, ShootingError,
                    composite_simpson, energy, boundary_data,
                    max_ode_residual, parse_nonlinearity, profile_to_csv,
                    solve_1d, solve_radial)

from _oracles import profile_rhs_1d, profile_rhs_radial, rk4_path


def test_parse_nonlinearity_grammar():
    assert parse_nonlinearity("torsion").kind == "torsion"
    assert parse_nonlinearity("lane-emden:3").p == 3.0
    assert parse_nonlinearity("lane_emden:2.5").p == 2.5
    lin = parse_nonlinearity("linear:0.5,1")
    assert (lin.a, lin.b) == (0.5, 1.0)
    for bad in ("", "torsion:1", "lane-emden", "linear:1", "unknown:2"):
        with pytest.raises(ValueError):
            parse_nonlinearity(bad)


def test_torsion_slab_closed_form(torsion_1d):
    x = torsion_1d.grid.nodes
    assert np.max(np.abs(torsion_1d.u - 0.5 * (1.0 - x * x))) < 1e-9
    assert np.max(np.abs(torsion_1d.du + x)) < 1e-9
    assert abs(torsion_1d.du_at_1 + 1.0) < 1e-10
    assert abs(torsion_1d.d2u_at_1 + 1.0) < 1e-10


@pytest.mark.parametrize("N", [3, 4, 5])
def test_torsion_cone_closed_form(N):
    prof = solve_radial(NonlinearitySpec.torsion(), N)
    r = prof.grid.nodes
    assert np.max(np.abs(prof.u - (1.0 - r * r) / (2.0 * N))) < 1e-9
    assert abs(prof.du_at_1 + 1.0 / N) < 1e-10


def test_linear_slab_closed_form():
    prof = solve_1d(parse_nonlinearity("linear:0.5,1"))
    x = prof.grid.nodes
    w = math.sqrt(0.5)
    exact = (1.0 / 0.5) * (np.cos(w * x) / math.cos(w) - 1.0)
    assert np.max(np.abs(prof.u - exact)) < 1e-9


def test_lane_emden_slab_against_rk4(le2_1d):
    rhs = profile_rhs_1d(le2_1d.nonlinearity)
    _, path = rk4_path(rhs, 0.0, [le2_1d.u_at_0, 0.0], 1.0, 10 * 1024)
    sampled = path[::10, 0]
    assert np.max(np.abs(le2_1d.u - sampled)) < 1e-8


def test_lane_emden_cone_against_rk4(le3_cone3):
    rhs = profile_rhs_radial(le3_cone3.nonlinearity, 3)
    eps = 1e-6
    u0 = le3_cone3.u_at_0
    y_eps = [u0 - u0**3 * eps * eps / 6.0, -u0**3 * eps / 3.0]
    _, path = rk4_path(rhs, eps, y_eps, 1.0, 10 * 1024)
    ours = le3_cone3.interpolate(np.linspace(eps, 1.0, 10 * 1024 + 1))
    assert np.max(np.abs(ours - path[:, 0])) < 1e-8


def test_scale_invariance_relation(le2_cone3):
    meta = le2_cone3.meta
    assert meta["method"] == "scale_invariance"
    r0 = meta["r0"]
    assert abs(le2_cone3.u_at_0 - r0 ** 2.0) < 1e-8 * r0 ** 2.0


def test_positive_interior(le2_cone3, le3_1d):
    assert np.all(le2_cone3.u[:-1] > 0.0)
    assert np.all(le3_1d.u[:-1] > 0.0)
    assert abs(le2_cone3.u[-1]) < 1e-8
    assert abs(le3_1d.u[-1]) < 1e-8


def test_energy_closed_forms(torsion_1d):
    assert abs(energy(torsion_1d) + 1.0 / 6.0) < 1e-10
    for N in (3, 4):
        prof = solve_radial(NonlinearitySpec.torsion(), N)
        exact = -1.0 / (2.0 * N * N * (N + 2.0))
        assert abs(energy(prof) - exact) < 1e-10


def test_energy_two_routes_agree(le2_cone3, le2_1d):
    for prof in (le2_cone3, le2_1d):
        nl = prof.nonlinearity
        x = prof.grid.nodes
        dirichlet = 0.5 * prof.du**2 - nl.F(prof.u)
        if prof.geometry == "cone_radial":
            dirichlet = dirichlet * x ** (prof.N - 1)
        direct = composite_simpson(dirichlet, prof.grid.spacing)
        assert abs(energy(prof) - direct) < 1e-8


def test_boundary_data_consistent(le3_cone3):
    du1, d2u1 = boundary_data(le3_cone3)
    assert du1 == le3_cone3.du_at_1
    # at the boundary u = 0, so u'' = -(N-1) u'
    assert abs(d2u1 + (le3_cone3.N - 1) * du1) < 1e-12


@pytest.mark.parametrize("fixture", ["torsion_1d", "le2_1d", "le3_1d",
                                     "le2_cone3", "le3_cone3"])
def test_ode_residual_invariant(fixture, request):
    prof = request.getfixturevalue(fixture)
    assert max_ode_residual(prof) < 1e-7


def test_ode_residual_cone_dim4():
    prof = solve_radial(parse_nonlinearity("lane-emden:2"), 4)
    assert max_ode_residual(prof) < 1e-7


def test_supercritical_exponent_raises():
    with pytest.raises(ShootingError):
        solve_radial(parse_nonlinearity("lane-emden:2.5"), 5)
    with pytest.raises(ShootingError):
        solve_radial(parse_nonlinearity("lane-emden:3"), 4)


def test_linear_without_zero_raises():
    with pytest.raises(ShootingError):
        solve_1d(parse_nonlinearity("linear:-1,-1"))


def test_steep_family_needs_finer_grid():
    nl = parse_nonlinearity("lane-emden:4")
    coarse = max_ode_residual(solve_radial(nl, 3))
    fine = max_ode_residual(
        solve_radial(nl, 3, ShootConfig(grid_points=2049)))
    assert fine < coarse / 8.0


def test_tabulated_matches_exact_torsion(torsion_1d):
    s = np.linspace(-0.2, 1.2, 2001)
    tab = NonlinearitySpec.tabulated(s, np.ones_like(s))
    prof = solve_1d(tab)
    assert np.max(np.abs(prof.u - torsion_1d.u)) < 1e-6


def test_csv_round_trip(le2_1d):
    buf = io.StringIO()
    profile_to_csv(le2_1d, buf)
    text = buf.getvalue()
    assert text.startswith("r,u,du\n")
    assert "\r" not in text
    data = np.genfromtxt(io.StringIO(text), delimiter=",", names=True)
    assert np.array_equal(data["r"], le2_1d.grid.nodes)
    assert np.array_equal(data["u"], le2_1d.u)
    assert np.array_equal(data["du"], le2_1d.du)


def test_interpolate_hits_nodes(le2_1d):
    mid = le2_1d.grid.nodes[100:110]
    assert np.max(np.abs(le2_1d.interpolate(mid) - le2_1d.u[100:110])) == 0.0


def test_interpolate_between_nodes(le2_1d):
    x = (le2_1d.grid.nodes[200] + le2_1d.grid.nodes[201]) / 2.0
    rhs = profile_rhs_1d(le2_1d.nonlinearity)
    _, path = rk4_path(rhs, 0.0, [le2_1d.u_at_0, 0.0], float(x), 4096)
    assert abs(float(le2_1d.interpolate(x)) - path[-1, 0]) < 1e-9


def test_invalid_dimension():
    with pytest.raises(ValueError):
        solve_radial(NonlinearitySpec.torsion(), 1)


def test_disk_dimension_allowed():
    prof = solve_radial(NonlinearitySpec.torsion(), 2)
    r = prof.grid.nodes
    assert np.max(np.abs(prof.u - (1.0 - r * r) / 4.0)) < 1e-9
