import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enstab import (NonFiniteState, StepSizeUnderflow, composite_boole,
                    composite_simpson, count_nodes, find_root, integrate_ivp,
                    uniform_grid)

from _oracles import rk4_path


def test_exponential_against_closed_form():
    traj = integrate_ivp(lambda t, y: [y[0]], 0.0, [1.0], 2.0,
                         rel_tol=1e-12, abs_tol=1e-12)
    assert abs(traj.final_state[0] - math.exp(2.0)) < 5e-11


def test_harmonic_oscillator_dense_output():
    traj = integrate_ivp(lambda t, y: [y[1], -y[0]], 0.0, [1.0, 0.0],
                         float(2.0 * math.pi), rel_tol=1e-11, abs_tol=1e-11)
    ts = np.linspace(0.3, 6.0, 57)
    vals = traj.eval(ts)
    assert np.max(np.abs(vals[:, 0] - np.cos(ts))) < 1e-9
    assert np.max(np.abs(vals[:, 1] + np.sin(ts))) < 1e-9


def test_tolerance_scaling():
    errs = []
    for tol in (1e-6, 1e-9, 1e-12):
        traj = integrate_ivp(lambda t, y: [y[1], -y[0]], 0.0, [0.0, 1.0],
                             10.0, rel_tol=tol, abs_tol=tol)
        errs.append(abs(traj.final_state[0] - math.sin(10.0)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-10


def test_matches_fixed_step_rk4():
    def rhs(t, y):
        return [y[1], -0.3 * y[1] - math.sin(y[0])]

    traj = integrate_ivp(rhs, 0.0, [1.2, 0.0], 8.0,
                         rel_tol=1e-12, abs_tol=1e-12)
    _, path = rk4_path(lambda t, y: np.array(rhs(t, y)), 0.0,
                       [1.2, 0.0], 8.0, 20000)
    assert abs(traj.final_state[0] - path[-1, 0]) < 1e-9
    assert abs(traj.final_state[1] - path[-1, 1]) < 1e-9


def test_stop_on_sign_change_brackets_zero():
    traj = integrate_ivp(lambda t, y: [y[1], -y[0]], 0.0, [1.0, 0.0], 10.0,
                         stop_on_sign_change=0)
    assert traj.stopped_early
    assert traj.t_end < 10.0
    root = find_root(lambda t: traj.eval1(t, 0),
                     traj.ts[-2], traj.ts[-1])
    assert abs(root - math.pi / 2.0) < 1e-10


def test_blowup_reports_failure():
    with pytest.raises((StepSizeUnderflow, NonFiniteState)):
        integrate_ivp(lambda t, y: [y[0] * y[0]], 0.0, [1.0], 2.0)


def test_invalid_span_and_tolerances():
    with pytest.raises(ValueError):
        integrate_ivp(lambda t, y: [0.0], 1.0, [0.0], 0.5)
    with pytest.raises(ValueError):
        integrate_ivp(lambda t, y: [0.0], 0.0, [0.0], 1.0, rel_tol=0.0)


def test_find_root_cosine():
    assert abs(find_root(math.cos, 1.0, 2.0) - math.pi / 2.0) < 1e-14


def test_find_root_threshold_equation():
    root = find_root(lambda t: math.sqrt(t) * math.tanh(math.sqrt(t)) - 1.0,
                     1.0, 2.0, tol=1e-14)
    s = math.sqrt(root)
    assert abs(s * math.tanh(s) - 1.0) < 1e-14


def test_find_root_rejects_unbracketed():
    with pytest.raises(Exception):
        find_root(lambda x: x * x + 1.0, -1.0, 1.0)


@pytest.mark.parametrize("k", [1, 2, 3, 7])
def test_count_nodes_sine(k):
    x = np.linspace(0.0, 1.0, 801)
    assert count_nodes(np.sin(k * math.pi * x[1:-1])) == k - 1


def test_count_nodes_ignores_touching_zero():
    vals = np.array([1.0, 0.0, 1.0, -1.0])
    assert count_nodes(vals) == 1


def test_simpson_exact_on_cubics():
    g = uniform_grid(101)
    x = g.nodes
    val = composite_simpson(x**3 - 2.0 * x + 1.0, g.spacing)
    assert abs(val - (0.25 - 1.0 + 1.0)) < 1e-15


def test_boole_exact_on_quintics():
    g = uniform_grid(101)
    x = g.nodes
    val = composite_boole(x**5, g.spacing)
    assert abs(val - 1.0 / 6.0) < 1e-15


def test_quadrature_shape_validation():
    with pytest.raises(ValueError):
        composite_simpson(np.zeros(4), 0.1)
    with pytest.raises(ValueError):
        composite_boole(np.zeros(6), 0.1)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-3.0, 3.0), t1=st.floats(0.3, 2.0))
def test_linear_ode_property(a, t1):
    traj = integrate_ivp(lambda t, y: [a * y[0]], 0.0, [1.0], t1,
                         rel_tol=1e-11, abs_tol=1e-11)
    assert abs(traj.final_state[0] - math.exp(a * t1)) < 1e-8


@settings(max_examples=40, deadline=None)
@given(c=st.floats(-0.9, 0.9))
def test_find_root_property_monotone_cubic(c):
    root = find_root(lambda x: x**3 + x - c, -2.0, 2.0, tol=1e-14)
    assert abs(root**3 + root - c) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 60))
def test_simpson_linear_in_samples(n):
    g = uniform_grid(2 * n + 1)
    y1 = np.sin(g.nodes)
    y2 = np.cos(3.0 * g.nodes)
    lhs = composite_simpson(2.0 * y1 + y2, g.spacing)
    rhs = 2.0 * composite_simpson(y1, g.spacing) \
        + composite_simpson(y2, g.spacing)
    assert abs(lhs - rhs) < 1e-13
