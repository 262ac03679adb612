"""The compiled kernel and the pure-Python kernel must agree step for step.

Both implement the same tableau with the same controller constants, so the
accepted nodes, states and dense coefficients should match bitwise; any
drift means the two code paths diverged.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

_ext = pytest.importorskip("enstab._kernel_c")

from enstab import _kernel, parse_nonlinearity  # noqa: E402
from enstab.profiles import _profile_rhs  # noqa: E402


def _spec():
    return _profile_rhs(parse_nonlinearity("lane-emden:3"), 3)


def _both(monkeypatch, y0, t1, tol, stop=-1):
    # pin the dispatch both ways so the comparison is valid even when
    # ENSTAB_PURE_PYTHON disabled the compiled default at import
    spec = _spec()
    with monkeypatch.context() as m:
        m.setattr(_kernel, "_compiled", _ext)
        assert _kernel.active_kernel() == "compiled"
        compiled = _kernel.integrate_raw(spec, 1e-6, y0, t1, tol, tol,
                                         stop_comp=stop)
    with monkeypatch.context() as m:
        m.setattr(_kernel, "_compiled", None)
        assert _kernel.active_kernel() == "python"
        pure = _kernel.integrate_raw(spec, 1e-6, y0, t1, tol, tol,
                                     stop_comp=stop)
    return compiled, pure


def test_bitwise_agreement_on_profile_shot(monkeypatch):
    a, b = _both(monkeypatch, [6.9, 0.0], 1.0, 1e-10)
    assert a[3] == b[3]
    assert np.array_equal(np.asarray(a[0]), np.asarray(b[0]))
    assert np.array_equal(np.asarray(a[1]), np.asarray(b[1]))


def test_dense_coefficients_agree(monkeypatch):
    a, b = _both(monkeypatch, [6.9, 0.0], 1.0, 1e-8)
    da, db = np.asarray(a[2]), np.asarray(b[2])
    assert da.shape == db.shape
    assert np.array_equal(da, db)


def test_stop_component_agrees(monkeypatch):
    a, b = _both(monkeypatch, [8.0, 0.0], 50.0, 1e-10, stop=0)
    assert a[3] == b[3] == 1
    assert np.asarray(a[0])[-1] == np.asarray(b[0])[-1]


def test_env_var_forces_pure_python():
    code = "import enstab._kernel as k; print(k.active_kernel())"
    env = dict(os.environ, ENSTAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    env.pop("ENSTAB_PURE_PYTHON")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "compiled"
