"""Kernel selection: compiled stepper when available, pure Python otherwise.

Set ``ENSTAB_PURE_PYTHON=1`` in the environment to force the fallback even
when the extension built.  ``active_kernel()`` reports which one is live.
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import _kernel_py
from ._rhs import RhsSpec

_FORCE_PURE = os.environ.get("ENSTAB_PURE_PYTHON", "").strip().lower() in {"1", "true", "yes"}

if _FORCE_PURE:
    _compiled = None
else:
    try:
        from . import _kernel_c as _compiled
    except ImportError:
        _compiled = None

_DUMMY = np.zeros(2, dtype=np.float64)


def active_kernel() -> str:
    return "compiled" if _compiled is not None else "python"


def integrate_raw(rhs, t0, y0, t1, rtol, atol, max_step=math.inf, stop_comp=-1):
    """Run the stepper and return (ts, states, dense, status) as ndarrays.

    ``rhs`` is either a plain callable ``(t, y) -> sequence`` or an
    ``RhsSpec``; only the latter can take the compiled path.
    """
    if _compiled is not None and isinstance(rhs, RhsSpec) and rhs.compiled_ok():
        if rhs.use_potential:
            pu = np.ascontiguousarray(rhs.pot_u, dtype=np.float64)
            pdu = np.ascontiguousarray(rhs.pot_du, dtype=np.float64)
        else:
            pu = pdu = _DUMMY
        ts, ys, fs, status = _compiled.integrate_c(
            rhs.kind, rhs.dim_n, rhs.c0, rhs.cr2, rhs.cap_lambda,
            rhs.nl_kind, rhs.nl_p, rhs.nl_a, rhs.nl_b,
            pu, pdu, rhs.pot_spacing, rhs.use_potential,
            float(t0), float(y0[0]), float(y0[1]), float(t1),
            float(rtol), float(atol), float(max_step), int(stop_comp),
        )
        return ts, ys, fs, status

    fn = rhs.eval if isinstance(rhs, RhsSpec) else rhs
    ts, ys, fs, status = _kernel_py.integrate_raw(
        fn, t0, y0, t1, rtol, atol, max_step=max_step, stop_comp=stop_comp
    )
    return (
        np.asarray(ts, dtype=np.float64),
        np.asarray(ys, dtype=np.float64),
        np.asarray(fs, dtype=np.float64).reshape(len(ts) - 1, len(y0), 4),
        status,
    )
