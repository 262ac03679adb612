"""Reusable numerical kernels: adaptive integration, root finding, node counts.

The integrator is an adaptive Dormand-Prince 5(4) pair with dense output;
see ``_kernel_py`` for the tableau.  ``find_root`` is a bracketed Brent-style
hybrid.  ``count_nodes`` implements the sign-change convention used by the
oscillation arguments throughout the package: exact zeros separate segments
and endpoint zeros are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernel import active_kernel, integrate_raw
from .errors import BracketError, ConvergenceError

__all__ = [
    "Grid",
    "Trajectory",
    "uniform_grid",
    "integrate_ivp",
    "find_root",
    "count_nodes",
    "composite_simpson",
    "composite_boole",
    "active_kernel",
]


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing sample nodes on the unit interval, last node 1."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=np.float64)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("grid needs at least two nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("grid nodes must be strictly increasing")
        if nodes[0] < 0 or nodes[-1] != 1.0:
            raise ValueError("grid must live in [0, 1] with last node exactly 1")

    @property
    def count(self) -> int:
        return self.nodes.size

    @property
    def spacing(self) -> float:
        return float(self.nodes[1] - self.nodes[0])


def uniform_grid(count: int = 1025) -> Grid:
    """Uniform grid on [0, 1]; the default 1025 = 2**10 + 1 nests under refinement."""
    return Grid(np.linspace(0.0, 1.0, count))


class Trajectory:
    """Accepted integration nodes plus a piecewise-quartic dense interpolant.

    ``ts`` are the accepted abscissae, ``states`` the per-node state vectors.
    ``eval`` interpolates anywhere in the covered span with the same local
    order as the stepper, so downstream code samples trajectories instead of
    re-integrating.
    """

    __slots__ = ("ts", "states", "rel_tol", "abs_tol", "status", "_dense")

    def __init__(self, ts, states, dense, rel_tol, abs_tol, status):
        self.ts = ts
        self.states = states
        self._dense = dense
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.status = status

    @property
    def t_start(self) -> float:
        return float(self.ts[0])

    @property
    def t_end(self) -> float:
        return float(self.ts[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def stopped_early(self) -> bool:
        return self.status == 1

    def eval(self, t):
        """Dense-output evaluation; scalar t gives a state vector, array t a matrix."""
        t_arr = np.asarray(t, dtype=np.float64)
        idx = np.searchsorted(self.ts, t_arr, side="right") - 1
        idx = np.clip(idx, 0, len(self.ts) - 2)
        t_old = self.ts[idx]
        h = self.ts[idx + 1] - t_old
        x = (t_arr - t_old) / h
        powers = np.stack([x, x * x, x**3, x**4], axis=-1)
        out = self.states[idx] + np.einsum("...cj,...j->...c", self._dense[idx], powers)
        return out

    def eval1(self, t: float, component: int = 0) -> float:
        """Scalar fast path used inside root refinement loops."""
        ts = self.ts
        i = int(np.searchsorted(ts, t, side="right")) - 1
        if i < 0:
            i = 0
        elif i > len(ts) - 2:
            i = len(ts) - 2
        h = ts[i + 1] - ts[i]
        x = (t - ts[i]) / h
        c = self._dense[i, component]
        return float(self.states[i, component] + x * (c[0] + x * (c[1] + x * (c[2] + x * c[3]))))


def integrate_ivp(rhs, t_start, y_start, t_end, rel_tol=1e-10, abs_tol=1e-10,
                  max_step=math.inf, stop_on_sign_change=None) -> Trajectory:
    """Integrate y' = rhs(t, y) from t_start to t_end adaptively.

    Parameters
    ----------
    rhs : callable or RhsSpec
        Right-hand side. Callables receive (t, y) with y a sequence.
    t_start, t_end : float
        Forward span, t_start < t_end.
    rel_tol, abs_tol : float
        Local error control per step (scaled RMS over components).
    max_step : float
        Optional cap on the step size.
    stop_on_sign_change : int or None
        When set, integration stops after the first accepted step across
        which this state component changes sign; the returned trajectory
        then has ``stopped_early`` set and its last step brackets the zero.

    Raises
    ------
    StepSizeUnderflow
        If error control pushes the step below machine resolution.
    NonFiniteState
        If the state or slope overflows, reported with the failing t.
    """
    if not (t_end > t_start):
        raise ValueError("t_end must exceed t_start")
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    stop = -1 if stop_on_sign_change is None else int(stop_on_sign_change)
    ts, states, dense, status = integrate_raw(
        rhs, t_start, y_start, t_end, rel_tol, abs_tol, max_step=max_step, stop_comp=stop
    )
    return Trajectory(ts, states, dense, rel_tol, abs_tol, status)


def find_root(fn, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 100) -> float:
    """Locate a root of fn inside [lo, hi] by Brent's bracketed hybrid.

    Requires a sign change over the bracket (a zero endpoint is returned
    directly).  Terminates when the bracket half-width falls below
    ``tol/2 + 2*eps*|x|`` and is insensitive to which endpoint carries the
    negative sign.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("bracket endpoints must be finite")
    if lo > hi:
        lo, hi = hi, lo
    a, b = lo, hi
    fa = fn(a)
    fb = fn(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: f(lo)={fa!r}, f(hi)={fb!r}")

    c, fc = a, fa
    d = e = b - a
    for _ in range(max_iter):
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 0.5 * tol + 2.0 * abs(b) * np.finfo(float).eps
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0:
            return b
        if abs(e) < tol1 or abs(fa) <= abs(fb):
            d = e = m
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                t = fb / fc
                p = s * (2.0 * m * q * (q - t) - (b - a) * (t - 1.0))
                q = (q - 1.0) * (t - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * m * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = e = m
        a, fa = b, fb
        if abs(d) > tol1:
            b += d
        else:
            b += tol1 if m > 0.0 else -tol1
        fb = fn(b)
    raise ConvergenceError(f"find_root exceeded {max_iter} iterations on [{lo!r}, {hi!r}]")


def count_nodes(samples) -> int:
    """Count strict sign changes of a sample sequence.

    Exact zeros at the ends are ignored; an exact interior zero acts as the
    boundary between two segments and never contributes two changes.
    """
    vals = np.asarray(samples, dtype=np.float64)
    if vals.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    if not np.all(np.isfinite(vals)):
        raise ValueError("samples must be finite")
    signs = np.sign(vals)
    signs = signs[signs != 0.0]
    if signs.size < 2:
        return 0
    return int(np.sum(signs[1:] != signs[:-1]))


def composite_simpson(values, spacing: float) -> float:
    """Composite Simpson rule on a uniform grid with an odd sample count."""
    y = np.asarray(values, dtype=np.float64)
    if y.size < 3 or y.size % 2 == 0:
        raise ValueError("Simpson rule needs an odd number of samples, at least 3")
    w = np.ones(y.size)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(spacing / 3.0 * np.dot(w, y))


def composite_boole(values, spacing: float) -> float:
    """Composite Boole rule; sample count must be 4k + 1."""
    y = np.asarray(values, dtype=np.float64)
    if y.size < 5 or (y.size - 1) % 4 != 0:
        raise ValueError("Boole rule needs 4k + 1 samples")
    w = np.full(y.size, 32.0)
    w[0::4] = 14.0
    w[2::4] = 12.0
    w[0] = 7.0
    w[-1] = 7.0
    return float(2.0 * spacing / 45.0 * np.dot(w, y))
