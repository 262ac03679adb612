"""Right-hand-side descriptors understood by both integrator kernels.

Every ODE in the package is one of three second-order scalar problems,
written as a first-order system in y = (value, derivative):

* ``PROFILE``     u'' = -f(u) - (N-1)/t * u'
* ``LINEARIZED``  z'' = -(N-1)/t * z' - (q(t) + c0 + cr2/t^2) * z
* ``CAP``         g'' = -(N-2)*cot(t) * g' - (lam - (N-2)/sin(t)^2) * g

with N = 1 collapsing the radial friction term, which is how the slab
problems reuse the same forms.  The potential q(t) = f'(u(t)) is evaluated
through a cubic Hermite interpolant of the stored profile samples, so a
descriptor is self-contained and cheap to hand to compiled code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PROFILE = 0
LINEARIZED = 1
CAP = 2

NL_TORSION = 0
NL_LANE_EMDEN = 1
NL_LINEAR = 2
NL_OTHER = 3


def hermite_scalar(u, du, spacing, x):
    """Evaluate the cubic Hermite interpolant of uniform samples at one point."""
    n = u.shape[0]
    s = x / spacing
    i = int(s)
    if i < 0:
        i = 0
    elif i > n - 2:
        i = n - 2
    w = s - i
    w2 = w * w
    w3 = w2 * w
    return (
        u[i] * (2.0 * w3 - 3.0 * w2 + 1.0)
        + du[i] * spacing * (w3 - 2.0 * w2 + w)
        + u[i + 1] * (3.0 * w2 - 2.0 * w3)
        + du[i + 1] * spacing * (w3 - w2)
    )


@dataclass(eq=False)
class RhsSpec:
    """Self-describing right-hand side, dispatchable to the compiled kernel.

    ``f`` and ``fprime`` are the scalar nonlinearity callables used by the
    pure-Python path; ``nl_kind``/``nl_p``/``nl_a``/``nl_b`` carry the same
    information as plain numbers for the compiled path.  ``nl_kind`` is
    ``NL_OTHER`` for nonlinearities the compiled kernel cannot represent.
    """

    kind: int
    dim_n: float = 1.0
    c0: float = 0.0
    cr2: float = 0.0
    cap_lambda: float = 0.0
    nl_kind: int = NL_TORSION
    nl_p: float = 0.0
    nl_a: float = 0.0
    nl_b: float = 0.0
    f: object = None
    fprime: object = None
    pot_u: np.ndarray | None = None
    pot_du: np.ndarray | None = None
    pot_spacing: float = 0.0
    use_potential: bool = False
    meta: dict = field(default_factory=dict)

    def compiled_ok(self) -> bool:
        if self.kind == CAP:
            return True
        if self.kind == PROFILE:
            return self.nl_kind != NL_OTHER
        return (not self.use_potential) or self.nl_kind != NL_OTHER

    def eval(self, t, y):
        """Pure-Python evaluation; mirrors the compiled dispatch exactly."""
        if self.kind == PROFILE:
            u, v = y
            acc = -self.f(u)
            if self.dim_n != 1.0:
                acc -= (self.dim_n - 1.0) * v / t
            return (v, acc)
        if self.kind == LINEARIZED:
            z, w = y
            q = self.c0
            if self.use_potential:
                q += self.fprime(hermite_scalar(self.pot_u, self.pot_du, self.pot_spacing, t))
            if self.cr2 != 0.0:
                q += self.cr2 / (t * t)
            acc = -q * z
            if self.dim_n != 1.0:
                acc -= (self.dim_n - 1.0) * w / t
            return (w, acc)
        # CAP
        g, gp = y
        sn = math.sin(t)
        co = math.cos(t)
        nm2 = self.dim_n - 2.0
        return (gp, -nm2 * (co / sn) * gp - (self.cap_lambda - nm2 / (sn * sn)) * g)
