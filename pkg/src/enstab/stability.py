"""Second-variation data and stability verdicts for stationary pairs.

The workflow per geometry:

* solve the background profile (``profiles``),
* find the first eigenvalue of the linearized 1-D operator (``spectra``),
* solve the linear h-problem that transports the first cross-section
  Neumann mode to the generator interval,
* evaluate the second variation on that mode, either directly from the
  boundary data of h or through the integral identity that the theory
  provides, and compare the two routes,
* turn the numbers into a verdict: stable, unstable, marginal at the
  threshold, or indeterminate when the spectral positivity assumption
  fails and the theory is silent.

Everything here is linear once the profile exists, so the h-solvers use a
single shot plus rescaling instead of iteration; resonance of the
homogeneous problem shows up as a vanishing normalizer and is trapped.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _rhs
from ._rhs import RhsSpec
from .errors import ResonanceError
from .ode_core import Grid, composite_simpson, find_root, integrate_ivp
from .profiles import (CONE, CYLINDER, NonlinearitySpec, Profile, ShootConfig,
                       _hermite_array, solve_1d, solve_radial)
from .spectra import alpha_spectrum, nuhat_first, _potential_spec

_H_TOL = 1e-12
_H_EPS = 1e-6
_MARGIN = 1e-8
_RESONANCE_CUT = 1e-12


@dataclass(frozen=True)
class HProfile:
    """Auxiliary linear mode solved at one cross-section eigenvalue.

    ``dh`` holds the derivative samples; its first entry is NaN on the cone
    when the indicial exponent is below one, where h' blows up at the
    center while h itself still vanishes.  ``gamma`` is that exponent
    (NaN for slab modes) and ``dense``, when present, carries the scaled
    shooting trajectory so diagnostics can sample h off the grid without
    fighting the fractional-power corner.
    """

    lam: float
    grid: Grid
    h: np.ndarray
    dh: np.ndarray
    dh_at_1: float
    h_at_0: float
    gamma: float = float("nan")
    dense: tuple | None = field(default=None, repr=False, compare=False)


_UNSET = object()


def _shoot_h(profile: Profile, t0, y0, n_dim: float, c0: float, cr2: float):
    spec = _potential_spec(profile, c0, cr2, n_dim)
    return integrate_ivp(spec, t0, y0, 1.0, _H_TOL, _H_TOL)


def _scale_or_resonate(traj, du1: float, lam: float):
    mesh = np.linspace(traj.t_start, 1.0, 257)
    peak = float(np.max(np.abs(traj.eval(mesh)[:, 0])))
    end = float(traj.final_state[0])
    if abs(end) <= _RESONANCE_CUT * peak:
        raise ResonanceError(
            f"homogeneous solution vanishes at r = 1 for lambda = {lam!r}; "
            "the linear problem is resonant (a singular eigenvalue sits at "
            "-lambda)"
        )
    return -du1 / end


def solve_h_cone(profile: Profile, lam: float) -> HProfile:
    """Bounded solution of the singular h-problem with h(1) = -u'(1).

    The center behavior is h ~ r^gamma with gamma the positive root of
    gamma^2 + (N-2)gamma = lambda, which is how the problem encodes
    vanishing at the cone vertex; the launch uses that exponent directly.
    Callers should sit in the nondegenerate regime (lambda above the
    negative of the first singular eigenvalue); resonance is trapped
    otherwise.
    """
    if profile.geometry != CONE:
        raise ValueError("solve_h_cone expects a cone profile")
    if not lam > 0.0:
        raise ValueError("the cross-section eigenvalue must be positive")
    n_dim = float(profile.N)
    gamma = 0.5 * (-(n_dim - 2.0) + math.sqrt((n_dim - 2.0) ** 2 + 4.0 * lam))
    eps = _H_EPS
    traj = _shoot_h(profile, eps,
                    (eps**gamma, gamma * eps ** (gamma - 1.0)),
                    n_dim, c0=0.0, cr2=-lam)
    scale = _scale_or_resonate(traj, profile.du_at_1, lam)
    grid = profile.grid
    sampled = traj.eval(grid.nodes[1:])
    h = np.empty(grid.count)
    dh = np.empty(grid.count)
    h[0] = 0.0
    dh[0] = 0.0 if gamma > 1.0 else (scale if gamma == 1.0 else np.nan)
    h[1:] = scale * sampled[:, 0]
    dh[1:] = scale * sampled[:, 1]
    return HProfile(lam=float(lam), grid=grid, h=h, dh=dh,
                    dh_at_1=float(scale * traj.final_state[1]),
                    h_at_0=0.0, gamma=gamma,
                    dense=(traj, scale, eps))


def solve_h_cylinder(profile: Profile, lam: float) -> HProfile:
    """Even solution of -h'' - f'(u)h = -lambda h with h(1) = -u'(1)."""
    if profile.geometry != CYLINDER:
        raise ValueError("solve_h_cylinder expects a slab profile")
    if not lam > 0.0:
        raise ValueError("the cross-section eigenvalue must be positive")
    traj = _shoot_h(profile, 0.0, (1.0, 0.0), 1.0, c0=-lam, cr2=0.0)
    scale = _scale_or_resonate(traj, profile.du_at_1, lam)
    grid = profile.grid
    sampled = traj.eval(grid.nodes)
    h = scale * sampled[:, 0]
    dh = scale * sampled[:, 1]
    dh[0] = 0.0
    return HProfile(lam=float(lam), grid=grid, h=h, dh=dh,
                    dh_at_1=float(scale * traj.final_state[1]),
                    h_at_0=float(h[0]))


def mode_second_variation(profile: Profile, h: HProfile) -> float:
    """Constrained second variation on the normalized mode at h.lam.

    Boundary-data route: the value reduces to an expression in u'(1),
    u''(1), h'(1), and (slab case) f(0).
    """
    du1 = profile.du_at_1
    if profile.geometry == CONE:
        return -du1 * (h.dh_at_1 + profile.d2u_at_1)
    f0 = float(profile.nonlinearity.f(0.0))
    return -du1 * h.dh_at_1 + du1 * f0


def rho_index(profile: Profile, h1: HProfile) -> float:
    """Integral route to the slab second variation at lambda1 = h1.lam.

    rho = -f(u(0)) h1(0) - lambda1 * int_0^1 h1 u' dx.  Negative rho means
    the boundary mode lowers the energy, i.e. instability.
    """
    if profile.geometry != CYLINDER:
        raise ValueError("rho_index is the slab-side quantity")
    nl = profile.nonlinearity
    integrand = h1.h * profile.du
    integrand[0] = 0.0
    quad = composite_simpson(integrand, profile.grid.spacing)
    return -float(nl.f(profile.u_at_0)) * h1.h_at_0 - h1.lam * quad


def _du_second_derivative(profile: Profile) -> np.ndarray:
    """u''' is not stored; recover u'' at the nodes from the equation."""
    n_dim = float(profile.N)
    r = profile.grid.nodes
    d2u = np.empty(r.size)
    d2u[1:] = -profile.nonlinearity.f(profile.u[1:]) \
        - (n_dim - 1.0) * profile.du[1:] / r[1:]
    d2u[0] = -float(profile.nonlinearity.f(profile.u_at_0)) / n_dim
    return d2u


def _cone_mode_integral(profile: Profile, h1: HProfile) -> float:
    """int_0^1 r^(N-3) h1 u' dr, with the vertex corner handled.

    h1 behaves like r^gamma at the vertex and gamma drops below one for
    small lambda, so fixed-grid Simpson on the raw integrand loses most of
    its order there.  Substituting r = t^2 lifts the corner exponent past
    three, which restores fourth-order convergence, but it needs h between
    grid nodes: the dense trajectory stored on the HProfile provides that,
    with the indicial power continuing it below the launch radius.  u' is
    interpolated from its own samples using u'' from the equation.
    """
    n_dim = float(profile.N)
    if h1.dense is None:
        rs = profile.grid.nodes
        integrand = np.empty(rs.size)
        integrand[1:] = rs[1:] ** (n_dim - 3.0) * h1.h[1:] * profile.du[1:]
        integrand[0] = 0.0
        return composite_simpson(integrand, profile.grid.spacing)
    traj, scale, eps = h1.dense
    m = 4097
    t = np.linspace(0.0, 1.0, m)
    r = t * t
    hv = np.empty(m)
    small = r < eps
    hv[small] = scale * r[small] ** h1.gamma
    hv[~small] = scale * traj.eval(r[~small])[:, 0]
    duv = _hermite_array(profile.du, _du_second_derivative(profile),
                         profile.grid.spacing, r)
    integrand = np.zeros(m)
    integrand[1:] = 2.0 * t[1:] * r[1:] ** (n_dim - 3.0) * hv[1:] * duv[1:]
    return composite_simpson(integrand, t[1] - t[0])


def cone_identity_residual(profile: Profile, h1: HProfile) -> float:
    """Two-route check of the cone second variation.

    Boundary route: -u'(1)(h1'(1) + u''(1)).  Integral route:
    (N - 1 - lambda1) * int_0^1 r^(N-3) h1 u' dr.  Both are computed
    independently; their difference is a direct a-posteriori error bound
    on the whole pipeline (profile, eigenvalue, h-solve, quadrature).
    """
    if profile.geometry != CONE:
        raise ValueError("cone_identity_residual expects a cone profile")
    n_dim = float(profile.N)
    lhs = -profile.du_at_1 * (h1.dh_at_1 + profile.d2u_at_1)
    rhs = (n_dim - 1.0 - h1.lam) * _cone_mode_integral(profile, h1)
    return abs(lhs - rhs)


def cylinder_identity_residual(profile: Profile, h1: HProfile) -> float:
    """Two-route check of the slab second variation via integration by parts.

    -h1'(1) u'(1) should equal -f(0)u'(1) - f(u(0))h1(0) - lambda1
    int_0^1 h1 u' dx.
    """
    if profile.geometry != CYLINDER:
        raise ValueError("cylinder_identity_residual expects a slab profile")
    nl = profile.nonlinearity
    du1 = profile.du_at_1
    lhs = -h1.dh_at_1 * du1
    integrand = h1.h * profile.du
    integrand[0] = 0.0
    quad = composite_simpson(integrand, profile.grid.spacing)
    rhs = (-float(nl.f(0.0)) * du1
           - float(nl.f(profile.u_at_0)) * h1.h_at_0
           - h1.lam * quad)
    return abs(lhs - rhs)


def lagrange_multiplier(profile: Profile) -> float:
    """mu = -u'(1)^2 / 2, always negative for a nontrivial profile."""
    return -0.5 * profile.du_at_1**2


def torsion_beta() -> float:
    """Positive root of sqrt(t) tanh(sqrt(t)) = 1, the torsion threshold."""
    return find_root(lambda t: math.sqrt(t) * math.tanh(math.sqrt(t)) - 1.0,
                     1.0, 2.0, tol=1e-13)


@dataclass(frozen=True)
class StabilityReport:
    """Classification outcome with the evidence that produced it."""

    geometry: str
    N: int
    lambda1: float
    first_1d_eigenvalue: object
    d1: float | None
    rho: float | None
    identity_residual: float | None
    lagrange_multiplier: float
    verdict: str
    theorem_basis: str

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry,
            "N": self.N,
            "lambda1": self.lambda1,
            "first_eigenvalue": self.first_1d_eigenvalue,
            "d1": self.d1,
            "rho": self.rho,
            "identity_residual": self.identity_residual,
            "mu": self.lagrange_multiplier,
            "verdict": self.verdict,
            "theorem_basis": self.theorem_basis,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def classify_cone(nl: NonlinearitySpec, N: int, lambda1: float, *,
                  profile: Profile | None = None, nuhat=_UNSET,
                  shoot_config: ShootConfig | None = None) -> StabilityReport:
    """Verdict for the cone pair at the given first Neumann eigenvalue.

    Unstable when lambda1 lies strictly between the singular-spectrum
    bound and N-1; stable above N-1; marginal within 1e-8 of N-1; and
    indeterminate at or below the bound, where the theory is silent.  The
    report carries the first-mode second variation and the two-route
    identity residual as numerical evidence.  ``profile`` and ``nuhat``
    let callers that scan many lambda1 values reuse the expensive pieces
    (pass nuhat=None to assert the no-nonpositive-eigenvalue verdict).
    """
    if N < 3:
        raise ValueError("cone classification needs N >= 3")
    if not lambda1 > 0.0:
        raise ValueError("lambda1 must be positive")
    if profile is None:
        profile = solve_radial(nl, N, shoot_config)
    if nuhat is _UNSET:
        nuhat = nuhat_first(profile)
    nu1 = None if nuhat is None else float(getattr(nuhat, "value", nuhat))
    first = "nonnegative" if nu1 is None else nu1
    bound = 0.0 if nu1 is None else -nu1
    d1 = rho = resid = None
    if lambda1 > bound:
        h1 = solve_h_cone(profile, lambda1)
        d1 = mode_second_variation(profile, h1)
        resid = cone_identity_residual(profile, h1)
    threshold = float(N - 1)
    if not lambda1 > bound:
        verdict = "indeterminate"
        basis = ("positivity bound fails: lambda1 <= -nu1, the variational "
                 "theory gives no verdict here")
    elif abs(lambda1 - threshold) < _MARGIN:
        verdict = "marginal"
        basis = ("lambda1 = N-1: the first-mode second variation vanishes "
                 "(ball threshold, semistable direction)")
    elif lambda1 < threshold:
        verdict = "unstable"
        basis = ("-nu1 < lambda1 < N-1: the first boundary mode has "
                 "negative second variation")
    else:
        verdict = "stable"
        basis = ("lambda1 > N-1 and above the singular-spectrum bound: "
                 "all boundary modes have positive second variation")
    return StabilityReport(
        geometry="cone", N=int(N), lambda1=float(lambda1),
        first_1d_eigenvalue=first, d1=d1, rho=rho,
        identity_residual=resid,
        lagrange_multiplier=lagrange_multiplier(profile),
        verdict=verdict, theorem_basis=basis,
    )


def _sufficient_gap(profile: Profile, lambda1: float, alpha1: float) -> bool:
    nl = profile.nonlinearity
    if float(nl.f(0.0)) != 0.0:
        return False
    sup_fp = float(np.max(np.abs(nl.fprime(profile.u))))
    return lambda1 > max(-alpha1, sup_fp)


def classify_cylinder(nl: NonlinearitySpec, lambda1: float, *,
                      profile: Profile | None = None,
                      alpha1: float | None = None,
                      shoot_config: ShootConfig | None = None) -> StabilityReport:
    """Verdict for the cylinder pair by the sign of rho at lambda1.

    Indeterminate at or below -alpha1 (the positivity theory needs
    lambda1 > -alpha1); otherwise the sign of rho decides, with a 1e-8
    marginality band.  The basis string records when the stronger
    spectral-gap condition holds (f(0) = 0 and lambda1 above both -alpha1
    and sup|f'(u)|), and for the torsion nonlinearity the position of
    lambda1 against the sharp threshold.
    """
    if not lambda1 > 0.0:
        raise ValueError("lambda1 must be positive")
    if profile is None:
        profile = solve_1d(nl, shoot_config)
    if alpha1 is None:
        alpha1 = alpha_spectrum(profile, 1)[0].value
    d1 = rho = resid = None
    if lambda1 > -alpha1:
        h1 = solve_h_cylinder(profile, lambda1)
        rho = rho_index(profile, h1)
        d1 = mode_second_variation(profile, h1)
        resid = cylinder_identity_residual(profile, h1)
    if not lambda1 > -alpha1:
        verdict = "indeterminate"
        basis = ("positivity bound fails: lambda1 <= -alpha1, the "
                 "variational theory gives no verdict here")
    elif abs(rho) < _MARGIN:
        verdict = "marginal"
        basis = "rho = 0 within tolerance: threshold case, no sign verdict"
    elif rho < 0.0:
        verdict = "unstable"
        basis = "rho < 0: the first boundary mode lowers the energy"
    else:
        verdict = "stable"
        basis = ("rho > 0 with lambda1 > -alpha1: second variation positive "
                 "on all boundary modes")
    if _sufficient_gap(profile, lambda1, alpha1):
        basis += ("; spectral-gap condition also holds (f(0)=0 and lambda1 "
                  "> max(-alpha1, sup|f'(u)|))")
    if nl.kind == "torsion":
        beta = torsion_beta()
        side = "above" if lambda1 > beta else ("at" if lambda1 == beta
                                               else "below")
        basis += f"; torsion threshold beta = {beta:.12g}, lambda1 {side} beta"
    return StabilityReport(
        geometry="cylinder", N=int(profile.N), lambda1=float(lambda1),
        first_1d_eigenvalue=float(alpha1), d1=d1, rho=rho,
        identity_residual=resid,
        lagrange_multiplier=lagrange_multiplier(profile),
        verdict=verdict, theorem_basis=basis,
    )


@dataclass(frozen=True)
class SweepResult:
    """rho as a function of lambda1 on a uniform grid, with sign brackets."""

    rows: list
    brackets: list
    alpha1: float


def sweep_rho(nl: NonlinearitySpec, lambda_lo: float, lambda_hi: float,
              steps: int, shoot_config: ShootConfig | None = None) -> SweepResult:
    """Tabulate rho over [lambda_lo, lambda_hi] on the slab problem.

    The profile and alpha1 are computed once; each row solves one linear
    h-problem.  Consecutive rows with opposite rho signs contribute a
    bracket; the torsion family produces exactly one, at the sharp
    threshold.
    """
    if steps < 1:
        raise ValueError("need at least one sweep step")
    if steps > 1 and not lambda_hi > lambda_lo:
        raise ValueError("need lambda_hi > lambda_lo for a multi-row sweep")
    profile = solve_1d(nl, shoot_config)
    alpha1 = alpha_spectrum(profile, 1)[0].value
    if not lambda_lo > -alpha1:
        raise ValueError(
            f"sweep must start above -alpha1 = {-alpha1!r} to stay in the "
            "regime where rho decides"
        )
    lams = (np.array([lambda_lo]) if steps == 1
            else np.linspace(lambda_lo, lambda_hi, steps))
    rows = []
    for lam in lams:
        h1 = solve_h_cylinder(profile, float(lam))
        rho = rho_index(profile, h1)
        if abs(rho) < _MARGIN:
            verdict = "marginal"
        else:
            verdict = "unstable" if rho < 0.0 else "stable"
        rows.append((float(lam), rho, verdict))
    brackets = []
    for (la, ra, va), (lb, rb, vb) in zip(rows, rows[1:]):
        if ra == 0.0 or (ra > 0.0) != (rb > 0.0):
            brackets.append((la, lb))
    return SweepResult(rows=rows, brackets=brackets, alpha1=float(alpha1))


def sweep_to_csv(result: SweepResult, destination) -> None:
    rows = ["lambda1,rho,verdict"]
    for lam, rho, verdict in result.rows:
        rows.append(f"{lam:.17g},{rho:.17g},{verdict}")
    text = "\n".join(rows) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", newline="\n") as fh:
            fh.write(text)


def hprime_monotonicity_check(profile: Profile, lambdas) -> tuple:
    """Whether h'(1) strictly increases along an ascending eigenvalue list.

    Returns (True, None) or (False, witness) with witness the violating
    (lambda_j, lambda_k, dh_j, dh_k).  Repeated lambdas must reproduce the
    same derivative to 1e-12 and do not count as violations.
    """
    lams = [float(x) for x in lambdas]
    if any(b < a for a, b in zip(lams, lams[1:])):
        raise ValueError("lambdas must be ascending")
    solver = solve_h_cone if profile.geometry == CONE else solve_h_cylinder
    dhs = [solver(profile, lam).dh_at_1 for lam in lams]
    for j in range(len(lams) - 1):
        la, lb = lams[j], lams[j + 1]
        da, db = dhs[j], dhs[j + 1]
        if la == lb:
            if abs(db - da) > 1e-12 * max(1.0, abs(da)):
                return False, (la, lb, da, db)
            continue
        if db - da < -1e-9:
            return False, (la, lb, da, db)
    return True, None
