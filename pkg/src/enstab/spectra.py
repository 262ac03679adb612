"""Eigenvalue solvers for the linearized operators and cross-section data.

Three one-dimensional spectra drive the stability classification:

* the alpha-spectrum of -z'' - f'(u)z on (0,1) with z'(0) = z(1) = 0,
  for slab backgrounds;
* the first eigenvalue of the singular radial problem
  -z'' - (N-1)/r z' - f'(u)z = nu/r^2 z, z(1) = 0, z bounded at 0,
  for cone backgrounds (only its nonpositive part is meaningful, so the
  search reports either a negative value or the verdict "no nonpositive
  eigenvalue");
* first nontrivial Neumann eigenvalues of the cross-section domain,
  either by closed form (interval, rectangle, disk) or by shooting on the
  polar reduction (spherical caps).

A two-dimensional finite-difference eigensolver is included as a desk-scale
cross-check that the product-cylinder spectrum really is the sum of the 1-D
spectrum and the cross-section spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _rhs
from ._rhs import RhsSpec
from .errors import BracketError, EigenSearchError
from .ode_core import Grid, count_nodes, find_root, integrate_ivp
from .profiles import CONE, CYLINDER, Profile

_REFINE_TOL = 1e-12
_NODE_MESH = 640
_SINGULAR_EPS = 1e-6
_CAP_EPS = 1e-4
_SHOT_TOL = 1e-11


@dataclass(frozen=True)
class EigenResult:
    """One eigenvalue with its shooting eigenfunction.

    ``index`` counts interior zeros of the eigenfunction, which by Sturm
    oscillation equals the number of eigenvalues strictly below ``value``.
    The samples are normalized to max-abs 1 and carry the boundary zero
    exactly.
    """

    problem_tag: str
    index: int
    value: float
    grid: Grid
    eigenfunction: np.ndarray


def _potential_spec(profile: Profile, c0: float, cr2: float, n_dim: float) -> RhsSpec:
    """Linearized RHS around the given profile with extra shifts c0 + cr2/t^2."""
    nl = profile.nonlinearity
    code, p, a, b = nl.kernel_codes()
    if code == _rhs.NL_TORSION:
        return RhsSpec(kind=_rhs.LINEARIZED, dim_n=n_dim, c0=c0, cr2=cr2)
    if code == _rhs.NL_LINEAR:
        return RhsSpec(kind=_rhs.LINEARIZED, dim_n=n_dim, c0=c0 + a, cr2=cr2)
    return RhsSpec(
        kind=_rhs.LINEARIZED, dim_n=n_dim, c0=c0, cr2=cr2,
        nl_kind=code, nl_p=p, nl_a=a, nl_b=b,
        fprime=nl.fprime, pot_u=profile.u, pot_du=profile.du,
        pot_spacing=profile.grid.spacing, use_potential=True,
    )


class _LinearizedShot:
    """Cached endpoint/node-count evaluations of one linearized shooting map.

    ``spectral_slot`` names which coefficient the search parameter occupies:
    "c0" for the regular slab problem, "cr2" for the singular radial one.
    """

    def __init__(self, profile, n_dim, spectral_slot, launch):
        self.profile = profile
        self.n_dim = n_dim
        self.slot = spectral_slot
        self.launch = launch
        self._cache = {}
        self._mesh = None

    def _spec(self, x):
        if self.slot == "c0":
            return _potential_spec(self.profile, x, 0.0, self.n_dim)
        return _potential_spec(self.profile, 0.0, x, self.n_dim)

    def trajectory(self, x):
        t0, y0 = self.launch(x)
        return integrate_ivp(self._spec(x), t0, y0, 1.0, _SHOT_TOL, _SHOT_TOL)

    def __call__(self, x):
        hit = self._cache.get(x)
        if hit is not None:
            return hit
        traj = self.trajectory(x)
        if self._mesh is None:
            self._mesh = np.linspace(traj.t_start, 1.0, _NODE_MESH + 1)[:-1]
        samples = traj.eval(self._mesh)[:, 0]
        out = (float(traj.final_state[0]), count_nodes(samples))
        self._cache[x] = out
        return out

    def endpoint(self, x):
        return self(x)[0]

    def nodes(self, x):
        return self(x)[1]


def _bracket_by_nodes(shot, lo, hi, want, widen_cap=60):
    """Shrink [lo, hi] until it isolates the eigenvalue of index want-1.

    The predicate "node count >= want" is monotone in the spectral
    parameter, so plain bisection on it lands on the want-th eigenvalue;
    the interval is then shrunk further until the counts at the ends differ
    by exactly one, which guarantees a sign change of the endpoint map.
    """
    n_hi = shot.nodes(hi)
    grow = max(abs(hi - lo), 1.0)
    while n_hi < want:
        if widen_cap == 0:
            raise EigenSearchError(
                f"bracket expansion cap reached hunting eigenvalue {want}; "
                f"node count at {hi!r} is still {n_hi}"
            )
        widen_cap -= 1
        lo, hi = hi, hi + grow
        grow *= 2.0
        n_hi = shot.nodes(hi)
    a, b = lo, hi
    for _ in range(240):
        na, nb = shot.nodes(a), shot.nodes(b)
        if na == want - 1 and nb == want:
            return a, b
        m = 0.5 * (a + b)
        if m == a or m == b:
            raise EigenSearchError(
                f"node count stays ambiguous at machine resolution near {m!r}; "
                "tighten the shooting tolerances"
            )
        if shot.nodes(m) >= want:
            b = m
        else:
            a = m
    raise EigenSearchError(
        f"could not isolate eigenvalue {want} by node count in ({lo!r}, {hi!r})"
    )


def _refined_eigen(shot, tag, want, a, b, grid, zero_left=False):
    value = find_root(shot.endpoint, a, b, tol=_REFINE_TOL)
    traj = shot.trajectory(value)
    samples = np.empty(grid.count)
    rs = grid.nodes
    if zero_left:
        samples[0] = 0.0
        samples[1:-1] = traj.eval(rs[1:-1])[:, 0]
    else:
        samples[:-1] = traj.eval(rs[:-1])[:, 0]
    samples[-1] = 0.0
    samples = samples / np.max(np.abs(samples))
    idx = count_nodes(samples)
    if idx != want - 1:
        raise EigenSearchError(
            f"eigenfunction at {value!r} has {idx} interior nodes, expected "
            f"{want - 1}; tighten the shooting tolerances"
        )
    return EigenResult(problem_tag=tag, index=idx, value=value,
                       grid=grid, eigenfunction=samples)


def alpha_spectrum(profile: Profile, k: int) -> list:
    """The k smallest eigenvalues of -z'' - f'(u)z with z'(0) = z(1) = 0.

    Eigenvalues are isolated by the interior node count of the shooting
    solution and refined by bracketed root finding on z(1; alpha); the i-th
    eigenfunction comes out with i-1 interior zeros.
    """
    if profile.geometry != CYLINDER:
        raise ValueError("alpha_spectrum expects a slab profile")
    if k < 1:
        raise ValueError("need at least one eigenvalue")
    qmax = float(np.max(profile.nonlinearity.fprime(profile.u)))
    floor = -qmax - 1e-6
    shot = _LinearizedShot(profile, 1.0, "c0", lambda x: (0.0, (1.0, 0.0)))
    if shot.nodes(floor) != 0:
        raise EigenSearchError(
            "shooting solution already oscillates at the spectral floor; "
            "tighten the shooting tolerances"
        )
    out = []
    lo = floor
    hi = floor + 12.0
    for want in range(1, k + 1):
        a, b = _bracket_by_nodes(shot, lo, hi, want)
        out.append(_refined_eigen(shot, "alpha", want, a, b, profile.grid))
        lo, hi = out[-1].value + 1e-9, max(hi, out[-1].value + 12.0)
    return out


def _indicial_gamma(n_dim: float, nuhat: float) -> float:
    return 0.5 * (-(n_dim - 2.0) + math.sqrt((n_dim - 2.0) ** 2 - 4.0 * nuhat))


def _singular_launch(n_dim):
    def launch(nuhat):
        g = _indicial_gamma(n_dim, nuhat)
        eps = _SINGULAR_EPS
        return eps, (eps**g, g * eps ** (g - 1.0))

    return launch


def nuhat_first(profile: Profile, search_floor: float | None = None):
    """First eigenvalue of the singular radial problem, if it is negative.

    Returns an EigenResult with a node-free eigenfunction when the first
    eigenvalue lies in (search_floor, 0), and None when no nonpositive
    eigenvalue exists; positive values are never reported because only the
    nonpositive part of this spectrum is variationally defined.  The default
    floor sits just above -(N-1), which bounds the first eigenvalue from
    below for every autonomous nonlinearity.
    """
    if profile.geometry != CONE:
        raise ValueError("nuhat_first expects a cone profile")
    n_dim = float(profile.N)
    if profile.N < 3:
        raise ValueError("the singular spectrum is used for N >= 3")
    floor = -(n_dim - 1.0) + 1e-9 if search_floor is None else float(search_floor)
    if not floor < 0.0:
        raise ValueError("search floor must be negative")
    shot = _LinearizedShot(profile, n_dim, "cr2", _singular_launch(n_dim))
    if shot.nodes(floor) != 0:
        raise EigenSearchError(
            f"shooting solution already oscillates at the search floor "
            f"{floor!r}; the universal lower bound is violated numerically, "
            "tighten the shooting tolerances"
        )
    # march toward 0: any eigenvalue in (floor, 0) flips the endpoint sign
    mesh = np.linspace(floor, 0.0, 49)
    mesh[-1] = -1e-12
    signs = [math.copysign(1.0, shot.endpoint(x)) for x in mesh]
    pick = None
    for j in range(len(mesh) - 1):
        if signs[j] != signs[j + 1]:
            pick = (mesh[j], mesh[j + 1])
            break
    if pick is None:
        return None
    return _refined_eigen(shot, "nuhat", 1, pick[0], pick[1], profile.grid,
                          zero_left=True)


@dataclass(frozen=True)
class NeumannDomainSpec:
    """Cross-section descriptor for the first nontrivial Neumann eigenvalue."""

    kind: str
    length: float = 0.0
    sides: tuple = ()
    radius: float = 0.0
    theta0: float = 0.0
    n_dim: int = 0
    value: float = 0.0

    @classmethod
    def interval(cls, length: float):
        if not length > 0.0:
            raise ValueError("interval length must be positive")
        return cls(kind="interval", length=float(length))

    @classmethod
    def rectangle(cls, a: float, b: float):
        if not (a > 0.0 and b > 0.0):
            raise ValueError("rectangle sides must be positive")
        return cls(kind="rectangle", sides=(float(a), float(b)))

    @classmethod
    def disk(cls, radius: float):
        if not radius > 0.0:
            raise ValueError("disk radius must be positive")
        return cls(kind="disk", radius=float(radius))

    @classmethod
    def spherical_cap(cls, theta0: float, n_dim: int):
        if not 0.0 < theta0 < math.pi:
            raise ValueError("cap angle must lie in (0, pi)")
        if n_dim < 3:
            raise ValueError("cap sections need ambient dimension N >= 3")
        return cls(kind="spherical_cap", theta0=float(theta0), n_dim=int(n_dim))

    @classmethod
    def full_sphere(cls, n_dim: int):
        if n_dim < 2:
            raise ValueError("sphere needs ambient dimension N >= 2")
        return cls(kind="full_sphere", n_dim=int(n_dim))

    @classmethod
    def explicit(cls, value: float):
        if not value > 0.0:
            raise ValueError("explicit first eigenvalue must be positive")
        return cls(kind="explicit_lambda1", value=float(value))


def parse_domain(text: str) -> NeumannDomainSpec:
    """Parse 'interval:L', 'rectangle:a,b', 'disk:R', 'cap:theta0,N', 'sphere:N'."""
    head, sep, tail = text.partition(":")
    head = head.strip().lower()
    try:
        if head == "interval":
            return NeumannDomainSpec.interval(float(tail))
        if head == "rectangle":
            a, b = (float(s) for s in tail.split(","))
            return NeumannDomainSpec.rectangle(a, b)
        if head == "disk":
            return NeumannDomainSpec.disk(float(tail))
        if head == "cap":
            theta0, n = tail.split(",")
            return NeumannDomainSpec.spherical_cap(float(theta0), int(n))
        if head == "sphere":
            return NeumannDomainSpec.full_sphere(int(tail))
    except ValueError as exc:
        raise ValueError(f"bad domain descriptor {text!r}: {exc}") from exc
    raise ValueError(f"unknown domain kind {head!r}")


def _bessel_j0(x: float) -> float:
    acc, term, m = 1.0, 1.0, 0
    q = 0.25 * x * x
    while True:
        m += 1
        term *= -q / (m * m)
        acc += term
        if abs(term) < 1e-18 * max(1.0, abs(acc)):
            return acc


def _bessel_j1(x: float) -> float:
    acc, term, m = 0.5 * x, 0.5 * x, 0
    q = 0.25 * x * x
    while True:
        m += 1
        term *= -q / (m * (m + 1))
        acc += term
        if abs(term) < 1e-18 * max(1.0, abs(acc)):
            return acc


def _bessel_j1_prime(x: float) -> float:
    return _bessel_j0(x) - _bessel_j1(x) / x


def _cap_endpoint(theta0: float, n_dim: int, lam: float) -> float:
    """Neumann defect g'(theta0) of the first-azimuthal-mode polar reduction."""
    eps = _CAP_EPS
    c3 = (2.0 * (n_dim - 2.0) / 3.0 - lam) / (2.0 * n_dim + 2.0)
    y0 = (eps + c3 * eps**3, 1.0 + 3.0 * c3 * eps * eps)
    spec = RhsSpec(kind=_rhs.CAP, dim_n=float(n_dim), cap_lambda=lam)
    traj = integrate_ivp(spec, eps, y0, theta0, _SHOT_TOL, _SHOT_TOL)
    return float(traj.final_state[1])


def _cap_lambda1(theta0: float, n_dim: int) -> float:
    if not 0.05 <= theta0 <= math.pi - 0.05:
        raise EigenSearchError(
            f"cap angle {theta0!r} is too close to the degenerate limits for "
            "the shooting reduction; stay within [0.05, pi-0.05]"
        )
    j11 = find_root(_bessel_j1_prime, 1.2, 2.4, tol=1e-14)
    hi = max(2.0 * (n_dim - 1.0), 1.5 * (j11 / theta0) ** 2 + 5.0)
    mesh = np.linspace(1e-4, hi, 257)
    vals = [_cap_endpoint(theta0, n_dim, lam) for lam in mesh]
    for j in range(len(mesh) - 1):
        if vals[j] == 0.0:
            return float(mesh[j])
        if (vals[j] > 0.0) != (vals[j + 1] > 0.0):
            return find_root(lambda lam: _cap_endpoint(theta0, n_dim, lam),
                             mesh[j], mesh[j + 1], tol=_REFINE_TOL)
    raise EigenSearchError(
        f"no Neumann eigenvalue found for the cap up to {hi!r}"
    )


def neumann_lambda1(domain: NeumannDomainSpec) -> float:
    """First nontrivial Neumann eigenvalue of the cross-section.

    Flat domains use closed forms (the disk through the first positive root
    of J1', located by the module's own series evaluation); spherical caps
    use shooting on the polar ODE of the first azimuthal mode; the full
    sphere is the exact value N-1.
    """
    if domain.kind == "interval":
        return (math.pi / domain.length) ** 2
    if domain.kind == "rectangle":
        return (math.pi / max(domain.sides)) ** 2
    if domain.kind == "disk":
        j11 = find_root(_bessel_j1_prime, 1.2, 2.4, tol=1e-14)
        return (j11 / domain.radius) ** 2
    if domain.kind == "spherical_cap":
        return _cap_lambda1(domain.theta0, domain.n_dim)
    if domain.kind == "full_sphere":
        return float(domain.n_dim - 1)
    if domain.kind == "explicit_lambda1":
        return domain.value
    raise ValueError(f"unknown domain kind {domain.kind!r}")


def fd_spectrum_2d(profile: Profile, length: float, n: int, k: int) -> list:
    """k smallest eigenvalues of the 5-point discretization on (0,L)x(0,1).

    Cell-centered grid; Neumann (mirror ghost) on x1 = 0, x1 = L, x2 = 0;
    Dirichlet (odd ghost) on x2 = 1.  The potential is -f'(u(x2)).  Serves
    as the 2-D side of the sum-of-spectra cross-check, so it deliberately
    shares nothing with the shooting solvers.
    """
    import scipy.sparse as sp
    from scipy.sparse.linalg import eigsh

    if profile.geometry != CYLINDER:
        raise ValueError("fd_spectrum_2d expects a slab profile")
    if not length > 0.0:
        raise ValueError("cross-section length must be positive")
    if not 4 <= n <= 128:
        raise ValueError("transverse resolution n must lie in [4, 128]")
    m = max(4, int(round(length * n)))
    if k < 1 or k > m * n:
        raise ValueError("k must lie in [1, matrix size]")
    h1 = length / m
    h2 = 1.0 / n

    def lap(cells, h, dirichlet_right):
        main = np.full(cells, 2.0)
        main[0] = 1.0
        main[-1] = 3.0 if dirichlet_right else 1.0
        off = np.full(cells - 1, -1.0)
        return sp.diags([off, main, off], [-1, 0, 1]) / (h * h)

    centers = (np.arange(n) + 0.5) * h2
    v = -profile.nonlinearity.fprime(profile.interpolate(centers))
    a = (
        sp.kron(lap(m, h1, False), sp.identity(n))
        + sp.kron(sp.identity(m), lap(n, h2, True))
        + sp.kron(sp.identity(m), sp.diags(v))
    ).tocsc()
    sigma = float(np.min(v)) - 1.0
    v0 = np.full(m * n, 1.0 / math.sqrt(m * n))
    vals = eigsh(a, k=k, sigma=sigma, which="LM", v0=v0,
                 return_eigenvectors=False)
    return sorted(float(x) for x in vals)


def nondegeneracy_check(profile: Profile, lambda1: float) -> str:
    """Whether the full linearized operator can have a zero eigenvalue.

    The product structure reduces this to the 1-D spectrum plus the
    cross-section eigenvalues; with only lambda1 known the answer is
    "nondegenerate" when every possible sum is safely away from zero,
    "degenerate" when a zero sum is detected within 1e-8, and "unknown"
    when deeper cross-section eigenvalues would be needed to decide.
    """
    tol = 1e-8
    if not lambda1 > 0.0:
        raise ValueError("lambda1 must be positive")
    if profile.geometry == CYLINDER:
        eigs = alpha_spectrum(profile, 4)
        while eigs[-1].value <= tol and len(eigs) < 12:
            eigs = alpha_spectrum(profile, len(eigs) + 2)
        for e in eigs:
            if abs(e.value) <= tol or abs(e.value + lambda1) <= tol:
                return "degenerate"
        alpha1 = eigs[0].value
        if lambda1 > -alpha1 + tol:
            return "nondegenerate"
        return "unknown"
    n_dim = float(profile.N)
    shot = _LinearizedShot(profile, n_dim, "cr2", _singular_launch(n_dim))
    probe = 1e-8
    if math.copysign(1.0, shot.endpoint(-probe)) != math.copysign(
            1.0, shot.endpoint(probe)):
        return "degenerate"
    first = nuhat_first(profile)
    if first is None:
        return "nondegenerate"
    if abs(first.value + lambda1) <= tol:
        return "degenerate"
    if lambda1 > -first.value + tol:
        return "nondegenerate"
    return "unknown"


def spectrum_to_csv(results, destination, eigenfunctions: bool = False) -> None:
    """Write index,value rows at full precision.

    With ``eigenfunctions`` the table switches to long format with columns
    index,value,r,z carrying one row per grid node per eigenvalue.
    """
    rows = []
    if eigenfunctions:
        rows.append("index,value,r,z")
        for r in results:
            rs = r.grid.nodes
            for j in range(rs.size):
                rows.append(f"{r.index},{r.value:.17g},{rs[j]:.17g},"
                            f"{r.eigenfunction[j]:.17g}")
    else:
        rows.append("index,value")
        for r in results:
            rows.append(f"{r.index},{r.value:.17g}")
    text = "\n".join(rows) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", newline="\n") as fh:
            fh.write(text)
