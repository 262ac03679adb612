"""Independent reference implementations used to cross-check the package.

Everything here deliberately avoids the library's own machinery: fixed-step
RK4 instead of the adaptive integrator, dense finite-difference matrices
instead of shooting, scipy.special instead of the in-package Bessel series.
Agreement between two genuinely different routes is the point; keep it that
way when editing.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded


def rk4_path(rhs, t0, y0, t1, n_steps):
    """Classical fixed-step RK4; returns (t nodes, state rows)."""
    y = np.asarray(y0, dtype=np.float64).copy()
    ts = np.linspace(t0, t1, n_steps + 1)
    h = (t1 - t0) / n_steps
    out = np.empty((n_steps + 1, y.size))
    out[0] = y
    for i in range(n_steps):
        t = ts[i]
        k1 = np.asarray(rhs(t, y))
        k2 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(rhs(t + h, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    return ts, out


def profile_rhs_1d(nl):
    def rhs(t, y):
        return np.array([y[1], -nl.f(y[0])])
    return rhs


def profile_rhs_radial(nl, n_dim):
    def rhs(t, y):
        return np.array([y[1], -((n_dim - 1.0) / t) * y[1] - nl.f(y[0])])
    return rhs


def fd_alpha_values(profile, k, n=2000):
    """Eigenvalues of -h'' - f'(u)h = alpha h, h'(0) = 0, h(1) = 0.

    Cell-centred second-order scheme; the Neumann end mirrors the ghost
    cell, the Dirichlet end reflects it with the opposite sign.
    """
    h = 1.0 / n
    x = (np.arange(n) + 0.5) * h
    v = -profile.nonlinearity.fprime(profile.interpolate(x))
    main = np.full(n, 2.0 / h**2) + v
    main[0] = 1.0 / h**2 + v[0]
    main[-1] = 3.0 / h**2 + v[-1]
    off = np.full(n - 1, -1.0 / h**2)
    vals = eigh_tridiagonal(main, off, select="i",
                            select_range=(0, k - 1))[0]
    return [float(a) for a in vals]


def fd_nuhat_smallest(profile, n=4000):
    """Smallest eigenvalue of the singular cone problem by weighted FD.

    Self-adjoint form: -(r^{N-1} h')' - r^{N-1} f'(u) h = nu r^{N-3} h with
    h pinned at both ends.  Symmetrised with B^{-1/2} A B^{-1/2} so a plain
    tridiagonal solver applies.
    """
    N = profile.N
    h = 1.0 / n
    r = (np.arange(n) + 0.5) * h
    faces = np.arange(n + 1) * h
    wf = faces ** (N - 1.0)
    v = -profile.nonlinearity.fprime(profile.interpolate(r))
    main = (wf[:-1] + wf[1:]) / h**2 + r ** (N - 1.0) * v
    off = -wf[1:-1] / h**2
    b = r ** (N - 3.0)
    s = 1.0 / np.sqrt(b)
    main_sym = main * s * s
    off_sym = off * s[:-1] * s[1:]
    vals = eigh_tridiagonal(main_sym, off_sym, select="i",
                            select_range=(0, 0))[0]
    return float(vals[0])


def fd_h_cylinder(profile, lam, n=4000):
    """Solve -h'' - f'(u)h + lam h = 0, h'(0)=0, h(1)=-u'(1), by banded LU."""
    h = 1.0 / n
    x = (np.arange(n) + 0.5) * h
    v = -profile.nonlinearity.fprime(profile.interpolate(x)) + lam
    main = np.full(n, 2.0 / h**2) + v
    main[0] -= 1.0 / h**2
    rhs = np.zeros(n)
    rhs[-1] = 2.0 * (-profile.du_at_1) / h**2
    main[-1] += 1.0 / h**2
    ab = np.zeros((3, n))
    ab[0, 1:] = -1.0 / h**2
    ab[1] = main
    ab[2, :-1] = -1.0 / h**2
    sol = solve_banded((1, 1), ab, rhs)
    return x, sol


def fd_h_cone(profile, lam, n=4000):
    """Cone variant: -(r^{N-1}h')' - r^{N-1}f'(u)h + lam r^{N-3} h = 0,
    h(0)=0, h(1)=-u'(1)."""
    N = profile.N
    h = 1.0 / n
    r = (np.arange(n) + 0.5) * h
    faces = np.arange(n + 1) * h
    wf = faces ** (N - 1.0)
    v = -profile.nonlinearity.fprime(profile.interpolate(r))
    main = (wf[:-1] + wf[1:]) / h**2 + r ** (N - 1.0) * v \
        + lam * r ** (N - 3.0)
    rhs = np.zeros(n)
    rhs[-1] = 2.0 * wf[-1] * (-profile.du_at_1) / h**2
    main[-1] += wf[-1] / h**2
    ab = np.zeros((3, n))
    ab[0, 1:] = -wf[1:-1] / h**2
    ab[1] = main
    ab[2, :-1] = -wf[1:-1] / h**2
    sol = solve_banded((1, 1), ab, rhs)
    return r, sol


def fd_cap_lambda1(theta0, n_dim, n=4000):
    """First eigenvalue of the m=1 polar problem on a spherical cap.

    -(w g')' + w (n_dim-2)/sin^2 g = lam w g on (0, theta0) with
    w = sin^{n_dim-2}, g(0)=0, Neumann at theta0.
    """
    h = theta0 / n
    t = (np.arange(n) + 0.5) * h
    faces = np.arange(n + 1) * h
    wf = np.sin(faces) ** (n_dim - 2.0)
    wc = np.sin(t) ** (n_dim - 2.0)
    main = (wf[:-1] + wf[1:]) / h**2 + wc * (n_dim - 2.0) / np.sin(t) ** 2
    main[-1] -= wf[-1] / h**2
    off = -wf[1:-1] / h**2
    s = 1.0 / np.sqrt(wc)
    vals = eigh_tridiagonal(main * s * s, off * s[:-1] * s[1:],
                            select="i", select_range=(0, 0))[0]
    return float(vals[0])
