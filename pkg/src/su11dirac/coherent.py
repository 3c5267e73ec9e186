"""Radial Perelomov coherent states and their time evolution.

With the Sturmian phase convention of :mod:`su11dirac.radial`,

    sum_n c_n(xi) phi_n  propto  rho^(2k-1) (1+xi)^(-2k) exp[(x/2)(xi-1)/(xi+1)],

x = a rho^2, which follows from the Laguerre generating function
sum_n y^n L_n^nu(x) = exp(-x y/(1-y)) / (1-y)^(nu+1) at y = -xi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .params import OscillatorConfig, algebra_params, require_nondegenerate
from .radial import DEFAULT_POINTS, RadialGrid, _check_grid, make_grid, sturmian_basis, sturmian_values
from .su11 import perelomov_coefficients

SERIES_TOL = 1e-12
SERIES_CAP = 5000


class SeriesConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class CoherentProfile:
    xi: complex
    k: float
    samples: np.ndarray
    time: float
    grid: RadialGrid

    @property
    def norm(self) -> float:
        return self.grid.norm(self.samples)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.samples) ** 2


def _check_xi(xi: complex, limit: float = 1.0) -> complex:
    xi = complex(xi)
    if not abs(xi) < limit:
        raise ValueError(f"|xi| must be < {limit}, got {abs(xi)}")
    return xi


def _setup(cfg: OscillatorConfig, grid: RadialGrid):
    ap = algebra_params(cfg)
    require_nondegenerate(ap.omega_bar)
    _check_grid(ap, grid)
    return ap


def _closed_samples(k: float, a: float, xi: complex, rho: np.ndarray) -> np.ndarray:
    if xi == 0:
        # the ground state, evaluated exactly as the basis function is
        return sturmian_values(k, a, 0, rho)
    x = a * rho**2
    mob = (xi - 1) / (xi + 1)
    return rho ** (2 * k - 1) * (1 + xi) ** (-2 * k) * np.exp(0.5 * x * mob)


def coherent_closed_form(cfg: OscillatorConfig, xi: complex, grid: RadialGrid) -> CoherentProfile:
    ap = _setup(cfg, grid)
    xi = _check_xi(xi)
    f = _closed_samples(ap.k, ap.a, xi, grid.points)
    f = f / grid.norm(f)
    return CoherentProfile(xi=xi, k=ap.k, samples=f, time=0.0, grid=grid)


def laguerre_generating(y: float | complex, nu: float, x, nterms: int):
    """Partial sum sum_{n<nterms} y^n L_n^nu(x) (used as an independent oracle)."""
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape, dtype=complex if np.iscomplexobj(y) else float)
    prev = np.ones_like(x)
    cur = 1.0 + nu - x
    yn = 1.0
    total = total + prev
    for m in range(1, nterms):
        yn = yn * y
        total = total + yn * cur
        prev, cur = cur, ((2 * m + 1 + nu - x) * cur - (m + nu) * prev) / (m + 1)
    return total


def laguerre_generating_closed(y, nu: float, x):
    x = np.asarray(x, dtype=float)
    return np.exp(-x * y / (1 - y)) / (1 - y) ** (nu + 1)


def series_nmax(k: float, r: float, tol: float = SERIES_TOL) -> int:
    """Number of terms so the bound sum_{n>N} C(n+2k-1, n) r^n stays below tol."""
    if r == 0:
        return 1
    n = math.ceil(math.log(tol * (1 - r)) / math.log(r) + 2 * k + 10)
    alpha = 2 * k - 1
    while n <= SERIES_CAP:
        log_term = gammaln(n + alpha + 1) - gammaln(n + 1) - gammaln(alpha + 1) + n * math.log(r)
        ratio = (n + alpha + 1) / (n + 1) * r
        if ratio < 1 and math.exp(log_term) / (1 - ratio) < tol:
            return n
        n = int(n * 1.25) + 1
    raise SeriesConvergenceError(f"series needs more than {SERIES_CAP} terms at |xi|={r}, k={k}")


def coherent_grid(cfg: OscillatorConfig, xi_max: float, npoints: int = DEFAULT_POINTS,
                  rmax_scale: float = 1.0) -> RadialGrid:
    """Grid wide enough that the dropped weight sum |c_n|^2 is below 1e-24 for |xi| <= xi_max."""
    ap = algebra_params(cfg)
    r = float(abs(xi_max))
    nmax = 12 if r == 0 else max(12, series_nmax(ap.k, r * r, tol=1e-24))
    return make_grid(ap, npoints=npoints, nmax=nmax, rmax_scale=rmax_scale)


def coherent_series(cfg: OscillatorConfig, xi: complex, grid: RadialGrid,
                    nmax: int | None = None) -> CoherentProfile:
    """Direct sum over (-xi)^n L_n^(2k-1)(x) times the common factor."""
    ap = _setup(cfg, grid)
    xi = _check_xi(xi, 0.95 + 1e-15)
    if nmax is None:
        nmax = series_nmax(ap.k, abs(xi))
    x = ap.a * grid.points**2
    s = laguerre_generating(-xi, 2 * ap.k - 1, x, nmax + 1)
    f = grid.points ** (2 * ap.k - 1) * np.exp(-x / 2) * s
    f = f / grid.norm(f)
    return CoherentProfile(xi=xi, k=ap.k, samples=f, time=0.0, grid=grid)


def coherent_reconstruction(cfg: OscillatorConfig, xi: complex, grid: RadialGrid,
                            nmax: int | None = None) -> CoherentProfile:
    """sum_n c_n(xi) phi_n with c_n from the representation theory."""
    ap = _setup(cfg, grid)
    xi = _check_xi(xi)
    if nmax is None:
        nmax = series_nmax(ap.k, abs(xi))
    last = min(nmax, grid.nmax_supported)
    c = perelomov_coefficients(ap.k, xi, last)
    basis = sturmian_basis(grid, last)
    f = c @ basis
    return CoherentProfile(xi=xi, k=ap.k, samples=f, time=0.0, grid=grid)


def evolve(cfg: OscillatorConfig, xi: complex, t: float, grid: RadialGrid) -> CoherentProfile:
    """exp(-i H_r t) applied to the coherent state, H_r = 4a B3'.

    Each level picks up exp(-4 i a (k+n) t), so the state stays coherent with
    xi(t) = xi exp(-4 i a t) and a global phase exp(-4 i a k t).
    """
    ap = _setup(cfg, grid)
    xi = _check_xi(xi)
    t = float(t)
    theta = 4 * ap.a * t
    xit = xi * complex(math.cos(theta), -math.sin(theta))
    f = _closed_samples(ap.k, ap.a, xit, grid.points)
    f = f / grid.norm(f)
    f = f * np.exp(-1j * ap.k * theta)
    return CoherentProfile(xi=xi, k=ap.k, samples=f, time=t, grid=grid)


def evolve_spectral(cfg: OscillatorConfig, xi: complex, t: float, grid: RadialGrid,
                    nmax: int | None = None) -> CoherentProfile:
    """Level-by-level evolution sum_n c_n exp(-4ia(k+n)t) phi_n (oracle for :func:`evolve`)."""
    ap = _setup(cfg, grid)
    xi = _check_xi(xi)
    if nmax is None:
        nmax = series_nmax(ap.k, abs(xi))
    last = min(nmax, grid.nmax_supported)
    n = np.arange(last + 1)
    c = perelomov_coefficients(ap.k, xi, last) * np.exp(-4j * ap.a * (ap.k + n) * t)
    basis = sturmian_basis(grid, last)
    return CoherentProfile(xi=xi, k=ap.k, samples=c @ basis, time=float(t), grid=grid)


def period(cfg: OscillatorConfig) -> float:
    """Revival time T = pi / (2 m0 |omega_bar|) of |phi(rho, t)|^2."""
    ap = algebra_params(cfg)
    require_nondegenerate(ap.omega_bar)
    return math.pi / (2 * ap.a)
