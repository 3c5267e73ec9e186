"""Matrix elements in the Sturmian basis, generator expectation values in
Perelomov states, and the Schrodinger uncertainty relation.

Conventions: D(z) = exp(z K+ - conj(z) K-), z = r e^{i theta},
alpha = sinh 2r, beta = sinh^2 r, X = K+ + K-, Y = i (K+ - K-).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass

import numpy as np

from .params import AlgebraParams, OscillatorConfig, algebra_params, require_nondegenerate
from .radial import RadialGrid, _check_grid, laguerre, sturmian_basis
from .su11 import displacement_oracle, ladder_down_coeff, ladder_up_coeff


def _params(cfg) -> AlgebraParams:
    ap = cfg if isinstance(cfg, AlgebraParams) else algebra_params(cfg)
    require_nondegenerate(ap.omega_bar)
    return ap


# --------------------------------------------------------------------------
# Matrix elements


def rho2_elements(cfg, nmax: int) -> np.ndarray:
    """<m| rho^2 |n> for m, n <= nmax from a rho^2 = B+ + B- + 2 B3'."""
    ap = _params(cfg)
    k, a = ap.k, ap.a
    n = np.arange(nmax + 1)
    out = np.diag(2.0 * (k + n) / a)
    off = ladder_up_coeff(k, n[:-1]) / a
    out[n[1:], n[:-1]] = off
    out[n[:-1], n[1:]] = off
    return out


def rho_ddrho_elements(cfg, nmax: int) -> np.ndarray:
    """<m| rho d/d rho |n> from rho d/d rho = B- - B+ - 1."""
    ap = _params(cfg)
    k = ap.k
    n = np.arange(nmax + 1)
    out = -np.eye(nmax + 1)
    out[n[:-1], n[1:]] = ladder_down_coeff(k, n[1:])
    out[n[1:], n[:-1]] = -ladder_up_coeff(k, n[:-1])
    return out


def _basis_derivative(k: float, a: float, nmax: int, rho: np.ndarray, scale: np.ndarray) -> np.ndarray:
    """Analytic rho d/d rho of the normalized basis rows (scale = 1/norm per row)."""
    g = 2 * k - 1
    x = a * rho**2
    out = np.empty((nmax + 1, rho.size))
    for n in range(nmax + 1):
        lag = laguerre(n, g, x)
        dlag = -laguerre(n - 1, g + 1, x) if n > 0 else np.zeros_like(x)
        pref = (-1) ** n * rho**g * np.exp(-x / 2)
        out[n] = scale[n] * pref * ((g - x) * lag + 2 * x * dlag)
    return out


def quadrature_elements(cfg: OscillatorConfig, grid: RadialGrid, nmax: int):
    """Quadrature oracle: (<m|rho^2|n>, <m|rho d/drho|n>) with analytic derivatives."""
    ap = _params(cfg)
    _check_grid(ap, grid)
    basis = sturmian_basis(grid, nmax)
    rho = grid.points
    raw = np.array([
        (-1) ** n * rho ** (2 * ap.k - 1) * np.exp(-ap.a * rho**2 / 2) * laguerre(n, 2 * ap.k - 1, ap.a * rho**2)
        for n in range(nmax + 1)
    ])
    scale = np.array([1.0 / grid.norm(r) for r in raw])
    dbasis = _basis_derivative(ap.k, ap.a, nmax, rho, scale)
    r2 = np.array([[grid.inner(p, rho**2 * q) for q in basis] for p in basis])
    rd = np.array([[grid.inner(p, dq) for dq in dbasis] for p in basis])
    return r2, rd


# --------------------------------------------------------------------------
# Generators in coherent states


def _polar(z: complex) -> tuple[float, float]:
    z = complex(z)
    r = abs(z)
    return r, (cmath.phase(z) if r > 0 else 0.0)


def similarity_transforms(rep, z: complex):
    """Closed forms of D^dag K+ D, D^dag K- D, D^dag K3 D as matrices on ``rep``."""
    r, th = _polar(z)
    alpha = math.sinh(2 * r)
    beta = math.sinh(r) ** 2
    kp, km, k3 = rep.kplus, rep.kminus, rep.kthree
    e = cmath.exp(1j * th)
    tp = cmath.exp(-1j * th) * alpha * k3 + beta * (kp + e.conjugate() ** 2 * km) + kp
    tm = e * alpha * k3 + beta * (km + e**2 * kp) + km
    t3 = math.cosh(2 * r) * k3 + 0.5 * alpha * (e * kp + e.conjugate() * km)
    return tp, tm, t3


def similarity_oracle(k: float, z: complex, m: int = 16):
    """Leading m x m blocks of D^dag K+ D, D^dag K- D, D^dag K3 D from the matrix
    exponential, together with the representation they live on."""
    rep, d = displacement_oracle(k, z, ncols=m)
    cols = d[:, :m]
    blocks = tuple(cols.conj().T @ (op @ cols) for op in (rep.kplus, rep.kminus, rep.kthree))
    return rep, blocks


def generator_expectations(k: float, z: complex) -> tuple[complex, complex, float]:
    """(<K+>, <K->, <K3>) in D(z)|k,0>."""
    r, th = _polar(z)
    alpha = math.sinh(2 * r)
    kp = cmath.exp(-1j * th) * alpha * k
    return kp, kp.conjugate(), k * math.cosh(2 * r)


def generator_expectations_oracle(k: float, z: complex):
    rep, d = displacement_oracle(k, z)
    psi = d[:, 0]
    ev = lambda m: np.vdot(psi, m @ psi)
    return ev(rep.kplus), ev(rep.kminus), float(np.real(ev(rep.kthree)))


@dataclass(frozen=True)
class UncertaintyReport:
    k: float
    z: complex
    dx2: float
    dy2: float
    f: float
    c: float
    lhs: float
    rhs: float
    residual: float

    @property
    def relative_residual(self) -> float:
        return abs(self.residual) / abs(self.rhs)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["z"] = [self.z.real, self.z.imag]
        d["relative_residual"] = self.relative_residual
        return d


def _report(k, z, dx2, dy2, f, c) -> UncertaintyReport:
    lhs = dx2 * dy2
    rhs = f * f + 0.25 * c * c
    return UncertaintyReport(k, complex(z), dx2, dy2, f, c, lhs, rhs, lhs - rhs)


def uncertainty_report(k: float, z: complex) -> UncertaintyReport:
    """Closed-form variances of X, Y with lambda = sinh^2|z|."""
    if k <= 0:
        raise ValueError("k must be positive")
    z = complex(z)
    r = abs(z)
    lam = math.sinh(r) ** 2
    mu = lam * lam + lam
    # cos 2theta, sin 2theta from the unit phase, so real z gives sin 2theta = 0 exactly
    e = 1.0 + 0j if r == 0 else z / r
    c2, s2 = e.real**2 - e.imag**2, 2 * e.real * e.imag
    dx2 = 2 * k * (1 + 2 * mu + 2 * mu * c2)
    dy2 = 2 * k * (1 + 2 * mu - 2 * mu * c2)
    f = 4 * k * mu * s2
    c = 4 * k * (2 * lam + 1)
    return _report(k, z, dx2, dy2, f, c)


def uncertainty_oracle(k: float, z: complex) -> UncertaintyReport:
    """Same quantities from the truncated-matrix displacement operator.

    F is the symmetrized covariance <{X,Y}>/2 - <X><Y>, C = -i <[X,Y]>.
    """
    rep, d = displacement_oracle(k, z)
    psi = d[:, 0]
    x = rep.kplus + rep.kminus
    y = 1j * (rep.kplus - rep.kminus)
    ev = lambda m: np.vdot(psi, m @ psi)
    ex, ey = ev(x).real, ev(y).real
    dx2 = ev(x @ x).real - ex * ex
    dy2 = ev(y @ y).real - ey * ey
    f = (0.5 * ev(x @ y + y @ x)).real - ex * ey
    c = (-1j * ev(x @ y - y @ x)).real
    return _report(k, z, float(dx2), float(dy2), float(f), float(c))
