"""Discrete-series representation of su(1,1).

Basis states |k, n> with K3|k,n> = (k+n)|k,n>,
K+|k,n> = sqrt((n+1)(2k+n)) |k,n+1>, K-|k,n> = sqrt(n(2k+n-1)) |k,n-1>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

MIN_DISPLACEMENT_DIM = 64
MAX_DISPLACEMENT_DIM = 4096
TAIL_TOL = 1e-12
_CONVERSION_DPS = 40


class TruncationError(RuntimeError):
    """The requested displacement needs more levels than the hard cap."""


@dataclass(frozen=True)
class RepBasisState:
    k: float
    n: int

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.n < 0:
            raise ValueError("n must be non-negative")


@dataclass(frozen=True)
class TruncatedRep:
    k: float
    dim: int
    kplus: np.ndarray
    kminus: np.ndarray
    kthree: np.ndarray

    def casimir(self) -> np.ndarray:
        kp, km, k3 = self.kplus, self.kminus, self.kthree
        return k3 @ k3 - 0.5 * (kp @ km + km @ kp)


@dataclass(frozen=True)
class CoherentParam:
    """Displacement parameter z, disk variable xi and normal-form data.

    D(z) = exp(z K+ - conj(z) K-) = exp(zeta K+) exp(eta_nf K3) exp(-conj(zeta) K-)
    with zeta = xi = (z/|z|) tanh|z| and eta_nf = ln(1 - |zeta|^2).
    """

    z: complex
    xi: complex
    zeta: complex

    @property
    def eta_nf(self) -> float:
        return math.log1p(-abs(self.zeta) ** 2)


def ladder_up_coeff(k, n):
    return np.sqrt((np.asarray(n) + 1.0) * (2.0 * k + np.asarray(n)))


def ladder_down_coeff(k, n):
    n = np.asarray(n, dtype=float)
    return np.sqrt(n * (2.0 * k + n - 1.0))


def casimir_eigenvalue(k: float) -> float:
    return k * (k - 1.0)


def truncated_rep(k: float, dim: int) -> TruncatedRep:
    if dim < 2:
        raise ValueError("dim must be at least 2")
    if k <= 0:
        raise ValueError("k must be positive")
    n = np.arange(dim - 1)
    kplus = np.zeros((dim, dim), dtype=complex)
    kplus[n + 1, n] = ladder_up_coeff(k, n)
    kminus = kplus.conj().T.copy()
    kthree = np.diag(k + np.arange(dim, dtype=float)).astype(complex)
    return TruncatedRep(k=k, dim=dim, kplus=kplus, kminus=kminus, kthree=kthree)


def displacement_matrix(rep: TruncatedRep, z: complex) -> np.ndarray:
    """exp(z K+ - conj(z) K-) on the truncated space (Pade scaling and squaring).

    With z = r e^{i theta}, D(z) = U exp(r (K+ - K-)) U^dag, U = diag(e^{i n theta}),
    so the exponential is taken of a real matrix.
    """
    z = complex(z)
    r = abs(z)
    d = expm(r * (rep.kplus.real - rep.kminus.real))
    if z.imag == 0 and z.real >= 0:
        return d.astype(complex)
    u = np.exp(1j * np.angle(z) * np.arange(rep.dim))
    return u[:, None] * d * u.conj()[None, :]


def default_dim(k: float, z: complex, ncols: int = 1) -> int:
    """Starting truncation: the last quarter should hold only coefficients
    below ~1e-14, using |c_n| ~ n^(k-1/2) tanh(|z|)^n; later columns widen
    the spread, which the ncols term allows for."""
    t = math.tanh(abs(z))
    if t == 0:
        return MIN_DISPLACEMENT_DIM
    slope = -math.log(t)
    n = 32.0 / slope
    for _ in range(20):
        n = (32.0 + max(k - 0.5 + (ncols - 1) / 2, 0.0) * math.log(n + 1)) / slope
    return max(MIN_DISPLACEMENT_DIM, math.ceil(4 / 3 * (n + 2 * ncols)) + 8)


def displacement_oracle(k: float, z: complex, dim: int | None = None, cap: int = MAX_DISPLACEMENT_DIM,
                        ncols: int = 1):
    """Return (rep, D) with dim grown until the tails of the first ``ncols``
    columns (last quarter of each) are below TAIL_TOL.
    """
    dim = default_dim(k, z, ncols) if dim is None else max(dim, 2)
    while True:
        if dim > cap:
            raise TruncationError(f"|z|={abs(z):.3g} needs more than {cap} levels at k={k}")
        rep = truncated_rep(k, dim)
        d = displacement_matrix(rep, z)
        tail = np.linalg.norm(d[3 * dim // 4:, :ncols], axis=0).max()
        if tail < TAIL_TOL:
            return rep, d
        dim = dim * 3 // 2


def perelomov_coefficients(k: float, xi: complex, nmax: int) -> np.ndarray:
    """c_n = (1-|xi|^2)^k sqrt(Gamma(n+2k) / (n! Gamma(2k))) xi^n for n = 0..nmax."""
    xi = complex(xi)
    r = abs(xi)
    if r >= 1:
        raise ValueError(f"|xi| must be < 1, got {r}")
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    n = np.arange(nmax + 1)
    out = np.zeros(nmax + 1, dtype=complex)
    if r == 0:
        out[0] = 1.0
        return out
    logmag = (
        k * math.log1p(-r * r)
        + 0.5 * (gammaln(n + 2 * k) - gammaln(n + 1) - gammaln(2 * k))
        + n * math.log(r)
    )
    phase = np.exp(1j * n * np.angle(xi))
    return np.exp(logmag) * phase


def xi_from_z(z: complex) -> CoherentParam:
    """xi = (z/|z|) tanh|z|.

    Evaluated in extended precision and rounded once: near the rim of the
    disk the inverse map amplifies rounding in xi by cosh^2|z|.
    """
    z = complex(z)
    if z == 0:
        return CoherentParam(z=z, xi=0j, zeta=0j)
    with mpmath.workdps(_CONVERSION_DPS):
        zm = mpmath.mpc(z.real, z.imag)
        r = abs(zm)
        xm = zm / r * mpmath.tanh(r)
        xi = complex(float(xm.real), float(xm.imag))
    return CoherentParam(z=z, xi=xi, zeta=xi)


def z_from_xi(xi: complex) -> complex:
    xi = complex(xi)
    r = abs(xi)
    if r >= 1:
        raise ValueError(f"|xi| must be < 1, got {r}")
    if r == 0:
        return 0j
    with mpmath.workdps(_CONVERSION_DPS):
        xm = mpmath.mpc(xi.real, xi.imag)
        q = abs(xm)
        zm = xm / q * mpmath.atanh(q)
        return complex(float(zm.real), float(zm.imag))
