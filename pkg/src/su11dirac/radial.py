"""Sturmian basis on a logarithmic radial grid and finite-difference realizations
of the su(1,1) factorization operators.

Functions live in the phi-representation with measure rho d(rho).  With
a = m0 |omega_bar| and gamma = |Gamma_eff| the operators are

    K3      = (1/4a) [-d^2 - (1/rho) d + a^2 rho^2 + Gamma^2 / rho^2]
    B_plus  = (1/2)(a rho^2 - rho d - 1) - K3
    B_minus = (1/2)(a rho^2 + rho d + 1) - K3

and B3' = K3, H_r = 4a K3.  On the grid u = ln(rho) is uniform, so
rho d/d(rho) is a plain d/du stencil and rho^2 (d^2 + d/rho) = d^2/du^2.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

import findiff
import numpy as np
import scipy.sparse as sp
from scipy.interpolate import BarycentricInterpolator
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc

from .params import AlgebraParams, OscillatorConfig, algebra_params, require_nondegenerate
from .report import VerificationReport
from .su11 import casimir_eigenvalue, ladder_down_coeff, ladder_up_coeff

DEFAULT_POINTS = 2048
DEFAULT_ORDER = 8
DEFAULT_EPS = 1e-3
DEFAULT_NMAX = 12
R_MARGIN = 80.0
GHOST_ORDER = 5  # polynomial degree + 1 in t = rho^2 used to fill ghost nodes
TAIL_ORDER = 3  # moments matched by the [0, rho_0] correction
CALIBRATION_TOL = 1e-10
ALGEBRA_TOL = 1e-5

MS_LABELS = ("Bplus1", "Bminus1", "Bplus2", "Bminus2", "B3prime", "Hr")
CSS_LABELS = ("Splus1", "Sminus1", "Splus2", "Sminus2", "Tplus1", "Tminus1",
              "Tplus2", "Tminus2", "T3prime", "Hr")


class GridResolutionError(RuntimeError):
    """The grid fails its calibration invariant."""


# --------------------------------------------------------------------------
# Laguerre polynomials


def laguerre(n: int, alpha: float, x):
    """Associated Laguerre polynomial L_n^alpha(x) by the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be >= 0")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 + alpha - x
    for m in range(1, n):
        prev, cur = cur, ((2 * m + 1 + alpha - x) * cur - (m + alpha) * prev) / (m + 1)
    return cur


# --------------------------------------------------------------------------
# Grid


@dataclass(frozen=True)
class RadialGrid:
    """Log-uniform radial grid on [eps R, R] with weights for rho d(rho).

    ``weights`` are strictly positive (trapezoid in u with an endpoint
    correction).  The integral over [0, rho_0] is added by a small signed
    correction on ``tail_index``; :meth:`inner` applies both.
    """

    points: np.ndarray
    weights: np.ndarray
    r_max: float
    npoints: int
    k: float
    a: float
    order: int
    tail_index: np.ndarray
    tail_weight: np.ndarray

    @property
    def u(self) -> np.ndarray:
        return np.log(self.points)

    @property
    def h(self) -> float:
        return float(math.log(self.points[1] / self.points[0]))

    @property
    def gamma(self) -> float:
        return 2 * self.k - 1

    @property
    def nmax_supported(self) -> int:
        """Largest basis index whose support fits inside [0, r_max] with margin."""
        return max(0, int((self.a * self.r_max**2 - 2 * self.k - R_MARGIN) // 2))

    def integrate(self, f) -> complex | float:
        f = np.asarray(f)
        return np.sum(self.weights * f) + np.sum(self.tail_weight * f[self.tail_index])

    def inner(self, f, g):
        return self.integrate(np.conj(f) * g)

    def norm(self, f) -> float:
        return float(math.sqrt(max(float(np.real(self.inner(f, f))), 0.0)))

    def residual_norm(self, f) -> float:
        """L2 norm using only the positive weights (robust for noisy residuals)."""
        f = np.asarray(f)
        return float(math.sqrt(np.sum(self.weights * np.abs(f) ** 2)))

    def calibration_error(self) -> float:
        """Relative error of int_0^R exp(-a rho^2) rho^(2 gamma + 1) d rho."""
        g = self.gamma
        rho = self.points
        num = self.integrate(np.exp(-self.a * rho**2) * rho ** (2 * g))
        exact = gamma_fn(g + 1) * gammainc(g + 1, self.a * self.r_max**2) / (2 * self.a ** (g + 1))
        return float(abs(num - exact) / exact)


@lru_cache(maxsize=None)
def _stencil(deriv: int, offsets: tuple[int, ...]) -> np.ndarray:
    c = findiff.coefficients(deriv=deriv, offsets=list(offsets), symbolic=True)
    return np.array([float(v) for v in c["coefficients"]])


def _lagrange_weights(nodes: np.ndarray, x: float) -> np.ndarray:
    # fixed rng: scipy permutes the nodes at random when forming the weights
    return BarycentricInterpolator(nodes, np.eye(len(nodes)), rng=0)(x)


def _tail_correction(rho: np.ndarray, h: float, k: float):
    """Weights on a few nodes reproducing int_0^rho0 F rho d(rho) for F = t^(2k-1+m).

    Nodes are spaced so that t roughly doubles, which keeps the system well
    conditioned.
    """
    stride = max(1, math.ceil(math.log(2) / (2 * h)))
    idx = np.arange(TAIL_ORDER) * stride
    t0 = rho[0] ** 2
    tau = (rho[idx] / rho[0]) ** 2
    p = 2 * k - 1
    A = np.array([tau ** (p + m) for m in range(TAIL_ORDER)])
    b = np.array([t0 / (2 * (p + m + 1)) for m in range(TAIL_ORDER)])
    return idx, np.linalg.solve(A, b)


def make_grid(
    params: AlgebraParams | OscillatorConfig,
    npoints: int = DEFAULT_POINTS,
    nmax: int = DEFAULT_NMAX,
    rmax_scale: float = 1.0,
    eps: float = DEFAULT_EPS,
    order: int = DEFAULT_ORDER,
) -> RadialGrid:
    """Build a grid calibrated for the Bargmann index and scale of ``params``."""
    ap = algebra_params(params) if isinstance(params, OscillatorConfig) else params
    require_nondegenerate(ap.omega_bar)
    if npoints < 2 * order + 8:
        raise ValueError(f"npoints={npoints} too small for order {order}")
    if order < 2 or order % 2:
        raise ValueError("order must be an even integer >= 2")
    k, a = ap.k, ap.a
    r = rmax_scale * math.sqrt((2 * k + 2 * nmax + R_MARGIN) / a)
    u = np.linspace(math.log(eps * r), math.log(r), npoints)
    h = u[1] - u[0]
    rho = np.exp(u)
    rho[-1] = r
    w = h * rho**2
    w[0] *= 0.5
    w[-1] *= 0.5
    # Euler-Maclaurin correction at the left end (the integrand does not
    # vanish there); the right end sits deep in the Gaussian tail.
    d1 = _stencil(1, tuple(range(5))) / h
    d3 = _stencil(3, tuple(range(5))) / h**3
    w[:5] += (h**2 / 12 * d1 - h**4 / 720 * d3) * rho[:5] ** 2
    idx, tw = _tail_correction(rho, h, k)
    return RadialGrid(
        points=rho,
        weights=w,
        r_max=r,
        npoints=npoints,
        k=k,
        a=a,
        order=order,
        tail_index=idx,
        tail_weight=tw,
    )


def _check_grid(ap: AlgebraParams, grid: RadialGrid, calibrate: bool = True) -> None:
    if abs(grid.k - ap.k) > 1e-12 or abs(grid.a - ap.a) > 1e-12 * max(1.0, ap.a):
        raise ValueError(f"grid was built for k={grid.k}, a={grid.a}; config has k={ap.k}, a={ap.a}")
    if not calibrate:
        return
    err = grid.calibration_error()
    if not err <= CALIBRATION_TOL:
        raise GridResolutionError(f"grid calibration error {err:.2e} exceeds {CALIBRATION_TOL:g}")


# --------------------------------------------------------------------------
# Sturmian basis


@dataclass(frozen=True)
class SturmianFunction:
    n_r: int
    gamma_eff: float
    values: np.ndarray
    norm: float


def sturmian_values(k: float, a: float, n: int, rho: np.ndarray) -> np.ndarray:
    """Unnormalized (-1)^n rho^(2k-1) exp(-a rho^2/2) L_n^(2k-1)(a rho^2).

    The (-1)^n phase makes B_plus act with a positive coefficient.
    """
    g = 2 * k - 1
    x = a * rho**2
    return (-1) ** n * rho**g * np.exp(-x / 2) * laguerre(n, g, x)


def sturmian_basis(grid: RadialGrid, nmax: int) -> np.ndarray:
    """Rows are the quadrature-normalized phi_0 .. phi_nmax on ``grid``."""
    out = np.empty((nmax + 1, grid.npoints))
    for n in range(nmax + 1):
        f = sturmian_values(grid.k, grid.a, n, grid.points)
        out[n] = f / grid.norm(f)
    return out


def sturmian(cfg: OscillatorConfig, n_r: int, grid: RadialGrid) -> SturmianFunction:
    ap = algebra_params(cfg)
    require_nondegenerate(ap.omega_bar)
    _check_grid(ap, grid)
    f = sturmian_values(ap.k, ap.a, n_r, grid.points)
    f = f / grid.norm(f)
    return SturmianFunction(n_r=n_r, gamma_eff=ap.gamma_eff, values=f, norm=grid.norm(f))


# --------------------------------------------------------------------------
# Finite-difference operators


def _diff_matrix(grid: RadialGrid, deriv: int) -> sp.csr_matrix:
    """d^deriv/du^deriv with ghost nodes left of rho_0.

    Ghost values come from fitting f = rho^gamma P(rho^2), deg P < GHOST_ORDER,
    to the first grid samples, which is the regular behaviour at the origin.
    """
    n = grid.npoints
    u = grid.u
    h = grid.h
    half = (grid.order + deriv - 1) // 2
    width = 2 * half + 1
    g = half
    ne = n + g

    # extension map: extended vector (g ghosts + n samples) from samples
    t = np.exp(2 * u[:GHOST_ORDER])
    rows, cols, vals = [], [], []
    for j in range(1, g + 1):
        ug = u[0] - j * h
        lw = _lagrange_weights(t, math.exp(2 * ug))
        scale = np.exp(grid.gamma * (ug - u[:GHOST_ORDER]))
        rows += [g - j] * GHOST_ORDER
        cols += list(range(GHOST_ORDER))
        vals += list(lw * scale)
    rows += list(range(g, ne))
    cols += list(range(n))
    vals += [1.0] * n
    ext = sp.csr_matrix((vals, (rows, cols)), shape=(ne, n))

    central = _stencil(deriv, tuple(range(-half, half + 1))) / h**deriv
    rows, cols, vals = [], [], []
    for i in range(n):
        ie = i + g
        lo = min(ie - half, ne - width)
        offs = tuple(range(lo - ie, lo - ie + width))
        wts = central if lo == ie - half else _stencil(deriv, offs) / h**deriv
        rows += [i] * width
        cols += list(range(lo, lo + width))
        vals += list(wts)
    de = sp.csr_matrix((vals, (rows, cols)), shape=(n, ne))
    return (de @ ext).tocsr()


def _difference_form(m: sp.spmatrix):
    """Apply m as sum_j m_ij (f_j - f_i) + rowsum_i f_i, which limits cancellation."""
    m = m.tocoo()
    rows, cols, data = m.row, m.col, m.data
    n = m.shape[0]
    rowsum = np.bincount(rows, data, minlength=n)

    def apply(f):
        f = np.asarray(f)
        diff = f[cols] - f[rows]
        if np.iscomplexobj(diff):
            acc = np.bincount(rows, data * diff.real, minlength=n) + 1j * np.bincount(
                rows, data * diff.imag, minlength=n)
        else:
            acc = np.bincount(rows, data * diff, minlength=n)
        return acc + rowsum * f

    return apply


class _Primitives:
    """X = a rho^2, D = rho d/d rho, K = K3 on a grid."""

    def __init__(self, ap: AlgebraParams, grid: RadialGrid):
        self.ap = ap
        self.grid = grid
        rho = grid.points
        self.x = ap.a * rho**2
        self.d1m = _diff_matrix(grid, 1)
        self.d2m = _diff_matrix(grid, 2)
        self._d1 = _difference_form(self.d1m)
        self._d2 = _difference_form(self.d2m)
        self.inv_rho2 = 1.0 / rho**2
        self.g2 = ap.gamma_eff**2

    def X(self, f):
        return self.x * f

    def D(self, f):
        return self._d1(f)

    def K(self, f):
        a = self.ap.a
        return (1 / (4 * a)) * ((self.g2 * f - self._d2(f)) * self.inv_rho2 + a * self.x * f)

    def k_matrix(self) -> sp.csr_matrix:
        a = self.ap.a
        n = self.grid.npoints
        lap = sp.diags(self.inv_rho2) @ (self.g2 * sp.identity(n) - self.d2m)
        return ((lap + sp.diags(a * self.x)) / (4 * a)).tocsr()


class OpExpr:
    """Noncommutative polynomial in the primitives X, D, K.

    Commutators are expanded symbolically before touching the grid, so
    products like K K cancel exactly instead of amplifying roundoff.
    """

    def __init__(self, terms=None):
        self.terms = {w: c for w, c in (terms or {}).items() if c != 0}

    @classmethod
    def word(cls, *names, coeff=1.0):
        return cls({tuple(names): coeff})

    def __add__(self, other):
        other = _as_expr(other)
        d = defaultdict(float, self.terms)
        for w, c in other.terms.items():
            d[w] += c
        return OpExpr(d)

    __radd__ = __add__

    def __neg__(self):
        return OpExpr({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_expr(other))

    def __rsub__(self, other):
        return _as_expr(other) - self

    def __mul__(self, c):
        return OpExpr({w: c * v for w, v in self.terms.items()})

    __rmul__ = __mul__

    def __matmul__(self, other):
        d = defaultdict(float)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                d[w1 + w2] += c1 * c2
        return OpExpr(d)

    def apply(self, prims: _Primitives, f):
        out = np.zeros_like(f)
        cache = {}
        for w, c in self.terms.items():
            # share evaluated suffixes between words
            g = f
            for i in range(len(w) - 1, -1, -1):
                key = w[i:]
                if key not in cache:
                    cache[key] = getattr(prims, w[i])(g)
                g = cache[key]
            out = out + c * g
        return out


def _as_expr(x):
    if isinstance(x, OpExpr):
        return x
    return OpExpr({(): float(x)})


def commutator(a: OpExpr, b: OpExpr) -> OpExpr:
    return a @ b - b @ a


X_OP = OpExpr.word("X")
D_OP = OpExpr.word("D")
K_OP = OpExpr.word("K")
ONE = OpExpr({(): 1.0})
B_PLUS = 0.5 * (X_OP - D_OP - ONE) - K_OP
B_MINUS = 0.5 * (X_OP + D_OP + ONE) - K_OP
B3_PRIME = K_OP


@dataclass(frozen=True)
class DiscretizedOperator:
    """Sparse matrix realization of a named operator on a grid."""

    label: str
    matrix: sp.csr_matrix
    order: int
    expr: OpExpr | None = None

    def apply(self, f):
        return _difference_form(self.matrix)(f)


def _resolve_label(label: str, cfg: OscillatorConfig) -> str:
    """Map a label to 'plus', 'minus', 'three' or 'hr', checking spacetime and s."""
    ms = cfg.is_minkowski
    allowed = MS_LABELS if ms else CSS_LABELS
    if label not in MS_LABELS + CSS_LABELS:
        raise ValueError(f"unknown operator label {label!r}")
    if label not in allowed:
        raise ValueError(f"label {label!r} does not belong to {cfg.spacetime} spacetime")
    if label in ("B3prime", "T3prime"):
        return "three"
    if label == "Hr":
        return "hr"
    kind = "plus" if "plus" in label else "minus"
    family = int(label[-1])
    want = 1 if cfg.s == 1 else 2
    if family != want:
        raise ValueError(f"{label} pairs with s={'+1' if family == 1 else '-1'}, config has s={cfg.s:+d}")
    return kind


def build_operator(cfg: OscillatorConfig, grid: RadialGrid, label: str) -> DiscretizedOperator:
    kind = _resolve_label(label, cfg)
    ap = algebra_params(cfg)
    require_nondegenerate(ap.omega_bar)
    _check_grid(ap, grid)
    prims = _Primitives(ap, grid)
    n = grid.npoints
    xm = sp.diags(prims.x)
    km = prims.k_matrix()
    eye = sp.identity(n)
    if kind == "three":
        mat, expr = km, B3_PRIME
    elif kind == "hr":
        mat, expr = 4 * ap.a * km, 4 * ap.a * B3_PRIME
    elif kind == "plus":
        mat, expr = 0.5 * (xm - prims.d1m - eye) - km, B_PLUS
    else:
        mat, expr = 0.5 * (xm + prims.d1m + eye) - km, B_MINUS
    return DiscretizedOperator(label=label, matrix=sp.csr_matrix(mat), order=grid.order, expr=expr)


def operator_labels(cfg: OscillatorConfig) -> tuple[str, str, str]:
    """(plus, minus, three) labels valid for ``cfg``."""
    i = 1 if cfg.s == 1 else 2
    if cfg.is_minkowski:
        return f"Bplus{i}", f"Bminus{i}", "B3prime"
    return f"Splus{i}", f"Sminus{i}", "T3prime"


# --------------------------------------------------------------------------
# Verification


def algebra_residuals(cfg: OscillatorConfig, grid: RadialGrid, nmax: int = 8,
                      calibrate: bool = True) -> dict[str, np.ndarray]:
    """Per-n residual norms of the commutators, Casimir and ladder actions.

    ``calibrate=False`` skips the grid calibration gate so that coarse grids
    can be measured rather than rejected.
    """
    ap = algebra_params(cfg)
    require_nondegenerate(ap.omega_bar)
    _check_grid(ap, grid, calibrate)
    prims = _Primitives(ap, grid)
    k = ap.k
    c1 = commutator(B3_PRIME, B_PLUS) - B_PLUS
    c2 = commutator(B_MINUS, B_PLUS) - 2.0 * B3_PRIME
    cas = B3_PRIME @ B3_PRIME - 0.5 * (B_PLUS @ B_MINUS + B_MINUS @ B_PLUS)
    basis = sturmian_basis(grid, nmax + 1)
    out = defaultdict(list)
    nrm = grid.residual_norm
    for n in range(nmax + 1):
        f = basis[n]
        out["commutator_b3_bplus"].append(nrm(c1.apply(prims, f)))
        out["commutator_bminus_bplus"].append(nrm(c2.apply(prims, f)))
        out["casimir"].append(nrm(cas.apply(prims, f) - casimir_eigenvalue(k) * f))
        out["ladder_up"].append(nrm(B_PLUS.apply(prims, f) - ladder_up_coeff(k, n) * basis[n + 1]))
        down = B_MINUS.apply(prims, f)
        if n > 0:
            down = down - ladder_down_coeff(k, n) * basis[n - 1]
        out["ladder_down"].append(nrm(down))
        out["b3_eigen"].append(nrm(B3_PRIME.apply(prims, f) - (k + n) * f))
    return {key: np.array(v) for key, v in out.items()}


def verify_algebra(cfg: OscillatorConfig, grid: RadialGrid, nmax: int = 8,
                   tol: float = ALGEBRA_TOL, calibrate: bool = True) -> VerificationReport:
    """Commutator and Casimir residuals on phi_0..phi_nmax; pass iff all <= tol."""
    res = algebra_residuals(cfg, grid, nmax, calibrate)
    rep = VerificationReport()
    rep.add("commutator_b3_bplus", res["commutator_b3_bplus"].max(), tol, "[B3', B+] - B+")
    rep.add("commutator_bminus_bplus", res["commutator_bminus_bplus"].max(), tol, "[B-, B+] - 2 B3'")
    rep.add("casimir", res["casimir"].max(), tol, "C^2 - k(k-1)")
    return rep


def verify_ladder(cfg: OscillatorConfig, grid: RadialGrid, nmax: int = 8,
                  tol: float = ALGEBRA_TOL, calibrate: bool = True) -> VerificationReport:
    res = algebra_residuals(cfg, grid, nmax, calibrate)
    rep = VerificationReport()
    rep.add("ladder_up", res["ladder_up"].max(), tol, "B+ phi_n - Q+ phi_n+1")
    rep.add("ladder_down", res["ladder_down"].max(), tol, "B- phi_n - Q- phi_n-1")
    rep.add("b3_eigen", res["b3_eigen"].max(), tol, "B3' phi_n - (k+n) phi_n")
    return rep


def gram_matrix(grid: RadialGrid, nmax: int = 12) -> np.ndarray:
    b = sturmian_basis(grid, nmax)
    return np.array([[grid.inner(p, q) for q in b] for p in b])


def hr_expectation(cfg: OscillatorConfig, n_r: int, grid: RadialGrid) -> float:
    """<phi_n | H_r | phi_n> with H_r = 4a B3'."""
    ap = algebra_params(cfg)
    require_nondegenerate(ap.omega_bar)
    _check_grid(ap, grid)
    prims = _Primitives(ap, grid)
    f = sturmian_values(ap.k, ap.a, n_r, grid.points)
    f = f / grid.norm(f)
    return float(4 * ap.a * np.real(grid.inner(f, prims.K(f))))


def energy_offset(ap: AlgebraParams) -> float:
    """(mu_b_eff - E)^2 = <H_r> + m0^2 - 2a Gamma_eff - 2 s a."""
    return ap.m0**2 - 2 * ap.a * ap.gamma_eff - 2 * ap.s * ap.a


def rayleigh_energy(cfg: OscillatorConfig, n_r: int, grid: RadialGrid) -> tuple[float, float]:
    """Energies (E+, E-) recovered from the Rayleigh quotient of H_r."""
    ap = algebra_params(cfg)
    hr = hr_expectation(cfg, n_r, grid)
    root = math.sqrt(max(hr + energy_offset(ap), 0.0))
    return ap.mu_b_eff + root, ap.mu_b_eff - root
