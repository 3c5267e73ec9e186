"""Aggregated oracle suites behind ``su11dirac verify``.

Grid checks run first, starting with the commutators, so an under-resolved
grid is reported as a commutator failure. Calibration is its own check.
"""
from __future__ import annotations

import math

import numpy as np

from . import coherent as coh
from . import observables as obs
from . import radial, spectrum
from .params import OscillatorConfig, algebra_params, require_nondegenerate
from .report import VerificationReport
from .su11 import (
    TruncationError,
    casimir_eigenvalue,
    displacement_oracle,
    ladder_down_coeff,
    ladder_up_coeff,
    perelomov_coefficients,
    truncated_rep,
    xi_from_z,
    z_from_xi,
)

TOL = {
    "algebra": radial.ALGEBRA_TOL,
    "calibration": radial.CALIBRATION_TOL,
    "orthonormality": 1e-10,
    "rayleigh": 1e-6,
    "inversion": 1e-12,
    "exact": 1e-12,
    "coherent": 1e-7,
    "generating": 1e-10,
    "norm_drift": 1e-8,
    "period": 1e-10,
    "similarity": 1e-8,
    "uncertainty": 1e-9,
    "matrix_elements": 1e-8,
}

XI_SAMPLES = (0.0, 0.3, 0.5j, -0.4 + 0.4j, 0.8)
Z_SAMPLES = (0.0, 0.4, 0.7j, -0.5 + 0.6j, 1.2)
RAYLEIGH_NMAX = 5


def _grid_suites(rep, cfg, npoints, rmax_scale, nmax):
    ap = algebra_params(cfg)
    grid = radial.make_grid(ap, npoints=npoints, rmax_scale=rmax_scale)

    res = radial.algebra_residuals(cfg, grid, nmax, calibrate=False)
    tol = TOL["algebra"]
    rep.add("commutator_b3_bplus", res["commutator_b3_bplus"].max(), tol, "[B3', B+] - B+")
    rep.add("commutator_bminus_bplus", res["commutator_bminus_bplus"].max(), tol, "[B-, B+] - 2 B3'")
    rep.add("casimir", res["casimir"].max(), tol, "C^2 - k(k-1)")
    rep.add("ladder_up", res["ladder_up"].max(), tol, "B+ phi_n - Q+ phi_n+1")
    rep.add("ladder_down", res["ladder_down"].max(), tol, "B- phi_n - Q- phi_n-1")
    rep.add("b3_eigen", res["b3_eigen"].max(), tol, "B3' phi_n - (k+n) phi_n")

    cal = grid.calibration_error()
    rep.add("grid_calibration", cal, TOL["calibration"], "moment integrals vs closed form")
    if not cal <= TOL["calibration"]:
        return

    g = radial.gram_matrix(grid, radial.DEFAULT_NMAX)
    rep.add("orthonormality", np.abs(g - np.eye(len(g))).max(), TOL["orthonormality"], "Gram matrix - I")

    worst = 0.0
    for n in range(RAYLEIGH_NMAX + 1):
        got = radial.rayleigh_energy(cfg, n, grid)
        want = spectrum.energy(cfg, n)
        for x, y in zip(got, want):
            worst = max(worst, abs(x - y) / max(abs(y), 1e-300))
    rep.add("rayleigh_energy", worst, TOL["rayleigh"], "relative, n_r <= 5")

    r2, rd = obs.quadrature_elements(cfg, grid, 7)
    err = max(np.abs(r2 - obs.rho2_elements(ap, 7)).max(), np.abs(rd - obs.rho_ddrho_elements(ap, 7)).max())
    rep.add("matrix_elements", err, TOL["matrix_elements"], "8x8 blocks vs quadrature")

    cgrid = coh.coherent_grid(cfg, max(abs(x) for x in XI_SAMPLES), npoints=max(npoints, 2048),
                              rmax_scale=rmax_scale)
    worst = 0.0
    for xi in XI_SAMPLES:
        a = coh.coherent_closed_form(cfg, xi, cgrid).samples
        b = coh.coherent_series(cfg, xi, cgrid).samples
        c = coh.coherent_reconstruction(cfg, xi, cgrid).samples
        worst = max(worst, np.abs(a - b).max(), np.abs(a - c).max(), np.abs(b - c).max())
    rep.add("coherent_equivalence", worst, TOL["coherent"], "closed form / series / reconstruction")

    period = coh.period(cfg)
    drift = per = spectral = 0.0
    xi = XI_SAMPLES[3]
    for t in (0.0, 0.37 * period, 1.9 * period):
        p = coh.evolve(cfg, xi, t, cgrid)
        q = coh.evolve(cfg, xi, t + period, cgrid)
        o = coh.evolve_spectral(cfg, xi, t, cgrid)
        drift = max(drift, abs(p.norm - 1.0))
        per = max(per, np.abs(p.density - q.density).max())
        spectral = max(spectral, np.abs(p.samples - o.samples).max())
    rep.add("evolution_norm", drift, TOL["norm_drift"], "| ||phi(t)|| - 1 |")
    rep.add("evolution_period", per, TOL["period"], "|phi(t+T)|^2 - |phi(t)|^2")
    rep.add("evolution_spectral", spectral, TOL["coherent"], "closed form vs level sum")


def _exact_suites(rep, cfg):
    ap = algebra_params(cfg)
    k = ap.k

    dim = 64
    r = truncated_rep(k, dim)
    kp, km, k3 = r.kplus, r.kminus, r.kthree
    inner = slice(0, dim - 2)
    c1 = (k3 @ kp - kp @ k3 - kp)[inner, inner]
    c2 = (km @ kp - kp @ km - 2 * k3)[inner, inner]
    cas = (r.casimir() - casimir_eigenvalue(k) * np.eye(dim))[inner, inner]
    rep.add("rep_commutators", max(np.abs(c1).max(), np.abs(c2).max()) / dim, TOL["exact"],
            "truncated rep, interior block")
    rep.add("rep_casimir", np.abs(cas).max() / (k + dim) ** 2, TOL["exact"], "relative to (k+dim)^2")

    n = np.arange(51)
    up = ladder_up_coeff(k, n) ** 2 - (n + 1) * (2 * k + n)
    dn = ladder_down_coeff(k, n) ** 2 - n * (2 * k + n - 1)
    scale = (2 * k + 51) ** 2
    rep.add("ladder_coefficients", max(np.abs(up).max(), np.abs(dn).max()) / scale, TOL["exact"], "n <= 50")

    worst = 0.0
    for n_r in range(RAYLEIGH_NMAX + 1):
        for x, y in zip(spectrum.spectrum_from_b3(cfg, n_r), spectrum.energy(cfg, n_r)):
            worst = max(worst, abs(x - y) / max(abs(y), 1.0))
    rep.add("b3_inversion", worst, TOL["inversion"], "energies from n + k relation")

    rows = spectrum.phase_sweep(cfg, 0, np.linspace(0.0, 4 * math.pi, 41))
    rep.add("periodicity", float(sum(not row.periodic for row in rows)), 0.0, "failing rows in 41-point sweep")

    trip = max(abs(z_from_xi(xi_from_z(z).xi) - z) for z in Z_SAMPLES)
    rep.add("z_xi_roundtrip", trip, 1e-14, "z -> xi -> z")

    sim = expv = unc = 0.0
    for z in Z_SAMPLES:
        try:
            rr, blocks = obs.similarity_oracle(k, z, m=16)
        except TruncationError:
            rep.add("similarity_oracle", math.inf, TOL["similarity"], f"oracle truncation at z={z}")
            return
        for closed, block in zip(obs.similarity_transforms(rr, z), blocks):
            sim = max(sim, np.abs(block - closed[:16, :16]).max())
        got = obs.generator_expectations(k, z)
        want = obs.generator_expectations_oracle(k, z)
        expv = max(expv, max(abs(x - y) for x, y in zip(got, want)))
        cf = obs.uncertainty_report(k, z)
        orc = obs.uncertainty_oracle(k, z)
        unc = max(unc, cf.relative_residual, orc.relative_residual,
                  abs(cf.lhs - orc.lhs) / abs(cf.lhs))
    z = Z_SAMPLES[3]
    col = displacement_oracle(k, z)[1][:40, 0]
    xi = xi_from_z(z).xi
    coef_err = np.abs(col - perelomov_coefficients(k, xi, 39)).max()
    rep.add("similarity_transforms", sim, TOL["similarity"], "closed forms vs D^dag K D")
    rep.add("generator_expectations", max(expv, coef_err), TOL["similarity"], "<K+>, <K->, <K3> and c_n")
    rep.add("uncertainty_minimality", unc, TOL["uncertainty"], "relative residual of the equality")

    x = np.linspace(0.0, 6.0, 13)
    gen = np.abs(coh.laguerre_generating(0.4, 1.0, x, 200) - coh.laguerre_generating_closed(0.4, 1.0, x)).max()
    rep.add("generating_function", gen, TOL["generating"], "y=0.4, nu=1, 200 terms")


def run_verification(cfg: OscillatorConfig, level: str = "full", npoints: int = radial.DEFAULT_POINTS,
                     rmax_scale: float = 1.0, nmax: int = 8) -> VerificationReport:
    """Run the suites for ``level`` in {"full", "algebra-only"}."""
    if level not in ("full", "algebra-only"):
        raise ValueError(f"unknown level {level!r}")
    require_nondegenerate(cfg.omega_bar)
    rep = VerificationReport()
    if level == "full":
        _grid_suites(rep, cfg, npoints, rmax_scale, nmax)
    _exact_suites(rep, cfg)
    return rep
