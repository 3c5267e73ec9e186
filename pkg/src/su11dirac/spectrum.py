"""Closed-form energy levels, the algebraic inversion through K3, and AC-phase sweeps."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .params import (
    AlgebraParams,
    ConfigError,
    OscillatorConfig,
    algebra_params,
    require_nondegenerate,
)

# relative agreement demanded from the periodicity partner (a few ulps)
PERIODICITY_RTOL = 8 * np.finfo(float).eps


@dataclass(frozen=True)
class EnergyLevel:
    n_r: int
    n_s: int
    branch: str
    value: float


def shifted_index(n_r: int, s: int) -> int:
    """n_s = n_r + (1 - s)/2."""
    return n_r + (1 - s) // 2


def _check_nr(n_r):
    if int(n_r) != n_r or n_r < 0:
        raise ValueError(f"n_r must be a non-negative integer, got {n_r}")


def _bracket(ap: AlgebraParams, n_r: int) -> float:
    g = ap.gamma_eff
    return shifted_index(n_r, ap.s) + abs(g) / 2 - g / 2


def energy_from_params(ap: AlgebraParams, n_r: int) -> tuple[float, float]:
    require_nondegenerate(ap.omega_bar)
    _check_nr(n_r)
    root = math.sqrt(ap.m0**2 + 4 * ap.a * _bracket(ap, n_r))
    return ap.mu_b_eff + root, ap.mu_b_eff - root


def energy_ms(cfg: OscillatorConfig, n_r: int) -> tuple[float, float]:
    if not cfg.is_minkowski:
        raise ConfigError("energy_ms needs a Minkowski config")
    return energy_from_params(algebra_params(cfg), n_r)


def energy_css(cfg: OscillatorConfig, n_r: int) -> tuple[float, float]:
    if cfg.is_minkowski:
        raise ConfigError("energy_css needs a CosmicString config")
    return energy_from_params(algebra_params(cfg), n_r)


def energy(cfg: OscillatorConfig, n_r: int) -> tuple[float, float]:
    """Dispatch on the spacetime tag."""
    return energy_from_params(algebra_params(cfg), n_r)


def energy_levels(cfg: OscillatorConfig, n_max: int) -> list[EnergyLevel]:
    out = []
    for n in range(n_max + 1):
        ep, em = energy(cfg, n)
        ns = shifted_index(n, cfg.s)
        out.append(EnergyLevel(n, ns, "+", ep))
        out.append(EnergyLevel(n, ns, "-", em))
    return out


def b3_offset(ap: AlgebraParams) -> float:
    """Constant c with n + k = (mu_b_eff - E)^2 / (4a) + c.

    Valid for both spin projections; reduces to the familiar
    1/4 - m0/(4|w|) + ml/2 + phi/(2 pi) only when s = +1.
    """
    return ap.gamma_eff / 2 + ap.s / 2 - ap.m0**2 / (4 * ap.a)


def spectrum_from_b3(cfg: OscillatorConfig, n_r: int) -> tuple[float, float]:
    """Solve n + k = (mu_b_eff - E)^2/(4a) + c for E, both roots."""
    ap = algebra_params(cfg)
    require_nondegenerate(ap.omega_bar)
    _check_nr(n_r)
    sq = 4 * ap.a * (n_r + ap.k - b3_offset(ap))
    if sq < 0:
        sq = 0.0
    root = math.sqrt(sq)
    return ap.mu_b_eff + root, ap.mu_b_eff - root


def periodicity_partner(cfg: OscillatorConfig) -> OscillatorConfig:
    """Config whose Gamma at phi equals Gamma of cfg at phi + 2 pi: ml -> ml + 2s."""
    return dataclasses.replace(cfg, ml_numerator=cfg.ml_numerator + 4 * cfg.s)


@dataclass(frozen=True)
class PhaseRow:
    phi_ac: float
    n_r: int
    s: int
    e_plus: float
    e_minus: float
    shifted_e_plus: float
    shifted_e_minus: float
    partner_e_plus: float
    partner_e_minus: float
    periodic: bool


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= PERIODICITY_RTOL * max(abs(a), abs(b), 1.0)


def phase_sweep(cfg: OscillatorConfig, n_r: int, phi_grid) -> list[PhaseRow]:
    """Energies on a grid of AC phases with the periodicity check per row.

    For each phase the level at phi + 2 pi is compared with the partner
    config (ml + 2s) at phi.
    """
    partner = periodicity_partner(cfg)
    rows = []
    for phi in phi_grid:
        phi = float(phi)
        at = dataclasses.replace(cfg, phi_ac=phi)
        ep, em = energy(at, n_r)
        sp, sm = energy(dataclasses.replace(cfg, phi_ac=phi + 2 * math.pi), n_r)
        pp, pm = energy(dataclasses.replace(partner, phi_ac=phi), n_r)
        ok = _close(sp, pp) and _close(sm, pm)
        rows.append(PhaseRow(phi, n_r, cfg.s, ep, em, sp, sm, pp, pm, ok))
    return rows
