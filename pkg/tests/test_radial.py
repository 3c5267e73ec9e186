import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import eval_genlaguerre, gammaln

from su11dirac import radial
from su11dirac.params import DegenerateFrequencyError, algebra_params
from su11dirac.radial import (
    GridResolutionError,
    algebra_residuals,
    build_operator,
    energy_offset,
    gram_matrix,
    laguerre,
    make_grid,
    operator_labels,
    rayleigh_energy,
    sturmian,
    sturmian_basis,
    verify_algebra,
    verify_ladder,
)
from su11dirac.spectrum import energy

from conftest import SWEEP, make_cfg

ALGEBRA_TOL = 1e-5


@pytest.fixture(scope="module")
def sweep_residuals():
    out = {}
    for name, cfg in SWEEP.items():
        grid = make_grid(cfg)
        out[name] = algebra_residuals(cfg, grid, nmax=8)
    return out


def test_laguerre_low_orders():
    x = np.linspace(0, 5, 11)
    np.testing.assert_array_equal(laguerre(0, 0.7, x), np.ones_like(x))
    np.testing.assert_allclose(laguerre(1, 0.7, x), 1.7 - x, rtol=1e-15)


@given(n=st.integers(0, 30), alpha=st.floats(0, 8), x=st.floats(0, 40))
def test_laguerre_against_scipy(n, alpha, x):
    want = eval_genlaguerre(n, alpha, x)
    got = float(laguerre(n, alpha, x))
    # L_n grows like exp(x/2); compare on that scale
    scale = max(1.0, math.exp(x / 2) * math.exp(0.5 * (gammaln(n + alpha + 1) - gammaln(n + 1))))
    assert abs(got - want) <= 1e-11 * scale


def test_laguerre_explicit_sum():
    n, alpha, x = 6, 2.5, 1.3
    want = sum(
        (-1) ** j * math.exp(gammaln(n + alpha + 1) - gammaln(n - j + 1) - gammaln(alpha + j + 1)) * x**j
        / math.factorial(j)
        for j in range(n + 1)
    )
    assert float(laguerre(n, alpha, x)) == pytest.approx(want, rel=1e-13)


@pytest.mark.parametrize("name", sorted(SWEEP))
def test_grid_calibration_and_gram(name):
    grid = make_grid(SWEEP[name])
    assert grid.calibration_error() <= radial.CALIBRATION_TOL
    assert np.all(grid.weights > 0)
    g = gram_matrix(grid, 12)
    np.testing.assert_allclose(g, np.eye(13), atol=1e-10)


def test_sturmian_norm_against_adaptive_quadrature():
    cfg = make_cfg(ml_numerator=3, omega=1.3)
    ap = algebra_params(cfg)
    grid = make_grid(cfg)
    phi = sturmian(cfg, 3, grid)
    assert phi.norm == pytest.approx(1.0, abs=1e-12)
    # unnormalized integral of rho * f^2 by scipy.quad vs the grid
    f = lambda r: (r ** (2 * ap.k - 1) * math.exp(-ap.a * r * r / 2) * eval_genlaguerre(3, 2 * ap.k - 1, ap.a * r * r)) ** 2 * r
    want, _ = quad(f, 0, grid.r_max, limit=200, epsabs=0, epsrel=1e-13)
    raw = radial.sturmian_values(ap.k, ap.a, 3, grid.points)
    assert grid.integrate(raw**2) == pytest.approx(want, rel=1e-11)


def test_sturmian_k_half_finite_at_origin():
    cfg = make_cfg(ml_numerator=1)
    grid = make_grid(cfg)
    phi = sturmian(cfg, 0, grid)
    assert np.isfinite(phi.values).all()
    # rho^0 exp(-x/2): nearly constant near the origin
    assert phi.values[0] == pytest.approx(phi.values[1], rel=1e-4)


@pytest.mark.parametrize("name", sorted(SWEEP))
@pytest.mark.parametrize("key", ["commutator_b3_bplus", "commutator_bminus_bplus", "casimir"])
def test_algebra_closure(sweep_residuals, name, key):
    assert sweep_residuals[name][key].max() <= ALGEBRA_TOL


@pytest.mark.parametrize("name", sorted(SWEEP))
@pytest.mark.parametrize("key", ["ladder_up", "ladder_down", "b3_eigen"])
def test_ladder_realization(sweep_residuals, name, key):
    assert sweep_residuals[name][key].max() <= ALGEBRA_TOL


@pytest.mark.parametrize("name", ["ms_g1", "ms_g13/4", "css_sm_gm13/2"])
def test_convergence_order_under_4x_coarsening(name):
    cfg = SWEEP[name]
    res = {}
    for n in (128, 512):
        r = algebra_residuals(cfg, make_grid(cfg, npoints=n), nmax=8, calibrate=False)
        res[n] = r["commutator_bminus_bplus"].max()
    observed = math.log(res[128] / res[512]) / math.log(4)
    assert 6.5 <= observed <= 9.5  # stencils are 8th order


def test_css_eta_one_residuals_match_ms():
    kw = dict(ml_numerator=-3, s=-1, phi_ac=0.4)
    ms, css = make_cfg(**kw), make_cfg(spacetime="CosmicString", **kw)
    a = algebra_residuals(ms, make_grid(ms))
    b = algebra_residuals(css, make_grid(css))
    for key in a:
        np.testing.assert_allclose(a[key], b[key], atol=1e-12, rtol=0)


def test_verify_reports():
    cfg = SWEEP["ms_g1"]
    grid = make_grid(cfg)
    rep = verify_algebra(cfg, grid)
    assert rep.passed and [c.name for c in rep.checks] == [
        "commutator_b3_bplus", "commutator_bminus_bplus", "casimir"]
    assert verify_ladder(cfg, grid).passed


def test_coarse_grid_fails_commutator_check():
    cfg = SWEEP["ms_g1"]
    rep = verify_algebra(cfg, make_grid(cfg, npoints=64), calibrate=False)
    assert not rep.passed
    assert rep.first_failure.name == "commutator_b3_bplus"


def test_calibration_gate():
    cfg = SWEEP["ms_g1"]
    grid = make_grid(cfg, eps=0.3)
    assert grid.calibration_error() > radial.CALIBRATION_TOL
    with pytest.raises(GridResolutionError):
        algebra_residuals(cfg, grid)


def test_grid_config_mismatch():
    grid = make_grid(SWEEP["ms_g1"])
    with pytest.raises(ValueError):
        algebra_residuals(SWEEP["ms_g0"], grid)


def test_degenerate_frequency_rejected():
    with pytest.raises(DegenerateFrequencyError):
        make_grid(make_cfg(omega_ac=2.0))


@pytest.mark.parametrize(
    "cfg, want",
    [
        (make_cfg(ml_numerator=3), 1.0),
        (make_cfg(ml_numerator=-1, s=-1), math.sqrt(5)),
        (make_cfg(ml_numerator=-1, phi_ac=-math.pi / 4, eta=0.5), 3.0),
    ],
)
def test_rayleigh_examples(cfg, want):
    ep, em = rayleigh_energy(cfg, 0, make_grid(cfg))
    assert ep == pytest.approx(want, rel=1e-6)
    assert em == pytest.approx(-want, rel=1e-6)


@pytest.mark.parametrize("name", sorted(SWEEP))
def test_rayleigh_matches_closed_form(name):
    cfg = SWEEP[name]
    grid = make_grid(cfg)
    for n in range(6):
        got = rayleigh_energy(cfg, n, grid)
        assert got == pytest.approx(energy(cfg, n), rel=1e-6)


def test_energy_offset_hand_value():
    ap = algebra_params(make_cfg(ml_numerator=3, s=-1, omega=2.0, m0=1.5))
    # Gamma = 3/2 + 1/2 = 2, a = 3
    assert energy_offset(ap) == pytest.approx(2.25 - 12 + 6)


@pytest.mark.parametrize(
    "cfg, labels",
    [
        (make_cfg(s=1), ("Bplus1", "Bminus1", "B3prime")),
        (make_cfg(s=-1, ml_numerator=1), ("Bplus2", "Bminus2", "B3prime")),
        (make_cfg(s=1, eta=0.5), ("Splus1", "Sminus1", "T3prime")),
        (make_cfg(s=-1, eta=0.5), ("Splus2", "Sminus2", "T3prime")),
    ],
)
def test_operator_labels(cfg, labels):
    assert operator_labels(cfg) == labels


@pytest.mark.parametrize("bad", ["Bplus2", "Splus1", "Bogus"])
def test_build_operator_rejects_wrong_labels(bad):
    cfg = make_cfg(s=1)
    with pytest.raises(ValueError):
        build_operator(cfg, make_grid(cfg), bad)


def test_tplus_alias_matches_splus():
    cfg = make_cfg(s=1, eta=0.5, ml_numerator=3)
    grid = make_grid(cfg)
    f = sturmian_basis(grid, 2)[1]
    a = build_operator(cfg, grid, "Splus1").apply(f)
    b = build_operator(cfg, grid, "Tplus1").apply(f)
    np.testing.assert_array_equal(a, b)


def test_built_operators_act_as_ladders():
    cfg = make_cfg(ml_numerator=5)
    ap = algebra_params(cfg)
    grid = make_grid(cfg)
    basis = sturmian_basis(grid, 4)
    up = build_operator(cfg, grid, "Bplus1").apply(basis[2])
    assert grid.residual_norm(up - math.sqrt(3 * (2 * ap.k + 2)) * basis[3]) <= ALGEBRA_TOL
    hr = build_operator(cfg, grid, "Hr").apply(basis[1])
    assert grid.residual_norm(hr - 4 * ap.a * (ap.k + 1) * basis[1]) <= 4 * ap.a * ALGEBRA_TOL


@settings(max_examples=15, deadline=None)
@given(n=st.integers(0, 10), om=st.floats(0.3, 3.0))
def test_sturmian_orthonormal_property(n, om):
    cfg = make_cfg(ml_numerator=-3, omega=om)
    grid = make_grid(cfg)
    b = sturmian_basis(grid, 10)
    assert grid.inner(b[n], b[n]) == pytest.approx(1.0, abs=1e-10)
    m = (n + 3) % 11
    if m != n:
        assert abs(grid.inner(b[n], b[m])) <= 1e-10
