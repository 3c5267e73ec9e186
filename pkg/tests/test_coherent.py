import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre

from su11dirac import coherent as coh
from su11dirac.params import algebra_params
from su11dirac.radial import make_grid, sturmian

from conftest import make_cfg

# k = 1/2, 1, 3/2, 2.125 (via phi), 3
K_CFGS = {
    0.5: make_cfg(ml_numerator=1),
    1.0: make_cfg(ml_numerator=3),
    1.5: make_cfg(ml_numerator=-3),
    2.125: make_cfg(ml_numerator=3, phi_ac=9 * math.pi / 4),
    3.0: make_cfg(ml_numerator=-11, s=-1, omega=1.4),
}
XIS = [0.0, 0.25, 0.5j, -0.45 + 0.45j, 0.8 * cmath.exp(2.3j)]


@pytest.fixture(scope="module")
def grids():
    return {k: coh.coherent_grid(cfg, 0.8) for k, cfg in K_CFGS.items()}


def test_k_values():
    for k, cfg in K_CFGS.items():
        assert algebra_params(cfg).k == pytest.approx(k)


def test_generating_function_identity():
    x = np.linspace(0, 2, 5)
    got = coh.laguerre_generating(0.4, 1.0, x, 200)
    want = np.exp(-x * 0.4 / 0.6) / 0.6**2  # nu + 1 = 2
    np.testing.assert_allclose(got, want, rtol=1e-10)
    assert coh.laguerre_generating(0.4, 1.0, 2.0, 200) == pytest.approx(
        sum(0.4**n * eval_genlaguerre(n, 1.0, 2.0) for n in range(200)), rel=1e-12)


@given(y=st.floats(-0.7, 0.7), nu=st.floats(0, 6), x=st.floats(0, 10))
def test_generating_function_property(y, nu, x):
    got = coh.laguerre_generating(y, nu, x, 400)
    want = coh.laguerre_generating_closed(y, nu, x)
    assert abs(got - want) <= 1e-9 * max(1.0, abs(want), math.exp(x / 2) / (1 - abs(y)) ** (nu + 1))


@pytest.mark.parametrize("k", sorted(K_CFGS))
@pytest.mark.parametrize("xi", XIS)
def test_three_way_equivalence(grids, k, xi):
    cfg, grid = K_CFGS[k], grids[k]
    a = coh.coherent_closed_form(cfg, xi, grid).samples
    b = coh.coherent_series(cfg, xi, grid).samples
    c = coh.coherent_reconstruction(cfg, xi, grid).samples
    assert np.abs(a - b).max() <= 1e-7
    assert np.abs(a - c).max() <= 1e-7
    assert np.abs(b - c).max() <= 1e-7


@pytest.mark.parametrize("k", sorted(K_CFGS))
@pytest.mark.parametrize("r", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_series_matches_closed_form_5x5(grids, k, r):
    cfg = K_CFGS[k]
    grid = coh.coherent_grid(cfg, 0.9) if r > 0.8 else grids[k]
    xi = r * cmath.exp(0.6j)
    a = coh.coherent_closed_form(cfg, xi, grid).samples
    b = coh.coherent_series(cfg, xi, grid).samples
    assert np.abs(a - b).max() <= 1e-8


@pytest.mark.parametrize("k", [0.5, 2.125])
def test_xi_zero_is_ground_state(k):
    cfg = K_CFGS[k]
    grid = make_grid(cfg)
    ground = sturmian(cfg, 0, grid).values
    for fn in (coh.coherent_closed_form, coh.coherent_series, coh.coherent_reconstruction):
        np.testing.assert_allclose(fn(cfg, 0, grid).samples, ground, atol=1e-10, rtol=0)


def test_series_rejects_large_xi(grids):
    with pytest.raises(ValueError):
        coh.coherent_series(K_CFGS[1.0], 0.96, grids[1.0])
    with pytest.raises(ValueError):
        coh.coherent_closed_form(K_CFGS[1.0], 1.0, grids[1.0])


def test_series_nmax_nonconvergence():
    with pytest.raises(coh.SeriesConvergenceError):
        coh.series_nmax(3.0, 0.9999999, tol=1e-16)


def test_series_nmax_bound_holds():
    k, r = 1.5, 0.6
    n = coh.series_nmax(k, r, 1e-12)
    c = np.abs(np.array([math.comb(m + 2, m) for m in range(n + 1, n + 2000)], dtype=float)) * r ** np.arange(n + 1, n + 2000)
    assert c.sum() < 1e-12


@pytest.mark.parametrize("k", [0.5, 1.0, 3.0])
def test_time_zero_is_closed_form(grids, k):
    cfg = K_CFGS[k]
    xi = XIS[3]
    a = coh.evolve(cfg, xi, 0.0, grids[k]).samples
    b = coh.coherent_closed_form(cfg, xi, grids[k]).samples
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("k", [0.5, 1.5, 3.0])
@pytest.mark.parametrize("t", [0.0, 0.13, 0.9, 2.7])
def test_evolution_matches_level_sum(grids, k, t):
    cfg = K_CFGS[k]
    a = coh.evolve(cfg, XIS[4], t, grids[k])
    b = coh.evolve_spectral(cfg, XIS[4], t, grids[k])
    assert np.abs(a.samples - b.samples).max() <= 1e-7
    assert abs(a.norm - 1) <= 1e-8


@settings(max_examples=25, deadline=None)
@given(t=st.floats(-20, 20), frac=st.floats(0, 1))
def test_density_period(grids, t, frac):
    cfg = K_CFGS[1.5]
    T = coh.period(cfg)
    xi = XIS[3]
    p = coh.evolve(cfg, xi, t, grids[1.5]).density
    q = coh.evolve(cfg, xi, t + T, grids[1.5]).density
    assert np.abs(p - q).max() <= 1e-10
    assert T == pytest.approx(math.pi / 2 / algebra_params(cfg).a)


def test_evolution_rotates_xi_clockwise(grids):
    # xi(t) = xi exp(-4 i a t): a quarter period maps xi to -i xi
    cfg = K_CFGS[1.0]
    T = coh.period(cfg)
    xi = 0.4
    a = coh.evolve(cfg, xi, T / 4, grids[1.0]).density
    b = coh.coherent_closed_form(cfg, -1j * xi, grids[1.0]).density
    np.testing.assert_allclose(a, b, atol=1e-13)
