import json

import pytest

from su11dirac.params import COSMIC_STRING, MINKOWSKI, OscillatorConfig


def make_cfg(ml_numerator=3, s=1, phi_ac=0.0, eta=1.0, spacetime=None, m0=1.0, omega=1.0,
             omega_ac=0.0, mu_moment=0.0, b_field=0.0):
    if spacetime is None:
        spacetime = MINKOWSKI if eta == 1.0 else COSMIC_STRING
    return OscillatorConfig(m0=m0, omega=omega, omega_ac=omega_ac, phi_ac=phi_ac, mu_moment=mu_moment,
                            b_field=b_field, s=s, ml_numerator=ml_numerator, eta=eta, spacetime=spacetime)


PI = 3.141592653589793

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

# Gamma_eff spread used by the grid suites: 0, +-1, +-13/4, both s, both spacetimes.
SWEEP = {
    "ms_g0": make_cfg(ml_numerator=1, s=1),
    "ms_g1": make_cfg(ml_numerator=3, s=1),
    "ms_gm1": make_cfg(ml_numerator=-1, s=1),
    "ms_sm_g0": make_cfg(ml_numerator=-1, s=-1),
    "ms_sm_g1": make_cfg(ml_numerator=1, s=-1),
    "ms_g13/4": make_cfg(ml_numerator=3, s=1, phi_ac=9 * PI / 4),
    "css_g13/4": make_cfg(ml_numerator=3, s=1, phi_ac=3 * PI / 8, eta=0.5),
    "css_sm_gm13/4": make_cfg(ml_numerator=-3, s=-1, phi_ac=3 * PI / 8, eta=0.5),
    "css_sm_gm13/2": make_cfg(ml_numerator=-3, s=-1, phi_ac=2 * PI, eta=0.5),
}


@pytest.fixture
def write_cfg(tmp_path):
    def _write(cfg, name="cfg.json"):
        p = tmp_path / name
        p.write_text(json.dumps(cfg.to_dict()))
        return str(p)

    return _write
