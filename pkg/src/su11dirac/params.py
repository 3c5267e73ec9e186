"""Physical parameters and the derived su(1,1) data shared by every module.

Natural units with hbar = c = 1 are used throughout.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

MINKOWSKI = "Minkowski"
COSMIC_STRING = "CosmicString"
SPACETIMES = (MINKOWSKI, COSMIC_STRING)

CONFIG_KEYS = (
    "m0",
    "omega",
    "omega_ac",
    "phi_ac",
    "mu_moment",
    "b_field",
    "s",
    "ml_numerator",
    "eta",
    "spacetime",
)


class ConfigError(ValueError):
    """Invalid physical configuration."""


class DegenerateFrequencyError(ValueError):
    """Raised when an operation needs omega_bar > 0 but omega_bar == 0."""


@dataclass(frozen=True)
class OscillatorConfig:
    """Physical parameters of the oscillator.

    The orbital number is stored through its odd numerator,
    ``ml = ml_numerator / 2``, so shifts of ml stay exact.
    """

    m0: float
    omega: float
    omega_ac: float
    phi_ac: float
    mu_moment: float
    b_field: float
    s: int
    ml_numerator: int
    eta: float = 1.0
    spacetime: str = MINKOWSKI

    def __post_init__(self):
        for name in ("m0", "omega", "omega_ac", "phi_ac", "mu_moment", "b_field", "eta"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{name} must be a finite number, got {v!r}")
        if self.m0 <= 0:
            raise ConfigError(f"m0 must be positive, got {self.m0}")
        if isinstance(self.s, bool) or self.s not in (1, -1):
            raise ConfigError(f"s must be +1 or -1, got {self.s!r}")
        if isinstance(self.ml_numerator, bool) or not isinstance(self.ml_numerator, int):
            raise ConfigError("ml_numerator must be an integer")
        if self.ml_numerator % 2 == 0:
            raise ConfigError(f"ml_numerator must be odd (ml half-odd), got {self.ml_numerator}")
        if self.spacetime not in SPACETIMES:
            raise ConfigError(f"spacetime must be one of {SPACETIMES}, got {self.spacetime!r}")
        if not (0.0 < self.eta <= 1.0):
            raise ConfigError(f"eta must lie in (0, 1], got {self.eta}")
        if self.spacetime == MINKOWSKI and self.eta != 1.0:
            raise ConfigError("eta must equal 1 for Minkowski spacetime")
        if self.omega_bar < 0:
            raise ConfigError(f"omega - omega_ac/2 must be >= 0, got {self.omega_bar}")

    @property
    def ml(self) -> float:
        return self.ml_numerator / 2

    @property
    def omega_bar(self) -> float:
        return self.omega - self.omega_ac / 2

    @property
    def is_minkowski(self) -> bool:
        return self.spacetime == MINKOWSKI

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "OscillatorConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        keys = set(data)
        missing = [k for k in CONFIG_KEYS if k not in keys]
        extra = sorted(keys - set(CONFIG_KEYS))
        if missing:
            raise ConfigError(f"missing config keys: {missing}")
        if extra:
            raise ConfigError(f"unknown config keys: {extra}")
        ml_num = data["ml_numerator"]
        if isinstance(ml_num, float) and ml_num.is_integer():
            ml_num = int(ml_num)
        s = data["s"]
        if isinstance(s, float) and s.is_integer():
            s = int(s)
        return cls(
            m0=data["m0"],
            omega=data["omega"],
            omega_ac=data["omega_ac"],
            phi_ac=data["phi_ac"],
            mu_moment=data["mu_moment"],
            b_field=data["b_field"],
            s=s,
            ml_numerator=ml_num,
            eta=data["eta"],
            spacetime=data["spacetime"],
        )

    @classmethod
    def from_json(cls, path) -> "OscillatorConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)


@dataclass(frozen=True)
class AlgebraParams:
    """Effective angular number and Bargmann index used by the algebra.

    ``s`` is carried along because the radial index shift and the
    energy offset depend on it.
    """

    gamma_eff: float
    k: float
    omega_bar: float
    m0: float
    mu_b_eff: float
    s: int = 1

    @property
    def a(self) -> float:
        """Oscillator scale m0 * |omega_bar|."""
        return self.m0 * abs(self.omega_bar)

    @property
    def casimir(self) -> float:
        return self.k * (self.k - 1.0)


def require_nondegenerate(omega_bar: float) -> None:
    if omega_bar == 0:
        raise DegenerateFrequencyError("omega_bar = 0: the oscillator scale m0*|omega_bar| vanishes")


def gamma_ms(cfg: OscillatorConfig) -> float:
    """Gamma_s = ml + s*phi/pi - s/2 for Minkowski spacetime."""
    if not cfg.is_minkowski:
        raise ConfigError("gamma_ms needs a Minkowski config; use gamma_css")
    return cfg.ml + cfg.s * cfg.phi_ac / math.pi - cfg.s / 2


def gamma_css(cfg: OscillatorConfig) -> tuple[float, float]:
    """Return (gamma_s, gamma_s / eta) for a cosmic-string config."""
    if cfg.is_minkowski:
        raise ConfigError("gamma_css needs a CosmicString config; use gamma_ms")
    g = cfg.ml + cfg.s * cfg.phi_ac / math.pi - cfg.s * cfg.eta / 2
    return g, g / cfg.eta


def algebra_params(cfg: OscillatorConfig) -> AlgebraParams:
    if cfg.is_minkowski:
        g = gamma_ms(cfg)
        mub = cfg.mu_moment * cfg.b_field
    else:
        g = gamma_css(cfg)[1]
        mub = cfg.mu_moment * cfg.b_field / cfg.eta
    return AlgebraParams(
        gamma_eff=g,
        k=abs(g) / 2 + 0.5,
        omega_bar=cfg.omega_bar,
        m0=cfg.m0,
        mu_b_eff=mub,
        s=cfg.s,
    )
