"""su(1,1) algebraic toolkit for the 2+1 dimensional Dirac oscillator with
Aharonov-Casher coupling, in Minkowski and cosmic-string backgrounds."""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    ConfigError,
    DegenerateFrequencyError,
    OscillatorConfig,
    algebra_params,
)
from .spectrum import energy, energy_levels  # noqa: E402

__all__ = [
    "ConfigError",
    "DegenerateFrequencyError",
    "OscillatorConfig",
    "algebra_params",
    "energy",
    "energy_levels",
    "__version__",
]
