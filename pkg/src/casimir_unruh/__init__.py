"""Fourth-order Casimir-Polder energy of two two-level atoms in a scalar field.

Static vacuum, thermal bath and uniform co-acceleration, with closed-form
asymptotics and a command-line sweep/validation front end.
"""
from .core import (
    AccuracyError,
    CasimirError,
    ConfigError,
    ConsistencyError,
    DomainError,
    DimensionlessGroups,
    PhysicalConfig,
    Regime,
    Scenario,
    Thresholds,
    UnsupportedScenarioError,
    classify_regime,
    validate_config,
)
from .energy_engine import EnergyResult, QuadratureSpec, energy_vf, energy_vf_oracle, pv_integrate, stationary_reduction

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "CasimirError", "ConfigError", "ConsistencyError", "DomainError", "DimensionlessGroups",
    "EnergyResult", "PhysicalConfig", "QuadratureSpec", "Regime", "Scenario", "Thresholds",
    "UnsupportedScenarioError", "classify_regime", "energy_vf", "energy_vf_oracle", "pv_integrate",
    "stationary_reduction", "validate_config",
]
