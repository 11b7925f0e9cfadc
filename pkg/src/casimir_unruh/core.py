"""Physical parameters, dimensionless groups and regime labels.

Everything is in natural units (hbar = c = k_B = 1): energies, temperatures,
accelerations and inverse lengths share one unit.  ``gap`` is the atomic
level splitting; the closed-form asymptotics use it wherever the two-level
Hamiltonian's frequency appears.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace


class CasimirError(Exception):
    """Base class for all errors raised by the package."""


class ConfigError(CasimirError, ValueError):
    """Invalid physical or numerical configuration."""


class UnsupportedScenarioError(ConfigError):
    """Parameter combination outside the three stationary scenarios."""


class DomainError(CasimirError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class AccuracyError(CasimirError, ArithmeticError):
    """A numerical limit failed to converge to the requested tolerance."""

    def __init__(self, message: str, residual: float = math.nan, diagnostics: dict | None = None):
        super().__init__(message)
        self.residual = residual
        self.diagnostics = dict(diagnostics or {})


class ConsistencyError(AccuracyError):
    """Result violates a structural property (sign, reality) of the energy."""


class Scenario(str, enum.Enum):
    STATIC_VACUUM = "static_vacuum"
    THERMAL = "thermal"
    ACCELERATED = "accelerated"


class Regime(str, enum.Enum):
    NEAR_ZONE = "NearZone"
    FAR_ZONE = "FarZone"
    THERMAL_CLASSICAL = "ThermalClassical"
    ACCELERATED_NON_THERMAL = "AcceleratedNonThermal"
    CROSSOVER = "Crossover"


# Ratio above which T/gap or a/gap leaves the validity window (T, a << gap).
VALIDITY_LIMIT = 0.1


@dataclass(frozen=True)
class PhysicalConfig:
    """Parameter set of one two-atom configuration.

    Parameters
    ----------
    coupling : float
        Atom-field coupling; energies scale as ``coupling**4``.
    gap : float
        Atomic transition frequency (level splitting).
    separation : float
        Interatomic distance, perpendicular to the acceleration.
    acceleration : float
        Proper acceleration of both atoms.
    temperature : float
        Field temperature.
    scenario : Scenario
    """

    coupling: float
    gap: float
    separation: float
    acceleration: float = 0.0
    temperature: float = 0.0
    scenario: Scenario = Scenario.STATIC_VACUUM

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))

    def replace(self, **changes) -> "PhysicalConfig":
        return replace(self, **changes)

    def groups(self) -> "DimensionlessGroups":
        return DimensionlessGroups.from_config(self)


@dataclass(frozen=True)
class DimensionlessGroups:
    omega_z: float
    a_z: float
    t_over_omega: float
    a_over_omega: float
    t_z: float

    @classmethod
    def from_config(cls, config: PhysicalConfig) -> "DimensionlessGroups":
        om, z = config.gap, config.separation
        a, t = config.acceleration, config.temperature
        return cls(
            omega_z=om * z,
            a_z=a * z,
            t_over_omega=t / om,
            a_over_omega=a / om,
            t_z=t * z,
        )


@dataclass(frozen=True)
class Thresholds:
    lo: float = 0.1
    hi: float = 10.0

    def __post_init__(self):
        if not (0.0 < self.lo < self.hi) or not math.isfinite(self.hi):
            raise ConfigError(f"thresholds must satisfy 0 < lo < hi, got lo={self.lo}, hi={self.hi}")


DEFAULT_THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class Violation:
    field: str
    message: str
    severity: str = "error"  # "error" or "warning"

    def __str__(self):
        return f"{self.severity}: {self.field}: {self.message}"


def validate_config(config: PhysicalConfig) -> list[Violation]:
    """Check every invariant of ``config``; an empty list means valid.

    Hard violations have severity ``"error"``.  Leaving the perturbative
    validity window (T or a not small against the gap) is reported as a
    ``"warning"``.
    """
    out: list[Violation] = []
    for name in ("coupling", "gap", "separation"):
        value = getattr(config, name)
        if not (math.isfinite(value) and value > 0):
            out.append(Violation(name, f"must be finite and > 0, got {value!r}"))
    for name in ("acceleration", "temperature"):
        value = getattr(config, name)
        if not (math.isfinite(value) and value >= 0):
            out.append(Violation(name, f"must be finite and >= 0, got {value!r}"))

    a, t = config.acceleration, config.temperature
    if a > 0 and t > 0:
        out.append(Violation("scenario", "unsupported scenario: combined acceleration and temperature"))
    if config.scenario is Scenario.STATIC_VACUUM:
        if a != 0:
            out.append(Violation("acceleration", "StaticVacuum requires acceleration = 0"))
        if t != 0:
            out.append(Violation("temperature", "StaticVacuum requires temperature = 0"))
    elif config.scenario is Scenario.THERMAL:
        if a != 0:
            out.append(Violation("acceleration", "Thermal requires acceleration = 0"))
    elif config.scenario is Scenario.ACCELERATED:
        if t != 0:
            out.append(Violation("temperature", "Accelerated requires temperature = 0"))
        if not a > 0:
            out.append(Violation("acceleration", "Accelerated requires acceleration > 0"))

    if config.gap > 0:
        if t / config.gap >= VALIDITY_LIMIT:
            out.append(Violation("temperature", f"T/gap = {t / config.gap:.3g} outside the T << gap validity window", "warning"))
        if a / config.gap >= VALIDITY_LIMIT:
            out.append(Violation("acceleration", f"a/gap = {a / config.gap:.3g} outside the a << gap validity window", "warning"))
    return out


def errors_only(violations: list[Violation]) -> list[Violation]:
    return [v for v in violations if v.severity == "error"]


def require_valid(config: PhysicalConfig) -> None:
    bad = errors_only(validate_config(config))
    if bad:
        cls = UnsupportedScenarioError if any(v.field == "scenario" for v in bad) else ConfigError
        raise cls("; ".join(str(v) for v in bad))


def classify_regime(groups: DimensionlessGroups, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> Regime:
    """Label the asymptotic regime of a configuration.

    Thermal and acceleration labels take precedence over the retardation
    labels; anything not clearly inside one window is ``Crossover``.
    """
    if not isinstance(thresholds, Thresholds):
        raise ConfigError("thresholds must be a Thresholds instance")
    lo, hi = thresholds.lo, thresholds.hi
    if groups.t_z > hi:
        return Regime.THERMAL_CLASSICAL
    if groups.a_z > hi:
        return Regime.ACCELERATED_NON_THERMAL
    if groups.a_z < lo and groups.t_z < lo:
        if groups.omega_z < lo:
            return Regime.NEAR_ZONE
        if groups.omega_z > hi:
            return Regime.FAR_ZONE
    return Regime.CROSSOVER


# Recorded on every EnergyResult.
CONVENTION = {
    "units": "natural (hbar = c = k_B = 1)",
    "gap": "gap = atomic level splitting (H_atom = (gap/2) sigma_3); closed-form asymptotics use omega_0 -> gap",
    "atomic_susceptibility": "chi_g(u) = -i sin(gap*u)",
    "normalization": "overall coupling prefactor fixed by the static far-zone coefficient 1/(512 pi^3)",
}
