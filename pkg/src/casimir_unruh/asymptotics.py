"""Closed-form asymptotic energies, Unruh scales and ratio laws.

These are the reference power laws the numerical engine is checked
against.  All energies are negative (attractive) for positive inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from .core import VALIDITY_LIMIT, DimensionlessGroups, DomainError, PhysicalConfig, Regime, Scenario

NEAR_COEFFICIENT = 1.0 / (1024.0 * math.pi**2)
FAR_COEFFICIENT = 1.0 / (512.0 * math.pi**3)
THERMAL_COEFFICIENT = 1.0 / (512.0 * math.pi**3)
ACCELERATED_COEFFICIENT = 1.0 / (512.0 * math.pi**4)


def e_near_static(coupling, gap, z):
    """Near-zone static energy ``-coupling^4 / (1024 pi^2 gap z^2)``."""
    return -NEAR_COEFFICIENT * coupling**4 / (gap * z**2)


def e_far_static(coupling, gap, z):
    """Retarded static energy ``-coupling^4 / (512 pi^3 gap^2 z^3)``."""
    return -FAR_COEFFICIENT * coupling**4 / (gap**2 * z**3)


def e_thermal_classical(coupling, gap, z, temperature):
    """High-temperature (``T z >> 1``) energy ``-coupling^4 T / (512 pi^3 gap^2 z^2)``."""
    return -THERMAL_COEFFICIENT * coupling**4 * temperature / (gap**2 * z**2)


def e_accelerated(coupling, gap, z, acceleration):
    """Large-distance (``a z >> 1``) accelerated energy ``-coupling^4 / (512 pi^4 gap^2 a z^4)``."""
    if not acceleration > 0:
        raise DomainError("accelerated asymptotic form requires acceleration > 0")
    return -ACCELERATED_COEFFICIENT * coupling**4 / (gap**2 * acceleration * z**4)


def unruh_temperature(acceleration):
    if acceleration < 0:
        raise DomainError("acceleration must be >= 0")
    return acceleration / (2.0 * math.pi)


def crossover_length(acceleration) -> float | None:
    """``z_a = 1/a``; ``None`` when ``a = 0`` (no crossover for inertial atoms)."""
    if acceleration < 0:
        raise DomainError("acceleration must be >= 0")
    if acceleration == 0:
        return None
    return 1.0 / acceleration


def acc_to_thermal_ratio(az):
    """Long-distance ratio of the accelerated law to the thermal law at ``T_U``: ``2 / (az)^2``."""
    if not az > 0:
        raise DomainError("az must be > 0")
    return 2.0 / az**2


@dataclass(frozen=True)
class AsymptoticForm:
    """One closed-form power law ``E = -coefficient * coupling^4 * gap^p_gap * X^p_aux * z^p_z``."""

    regime: Regime
    coefficient: float
    z_power: int
    aux_power: int
    aux: str | None
    evaluate: Callable
    valid: Callable[[DimensionlessGroups], bool]


def _table(lo: float = 0.1, hi: float = 10.0) -> dict[Regime, AsymptoticForm]:
    quantum = lambda g: g.a_z < lo and g.t_z < lo
    return {
        Regime.NEAR_ZONE: AsymptoticForm(
            Regime.NEAR_ZONE, NEAR_COEFFICIENT, -2, 0, None,
            lambda c, om, z, x=None: e_near_static(c, om, z),
            lambda g: g.omega_z < lo and quantum(g),
        ),
        Regime.FAR_ZONE: AsymptoticForm(
            Regime.FAR_ZONE, FAR_COEFFICIENT, -3, 0, None,
            lambda c, om, z, x=None: e_far_static(c, om, z),
            lambda g: g.omega_z > hi and quantum(g),
        ),
        Regime.THERMAL_CLASSICAL: AsymptoticForm(
            Regime.THERMAL_CLASSICAL, THERMAL_COEFFICIENT, -2, 1, "temperature",
            lambda c, om, z, x: e_thermal_classical(c, om, z, x),
            lambda g: g.t_z > hi and g.t_over_omega < VALIDITY_LIMIT,
        ),
        Regime.ACCELERATED_NON_THERMAL: AsymptoticForm(
            Regime.ACCELERATED_NON_THERMAL, ACCELERATED_COEFFICIENT, -4, -1, "acceleration",
            lambda c, om, z, x: e_accelerated(c, om, z, x),
            lambda g: g.a_z > hi and g.a_over_omega < VALIDITY_LIMIT,
        ),
    }


ASYMPTOTIC_FORMS = _table()


def power_law_exponent(regime: Regime) -> float:
    """Exponent of ``z`` recovered from the closed form by a log-log difference."""
    form = ASYMPTOTIC_FORMS[regime]
    e1 = form.evaluate(1.0, 1.0, 1.0, 1.0)
    e2 = form.evaluate(1.0, 1.0, 2.0, 1.0)
    return math.log2(e2 / e1)


def crossing_points(xtol: float = 1e-14) -> dict[str, float]:
    """Where pairs of closed forms are equal, in dimensionless groups.

    Found by root-finding on log ratios (coupling = gap = 1), not from the
    analytic answers ``2/pi``, ``1`` and ``sqrt(2)``.
    """
    # Looked up at call time so a patched form propagates here.
    near_far = optimize.brentq(
        lambda z: math.log(e_near_static(1.0, 1.0, z) / e_far_static(1.0, 1.0, z)), 1e-3, 1e3, xtol=xtol, rtol=1e-15
    )
    far_thermal = optimize.brentq(
        lambda z: math.log(e_far_static(1.0, 1.0, z) / e_thermal_classical(1.0, 1.0, z, 1.0)), 1e-3, 1e3, xtol=xtol, rtol=1e-15
    )
    thermal_acc = optimize.brentq(
        lambda z: math.log(e_accelerated(1.0, 1.0, z, 1.0) / e_thermal_classical(1.0, 1.0, z, unruh_temperature(1.0))),
        1e-3, 1e3, xtol=xtol, rtol=1e-15,
    )
    return {"near_far_omega_z": near_far, "far_thermal_T_z": far_thermal, "thermal_accelerated_a_z": thermal_acc}


@dataclass(frozen=True)
class CorrectionScaling:
    """Fitted subleading correction ``dE = -K coupling^4 (X/gap)^2 / z``.

    ``X`` is ``T`` (thermal) or ``T_U = a/2pi`` (accelerated).  ``K`` is a
    measured number with standard error ``sigma``; ``curvature`` is the
    fitted next-order coefficient in ``(X/gap)^2``.  ``halving_ratio`` is
    ``dE(X) / dE(X/2)`` at the smallest pair of grid points.
    """

    scenario: Scenario
    variable: str
    K: float
    sigma: float
    curvature: float
    halving_ratio: float
    x_values: tuple
    corrections: tuple


QUANTUM_LIMIT = 0.1
# Upper end of the fit grid in units of the gap; keeps exp(-gap/X) < 1e-10 so
# the non-analytic Boltzmann term does not compete with the (X/gap)^2 term.
BOLTZMANN_LIMIT = 0.04


def thermal_like_correction_scaling(config: PhysicalConfig, quad=None, n_points: int = 8) -> CorrectionScaling:
    """Fit the low-temperature (or low-acceleration) correction to the energy.

    A geometric grid ``X_k = X_top / 2^k`` with
    ``X_top = min(0.1/z, 0.04 gap)`` (two decades for ``n_points = 8``) is
    evaluated with the engine.  For the thermal case the reference is the
    ``T = 0`` energy; for the accelerated case it is the same light-cone
    geometry with the coth factor replaced by 1, so only the statistical
    part is measured.  ``(dE z / coupling^4) / x`` with ``x = (X/gap)^2`` is
    fitted linearly in ``x``; the intercept is ``K``.

    Raises
    ------
    DomainError
        If the configuration is outside the quantum regime (``T z`` or
        ``a z`` not below 0.1).
    """
    from .energy_engine import QuadratureSpec, energy_vf, energy_vf_inertial_reference

    quad = quad or QuadratureSpec()
    z, gap = config.separation, config.gap
    if config.temperature * z >= QUANTUM_LIMIT or config.acceleration * z >= QUANTUM_LIMIT:
        raise DomainError("correction fit refused: configuration is outside the quantum regime (Tz, az < 0.1)")
    if n_points < 4:
        raise DomainError("correction fit needs at least 4 grid points")
    accelerated = config.scenario is Scenario.ACCELERATED
    x_top = min(QUANTUM_LIMIT / z, BOLTZMANN_LIMIT * gap)
    xs = [x_top / 2**k for k in range(n_points)][::-1]
    lam4 = config.coupling**4
    corr = []
    for x in xs:
        if accelerated:
            c = config.replace(acceleration=2.0 * math.pi * x, temperature=0.0)
            de = energy_vf(c, quad).value - energy_vf_inertial_reference(c, quad).value
        else:
            c = config.replace(temperature=x, acceleration=0.0, scenario=Scenario.THERMAL)
            base = config.replace(temperature=0.0, acceleration=0.0, scenario=Scenario.STATIC_VACUUM)
            de = energy_vf(c, quad).value - energy_vf(base, quad).value
        corr.append(de)
    u = np.array([(x / gap) ** 2 for x in xs])
    y = -np.array(corr) * z / lam4 / u
    (slope, intercept), cov = np.polyfit(u, y, 1, cov=True)
    return CorrectionScaling(
        scenario=Scenario.ACCELERATED if accelerated else Scenario.THERMAL,
        variable="T_U" if accelerated else "T",
        K=float(intercept),
        sigma=float(math.sqrt(max(cov[1, 1], 0.0))),
        curvature=float(slope),
        halving_ratio=corr[1] / corr[0],
        x_values=tuple(xs),
        corrections=tuple(corr),
    )
