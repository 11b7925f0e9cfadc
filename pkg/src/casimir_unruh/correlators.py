"""Scalar-field statistical functions for static, thermal and co-accelerated atoms.

All three scenarios share one stationary spectral structure between the two
worldlines::

    C(t)   = 1/(8 pi^2 N) * int_0^inf dw sin(w rho) s(w) 2 cos(w t)
    chi(t) = 1/(8 pi^2 N) * int_0^inf dw sin(w rho) (-2i) sin(w t)

with light-cone delay ``rho`` and normalization ``N`` (``rho = N = z`` for
atoms at rest) and statistical factor ``s`` (1, coth(w/2T) or coth(pi w/a)).
The susceptibility is a pair of delta functions on the effective light cone
and is kept in that exact form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._numerics import coth, neville_to_zero
from .core import AccuracyError, DomainError, PhysicalConfig, Scenario, UnsupportedScenarioError

PREFACTOR = 1.0 / (8.0 * math.pi**2)


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    x: float
    y: float
    z: float


def worldline(tau, acceleration: float) -> SpacetimePoint:
    """Point on the uniformly accelerated worldline at proper time ``tau``."""
    a = float(acceleration)
    if not a > 0:
        raise DomainError("worldline requires acceleration > 0; use the static worldline for a = 0")
    return SpacetimePoint(math.sinh(a * tau) / a, math.cosh(a * tau) / a, 0.0, 0.0)


def lightcone_delay(separation: float, acceleration: float = 0.0) -> float:
    """Proper-time delay ``rho = (2/a) asinh(a z / 2)`` between the two worldlines."""
    z, a = float(separation), float(acceleration)
    if a == 0.0:
        return z
    return 2.0 / a * math.asinh(0.5 * a * z)


def kernel_normalization(separation: float, acceleration: float = 0.0) -> float:
    """``N = z sqrt(1 + (a z / 2)^2)``, equal to ``sinh(a rho) / a``."""
    z, a = float(separation), float(acceleration)
    return z * math.hypot(1.0, 0.5 * a * z)


def _stat_sine(w, x, t_eff):
    """``sin(w x) * coth(w / 2 t_eff)`` (or ``sin(w x)`` in vacuum), series branch near 0."""
    if t_eff == 0.0:
        return np.sin(w * x)
    small = w < 1e-6 * max(t_eff, 1.0 / x)
    ws = np.where(small, 1.0, w)
    direct = np.sin(ws * x) * coth(ws / (2.0 * t_eff))
    # coth y ~ 1/y + y/3, sin y ~ y - y^3/6
    series = 2.0 * t_eff * x + w**2 * (x / (6.0 * t_eff) - t_eff * x**3 / 3.0)
    return np.where(small, series, direct)


@dataclass(frozen=True)
class SpectralKernel:
    """Frequency-domain field statistics between two stationary worldlines."""

    scenario: Scenario
    separation: float
    acceleration: float
    temperature: float
    delay: float
    norm: float

    prefactor = PREFACTOR

    @property
    def effective_temperature(self) -> float:
        """Temperature of the coth factor: T, a/2pi, or 0 in vacuum."""
        if self.scenario is Scenario.ACCELERATED:
            return self.acceleration / (2.0 * math.pi)
        if self.scenario is Scenario.THERMAL:
            return self.temperature
        return 0.0

    @property
    def characteristic_frequency(self) -> float:
        return max(1.0 / self.delay, self.temperature, self.acceleration)

    def weight(self, w):
        return np.sin(np.asarray(w, dtype=float) * self.delay)

    def statistics(self, w):
        w = np.asarray(w, dtype=float)
        t_eff = self.effective_temperature
        if t_eff == 0.0:
            return np.ones_like(w)
        return coth(w / (2.0 * t_eff))

    def weighted_statistics(self, w):
        """``weight(w) * statistics(w)``, finite at ``w = 0``."""
        return _stat_sine(np.asarray(w, dtype=float), self.delay, self.effective_temperature)

    def sine_transform(self, t):
        """Closed form of ``int_0^inf s(w) sin(w t) dw`` (odd in ``t``).

        ``1/t`` in vacuum and ``pi T coth(pi T t)`` for a coth factor at
        temperature T (``T = a/2pi`` when accelerated).
        """
        t = np.asarray(t, dtype=float)
        if np.any(t == 0.0):
            raise DomainError("sine transform of the statistical factor is singular at t = 0")
        t_eff = self.effective_temperature
        if t_eff == 0.0:
            return 1.0 / t
        x = math.pi * t_eff * t
        return math.pi * t_eff * np.sign(t) * coth(np.abs(x))


def spectral_kernel(config: PhysicalConfig) -> SpectralKernel:
    a, temp = config.acceleration, config.temperature
    if a > 0 and temp > 0:
        raise UnsupportedScenarioError("unsupported scenario: combined acceleration and temperature")
    scenario = config.scenario
    if a > 0:
        scenario = Scenario.ACCELERATED
    elif scenario is Scenario.ACCELERATED:
        # a = 0 is routed to the static forms before any 1/a appears
        scenario = Scenario.STATIC_VACUUM
    if scenario is Scenario.THERMAL and temp == 0.0:
        scenario = Scenario.STATIC_VACUUM
    z = config.separation
    return SpectralKernel(
        scenario=scenario,
        separation=z,
        acceleration=a if scenario is Scenario.ACCELERATED else 0.0,
        temperature=temp if scenario is Scenario.THERMAL else 0.0,
        delay=lightcone_delay(z, a),
        norm=kernel_normalization(z, a),
    )


@dataclass(frozen=True)
class DeltaForm:
    """``chi(t) = amplitude * [delta(t - delay) - delta(t + delay)]``."""

    amplitude: complex
    delay: float


def susceptibility_delta_form(kernel: SpectralKernel) -> DeltaForm:
    # int_0^inf sin(w rho) sin(w t) dw = (pi/2) [delta(t - rho) - delta(t + rho)]
    return DeltaForm(amplitude=-1j / (8.0 * math.pi * kernel.norm), delay=kernel.delay)


def _regulated_sine_transform(kernel: SpectralKernel, x: float, eps: float, tol: float, limit: int):
    """``int_0^inf s(w) sin(w x) exp(-eps w) dw`` for ``x > 0``."""
    cut = math.pi / x
    t_eff = kernel.effective_temperature
    head_f = lambda w: float(_stat_sine(w, x, t_eff)) * math.exp(-eps * w)
    head, e1 = integrate.quad(head_f, 0.0, cut, epsabs=0.0, epsrel=tol, limit=limit)
    tail_f = lambda w: float(kernel.statistics(w)) * math.exp(-eps * w)
    tail, e2 = integrate.quad(tail_f, cut, np.inf, weight="sin", wvar=x, limlst=200, limit=limit, epsabs=tol * 1e-3 / max(x, eps))
    return head + tail, e1 + e2


def symmetric_correlation(kernel: SpectralKernel, t: float, quad=None, method: str = "spectral") -> float:
    """Field symmetric correlation ``C(t)`` between the two worldlines.

    ``method="spectral"`` integrates the frequency representation with an
    ``exp(-eps w)`` regulator and extrapolates ``eps -> 0`` (Neville).
    ``method="closed"`` evaluates the exact sine transforms.  Both are even
    in ``t`` and singular on the light cone ``|t| = delay``.
    """
    rho = kernel.delay
    t = abs(float(t))
    if t == rho:
        raise DomainError("symmetric correlation is singular on the light cone |t| = delay")
    args = [rho + t, rho - t]
    if method == "closed":
        vals = [float(kernel.sine_transform(x)) if x != 0.0 else 0.0 for x in args]
        return kernel.prefactor / kernel.norm * (vals[0] + vals[1])
    if method != "spectral":
        raise ValueError(f"unknown method {method!r}")
    from .energy_engine import QuadratureSpec

    quad = quad or QuadratureSpec()
    total = 0.0
    for x in args:
        if x == 0.0:
            continue
        sign, ax = math.copysign(1.0, x), abs(x)
        scale = max(1.0 / ax, kernel.characteristic_frequency)
        eps0 = quad.regulator / scale
        steps = [eps0 / 2**k for k in range(quad.n_extrapolation)]
        vals = []
        qerr = 0.0
        for eps in steps:
            v, e = _regulated_sine_transform(kernel, ax, eps, quad.tolerance * 1e-3, quad.subdivision_limit)
            vals.append(v)
            qerr = max(qerr, e)
        limit_value, residual = neville_to_zero(steps, vals)
        if residual > quad.tolerance * max(abs(limit_value), 1.0 / ax):
            raise AccuracyError(
                f"regulator extrapolation did not converge at x={ax:g}",
                residual=residual,
                diagnostics={"values": vals, "steps": steps},
            )
        total += sign * limit_value
    return kernel.prefactor / kernel.norm * total
