"""Fourth-order vacuum-fluctuation interaction energy of two ground-state atoms.

After the field susceptibility is collapsed onto the light cone and the two
atomic responses are combined, every route evaluates one scalar

    J = Im int_0^inf dw s(w) r(w + i0)^2 exp(2 i w rho),   r(w) = gap / (gap^2 - w^2)

and the energy is ``E = -coupling**4 * J / (256 pi^3 N^2)``.  Three
independent evaluations of ``J`` are provided:

``"matsubara"`` (production)
    Rotating the contour to the imaginary axis picks up the poles of the
    coth factor, ``J = 2 pi T sum'_n F(2 pi n T)`` with
    ``F(x) = gap^2 exp(-2 x rho) / (gap^2 + x^2)^2`` (an integral at T = 0).
``"real"`` (diagnostic)
    The real-frequency integral with the double pole at ``w = gap`` split
    into a boundary term, a principal value and an on-resonance term.
``energy_vf_oracle``
    The regulated time-domain integral of the stationary reduction.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from ._numerics import coth, csch2, neville_to_zero, panel_quad
from .atom_response import atomic_susceptibility
from .core import (
    CONVENTION,
    AccuracyError,
    ConfigError,
    ConsistencyError,
    DomainError,
    PhysicalConfig,
    classify_regime,
    require_valid,
)
from .correlators import DeltaForm, SpectralKernel, spectral_kernel, susceptibility_delta_form, symmetric_correlation

ENERGY_PREFACTOR = 1.0 / (256.0 * math.pi**3)

# Direct Matsubara sums longer than this switch to Euler-Maclaurin.
_MAX_DIRECT_TERMS = 2_000_000
# The real-axis route loses about log10(gap * rho) digits to cancellation.
REAL_ROUTE_MAX_PHASE = 20.0


def _quiet(fn):
    """Silence QUADPACK warnings; the wrapped routine checks its own error estimates."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            return fn(*args, **kwargs)

    return wrapper


@dataclass(frozen=True)
class QuadratureSpec:
    """Numerical policy for the regulated and oscillatory integrals.

    Parameters
    ----------
    regulator : float
        First regulator ``eps0`` in units of the characteristic frequency.
    n_extrapolation : int
        Length of the geometric sequence ``eps0 / 2**k`` fed to Neville.
    omega_max_factor : float
        Frequency cutoff for explicit panels, in units of
        ``max(gap, 1/rho, T, a)``; beyond it a Fourier-tail rule is used.
    u_max : float
        Time-domain truncation; ``inf`` integrates the full half-line.
    tolerance : float
        Relative accuracy target, in ``(0, 1e-2]``.
    subdivision_limit : int
        Interval budget passed to QUADPACK.
    pv_halfwidth : float
        Principal-value window half-width as a fraction of the distance
        from the pole to the nearest edge.
    """

    regulator: float = 0.1
    n_extrapolation: int = 6
    omega_max_factor: float = 200.0
    u_max: float = math.inf
    tolerance: float = 1e-6
    subdivision_limit: int = 1000
    pv_halfwidth: float = 0.25

    def __post_init__(self):
        for name in ("regulator", "omega_max_factor", "u_max", "tolerance", "pv_halfwidth"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0) or math.isnan(v):
                raise ConfigError(f"quadrature.{name} must be > 0, got {v!r}")
        if not 0.0 < self.tolerance <= 1e-2:
            raise ConfigError(f"quadrature.tolerance must lie in (0, 1e-2], got {self.tolerance!r}")
        if self.omega_max_factor < 50:
            raise ConfigError(f"quadrature.omega_max_factor must be >= 50, got {self.omega_max_factor!r}")
        if self.pv_halfwidth >= 1:
            raise ConfigError("quadrature.pv_halfwidth must be < 1 (window inside the domain)")
        for name in ("n_extrapolation", "subdivision_limit"):
            v = getattr(self, name)
            if not (isinstance(v, int) and v >= 2):
                raise ConfigError(f"quadrature.{name} must be an integer >= 2, got {v!r}")

    def replace(self, **changes) -> "QuadratureSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class EnergyResult:
    value: float
    error: float
    method: str
    regime: str
    convention: dict = field(default_factory=lambda: dict(CONVENTION))
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class StationaryReduction:
    """Time-difference form of the fourth-order shift.

    With ``u1, u2, u3 >= 0`` the shift is
    ``chain_prefactor * int C(u1+u2+u3) chi_F(u2) chi_A(u1) chi_B(u3)`` plus
    the local resonant term.  ``chi_F`` is the delta form, so ``u2 = rho``.
    """

    config: PhysicalConfig
    kernel: SpectralKernel
    field_susceptibility: DeltaForm
    chain_prefactor: complex

    @property
    def delay(self) -> float:
        return self.kernel.delay

    def field_correlation(self, t):
        return symmetric_correlation(self.kernel, t, method="closed")

    def atomic(self, u):
        return atomic_susceptibility(u, self.config.gap)

    def collapsed_integrand(self, u1: float, u3: float) -> complex:
        """Integrand after the ``u2`` integral is taken on the light cone."""
        c = self.field_correlation(u1 + self.delay + u3)
        return complex(self.chain_prefactor * self.field_susceptibility.amplitude * c * self.atomic(u1) * self.atomic(u3))

    def combined_prefactor(self) -> complex:
        # (i c^4/4) * (-i/(8 pi N)) * (-i)^2, real by construction
        return self.chain_prefactor * self.field_susceptibility.amplitude * (-1j) ** 2

    def response_sum(self, s):
        """``S(s + 2 rho) = 8 pi^2 N C(s + rho) + S(s)``: chain plus local term."""
        k = self.kernel
        s = float(s)
        if s == 0.0:
            return float(k.sine_transform(2.0 * self.delay))
        chain = 8.0 * math.pi**2 * k.norm * self.field_correlation(s + self.delay)
        return chain + float(k.sine_transform(s))


def stationary_reduction(config: PhysicalConfig) -> StationaryReduction:
    require_valid(config)
    kernel = spectral_kernel(config)
    return StationaryReduction(
        config=config,
        kernel=kernel,
        field_susceptibility=susceptibility_delta_form(kernel),
        chain_prefactor=0.25j * config.coupling**4,
    )


def _characteristic_frequency(config: PhysicalConfig, kernel: SpectralKernel) -> float:
    return max(config.gap, 1.0 / kernel.delay, config.temperature, config.acceleration)


def _check_result(value: float, imag: float, error: float, quad: QuadratureSpec, diagnostics: dict):
    if not math.isfinite(value):
        raise ConsistencyError("energy is not finite", residual=math.inf, diagnostics=diagnostics)
    if abs(imag) > 10.0 * quad.tolerance * abs(value):
        raise ConsistencyError(
            "energy has an imaginary part above 10x tolerance; sign chain inconsistent",
            residual=abs(imag),
            diagnostics=diagnostics,
        )
    if not value < 0.0:
        raise ConsistencyError("ground-state interaction energy must be attractive (negative)", residual=value, diagnostics=diagnostics)
    if not error >= 0.0:
        raise ConsistencyError("negative error estimate", residual=error, diagnostics=diagnostics)


def _finish(red: StationaryReduction, j: float, j_err: float, method: str, quad: QuadratureSpec, diag: dict) -> EnergyResult:
    pref = red.combined_prefactor()
    # pref = -c^4 / (32 pi N); the remaining 1/(8 pi^2 N) comes from C
    scale = ENERGY_PREFACTOR / red.kernel.norm**2
    value = -(red.config.coupling**4) * (j * scale)
    imag = pref.imag * j * scale
    error = red.config.coupling**4 * j_err * scale
    diag = dict(diag, J=j, J_err=j_err)
    _check_result(value, imag, error, quad, diag)
    return EnergyResult(
        value=value,
        error=error,
        method=method,
        regime=classify_regime(red.config.groups()).value,
        diagnostics=diag,
    )


# Matsubara route -----------------------------------------------------------


def _matsubara_f(xi, gap, rho):
    return gap**2 * np.exp(-2.0 * xi * rho) / (gap**2 + xi**2) ** 2


def _taylor_odd_derivatives(gap: float, rho: float, kmax: int = 3):
    """``F^(2k-1)(0)`` for ``k = 1..kmax`` from the product of Taylor series."""
    n = 2 * kmax
    e = np.array([(-2.0 * rho) ** m / math.factorial(m) for m in range(n)])
    # (1 + y)^-2 with y = (x/gap)^2
    q = np.zeros(n)
    for m in range(0, n, 2):
        q[m] = (m // 2 + 1) * (-1) ** (m // 2) / gap ** (m)
    c = np.convolve(e, q)[:n] / gap**2
    return [c[2 * k - 1] * math.factorial(2 * k - 1) for k in range(1, kmax + 1)]


@_quiet
def _j_matsubara(gap: float, rho: float, t_eff: float, quad: QuadratureSpec):
    f = lambda x: _matsubara_f(x, gap, rho)
    rtol = min(quad.tolerance * 1e-8, 1e-14)
    if t_eff == 0.0:
        edges = np.concatenate([[0.0], np.geomspace(min(gap, 1.0 / rho) * 1e-2, 40.0 * min(gap, 1.0 / rho), 60)])
        head, e1, n = panel_quad(f, edges, rtol=rtol)
        tail, e2 = integrate.quad(f, edges[-1], np.inf, epsabs=1e-16 * abs(head), epsrel=1e-13, limit=quad.subdivision_limit)
        return head + tail, e1 + e2, {"route": "integral", "panels": n}
    h = 2.0 * math.pi * t_eff
    x_max = min(20.0 / rho, 1e5 * gap) + h
    n_terms = int(math.ceil(x_max / h))
    if n_terms <= _MAX_DIRECT_TERMS:
        xs = h * np.arange(n_terms + 1)
        v = f(xs)
        v[0] *= 0.5
        s = h * math.fsum(v)
        # neglected tail, bounded by the integral beyond the last node
        tail, _ = integrate.quad(f, xs[-1], np.inf, epsabs=0.0, epsrel=1e-8, limit=quad.subdivision_limit)
        return s + tail, abs(tail) + 1e-15 * abs(s), {"route": "sum", "terms": n_terms + 1}
    # Euler-Maclaurin: h sum' F(nh) = int F - sum_k B_2k h^2k / (2k)! F^(2k-1)(0)
    base, e1, _ = _j_matsubara(gap, rho, 0.0, quad)
    bern = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0]
    derivs = _taylor_odd_derivatives(gap, rho, len(bern))
    terms = [-b * h ** (2 * k + 2) / math.factorial(2 * k + 2) * d for k, (b, d) in enumerate(zip(bern, derivs))]
    return base + math.fsum(terms), e1 + abs(terms[-1]), {"route": "euler-maclaurin", "terms": 0}


# Real-frequency route ------------------------------------------------------


def _g_and_dg(w, rho, t_eff):
    """``G = s(w) sin(2 w rho)`` and ``G'`` without 0/0 or overflow."""
    w = np.asarray(w, dtype=float)
    if t_eff == 0.0:
        return np.sin(2 * w * rho), 2 * rho * np.cos(2 * w * rho)
    x = w / (2.0 * t_eff)
    small = (x < 1e-3) & (w * rho < 1e-3)
    xs = np.where(small | (x == 0), 1.0, x)
    ws = 2.0 * t_eff * xs
    g = np.sin(2 * ws * rho) * coth(xs)
    dg = 2 * rho * np.cos(2 * ws * rho) * coth(xs) - np.sin(2 * ws * rho) * csch2(xs) / (2 * t_eff)
    c2 = rho / (3.0 * t_eff) - 8.0 * t_eff * rho**3 / 3.0
    g = np.where(small, 4 * t_eff * rho + c2 * w**2, g)
    dg = np.where(small, 2 * c2 * w, dg)
    return g, dg


def _dim_h(w, gap, rho, t_eff):
    g, dg = _g_and_dg(w, rho, t_eff)
    return gap**2 * (dg / (gap + w) ** 2 - 2 * g / (gap + w) ** 3)


@_quiet
def pv_integrate(f, pole: float, a: float, b: float, quad: QuadratureSpec | None = None, points=None):
    """Principal value of ``int_a^b f(w) / (w - pole) dw``.

    The window ``[pole - d, pole + d]`` is folded onto its odd part,
    ``int_0^d (f(pole + x) - f(pole - x)) / x dx``, which is regular.  The
    outer pieces use adaptive quadrature.  The result is recomputed with
    ``d / 2``; a change above tolerance raises ``AccuracyError``.

    Returns ``(value, error_estimate)``.
    """
    quad = quad or QuadratureSpec()
    if not a < pole < b:
        raise DomainError(f"pole {pole!r} must lie strictly inside ({a!r}, {b!r})")
    edge = min(pole - a, b - pole)
    tol = min(quad.tolerance * 1e-3, 1e-9)

    def once(d):
        odd = lambda x: (f(pole + x) - f(pole - x)) / x
        core, e0 = integrate.quad(odd, 0.0, d, epsabs=0.0, epsrel=tol, limit=quad.subdivision_limit)
        outer = lambda w: f(w) / (w - pole)
        pts_l = [p for p in (points or ()) if a < p < pole - d] or None
        pts_r = [p for p in (points or ()) if pole + d < p < b] or None
        left, e1 = integrate.quad(outer, a, pole - d, epsabs=0.0, epsrel=tol, limit=quad.subdivision_limit, points=pts_l)
        right, e2 = integrate.quad(outer, pole + d, b, epsabs=0.0, epsrel=tol, limit=quad.subdivision_limit, points=pts_r)
        return core + left + right, e0 + e1 + e2

    d = quad.pv_halfwidth * edge
    v1, e1 = once(d)
    v2, e2 = once(0.5 * d)
    change = abs(v1 - v2)
    scale = max(abs(v2), e2, 1e-300)
    if change > quad.tolerance * scale and change > 10 * (e1 + e2):
        raise AccuracyError(f"principal value not stable under window halving (change {change:.3g})", residual=change)
    return v2, max(e2, change)


@_quiet
def _j_real(gap: float, rho: float, t_eff: float, w_max: float, quad: QuadratureSpec):
    dimh = lambda w: _dim_h(w, gap, rho, t_eff)
    boundary = -(4.0 * t_eff * rho if t_eff > 0 else 0.0) / gap

    # on-resonance term, -pi (Re h)'(gap)
    w = gap
    s = 1.0 if t_eff == 0 else float(coth(w / (2 * t_eff)))
    ds = 0.0 if t_eff == 0 else -float(csch2(w / (2 * t_eff))) / (2 * t_eff)
    c2, s2 = math.cos(2 * w * rho), math.sin(2 * w * rho)
    d_re_h = gap**2 * ((ds * c2 - 2 * rho * s * s2) / (gap + w) ** 2 - 2 * s * c2 / (gap + w) ** 3)
    resonance = -math.pi * d_re_h

    half = math.pi / (2.0 * rho)
    inner_pts = list(np.arange(half, 2 * gap, half)[:200])
    pv_near, e_near = pv_integrate(lambda x: float(dimh(x)), gap, 0.0, 2 * gap, quad, points=inner_pts)

    f_mid = lambda x: dimh(x) / (x - gap)
    n_edges = int(min(max((w_max - 2 * gap) / half, 8), 200_000))
    edges = np.linspace(2 * gap, w_max, n_edges + 1)
    mid, e_mid, panels = panel_quad(f_mid, edges, rtol=min(quad.tolerance * 1e-3, 1e-9), atol=0.0)

    # Fourier tail beyond w_max; s' is exponentially small there
    sc = lambda x: float(coth(x / (2 * t_eff))) if t_eff > 0 else 1.0
    sin_part = lambda x: gap**2 * (-2 * sc(x) / (gap + x) ** 3) / (x - gap)
    cos_part = lambda x: gap**2 * (2 * rho * sc(x) / (gap + x) ** 2) / (x - gap)
    t1, e1 = integrate.quad(sin_part, w_max, np.inf, weight="sin", wvar=2 * rho, limlst=200)
    t2, e2 = integrate.quad(cos_part, w_max, np.inf, weight="cos", wvar=2 * rho, limlst=200)
    pv = pv_near + mid + t1 + t2
    diag = {
        "route": "real-axis",
        "boundary_term": boundary,
        "principal_value": pv,
        "resonance_term": resonance,
        "panels": panels,
    }
    return boundary + pv + resonance, e_near + e_mid + e1 + e2, diag


def energy_vf(config: PhysicalConfig, quad: QuadratureSpec | None = None, method: str = "matsubara") -> EnergyResult:
    """Production evaluation of the vacuum-fluctuation interaction energy.

    Parameters
    ----------
    config : PhysicalConfig
    quad : QuadratureSpec, optional
    method : {"matsubara", "real"}
        ``"real"`` integrates along real frequencies and reports the
        boundary, principal-value and resonance pieces in ``diagnostics``.
        Its cancellations grow with ``gap * rho``; use it for moderate
        separations.

    Returns
    -------
    EnergyResult
    """
    quad = quad or QuadratureSpec()
    red = stationary_reduction(config)
    k = red.kernel
    t_eff = k.effective_temperature
    if method == "matsubara":
        j, err, diag = _j_matsubara(config.gap, k.delay, t_eff, quad)
    elif method == "real":
        if config.gap * k.delay > REAL_ROUTE_MAX_PHASE:
            raise DomainError(
                f"real-axis route needs gap*rho <= {REAL_ROUTE_MAX_PHASE:g} (got {config.gap * k.delay:.3g}); use method='matsubara'"
            )
        w_max = quad.omega_max_factor * _characteristic_frequency(config, k)
        j, err, diag = _j_real(config.gap, k.delay, t_eff, w_max, quad)
    else:
        raise ValueError(f"unknown method {method!r}")
    diag["scenario"] = k.scenario.value
    if err > quad.tolerance * abs(j):
        raise AccuracyError(f"frequency integral error {err:.3g} exceeds tolerance", residual=err, diagnostics=diag)
    return _finish(red, j, err, "frequency-domain", quad, diag)


# Time-domain oracle ----------------------------------------------------------


@_quiet
def _oracle_level(red: StationaryReduction, eps: float, quad: QuadratureSpec):
    """``int_0^u_max K(s) S(s + 2 rho) exp(-eps s) ds``."""
    gap = red.config.gap
    g = red.response_sum
    f_sin = lambda s: 0.5 / gap * g(s) * math.exp(-eps * s)
    f_cos = lambda s: -0.5 * s * g(s) * math.exp(-eps * s)
    kw = dict(wvar=gap, limit=quad.subdivision_limit)
    if math.isinf(quad.u_max):
        a, e1 = integrate.quad(f_sin, 0.0, np.inf, weight="sin", limlst=400, **kw)
        b, e2 = integrate.quad(f_cos, 0.0, np.inf, weight="cos", limlst=400, **kw)
    else:
        a, e1 = integrate.quad(f_sin, 0.0, quad.u_max, weight="sin", **kw)
        b, e2 = integrate.quad(f_cos, 0.0, quad.u_max, weight="cos", **kw)
    return a + b, e1 + e2


def energy_vf_oracle(config: PhysicalConfig, quad: QuadratureSpec | None = None) -> EnergyResult:
    """Independent time-domain evaluation of the same energy.

    The light-cone collapse leaves ``int du1 du3 C(u1 + rho + u3) sin sin``;
    with ``s = u1 + u3`` the two atomic sines fold into
    ``response_convolution``.  Each ``exp(-eps s)`` level is integrated with
    QUADPACK's Fourier rules and the sequence ``eps -> 0`` is extrapolated.
    """
    quad = quad or QuadratureSpec()
    red = stationary_reduction(config)
    steps = [quad.regulator * config.gap / 2**k for k in range(quad.n_extrapolation)]
    vals, qerr = [], 0.0
    for eps in steps:
        v, e = _oracle_level(red, eps, quad)
        vals.append(v)
        qerr = max(qerr, e)
    j, residual = neville_to_zero(steps, vals)
    diag = {"steps": steps, "levels": vals, "extrapolation_residual": residual, "quadrature_error": qerr}
    err = residual + qerr
    if err > max(quad.tolerance, 1e-9) * abs(j) * 10:
        raise AccuracyError("regulator extrapolation did not converge", residual=residual, diagnostics=diag)
    return _finish(red, j, err, "time-domain-oracle", quad, diag)



def energy_vf_inertial_reference(config: PhysicalConfig, quad: QuadratureSpec | None = None) -> EnergyResult:
    """Energy with the configuration's light-cone geometry but ``s(w) = 1``.

    Subtracting it from ``energy_vf`` isolates the part carried by the
    statistical factor; for ``a = T = 0`` the two coincide.
    """
    quad = quad or QuadratureSpec()
    red = stationary_reduction(config)
    j, err, diag = _j_matsubara(config.gap, red.kernel.delay, 0.0, quad)
    diag["scenario"] = red.kernel.scenario.value
    return _finish(red, j, err, "frequency-domain", quad, diag)
