import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from casimir_unruh.core import AccuracyError, DomainError, PhysicalConfig, Scenario, UnsupportedScenarioError
from casimir_unruh.correlators import (
    kernel_normalization,
    lightcone_delay,
    spectral_kernel,
    susceptibility_delta_form,
    symmetric_correlation,
    worldline,
)
from casimir_unruh.energy_engine import QuadratureSpec


def static(z):
    return PhysicalConfig(0.1, 1.0, z)


def thermal(z, t):
    return PhysicalConfig(0.1, 1.0, z, 0.0, t, Scenario.THERMAL)


def accel(z, a):
    return PhysicalConfig(0.1, 1.0, z, a, 0.0, Scenario.ACCELERATED)


def test_worldline_examples():
    p = worldline(0.0, 1.0)
    assert (p.t, p.x, p.y, p.z) == (0.0, 1.0, 0.0, 0.0)
    p = worldline(1.0, 1.0)
    assert math.isclose(p.t, 1.1752012, rel_tol=1e-7) and math.isclose(p.x, 1.5430806, rel_tol=1e-7)
    with pytest.raises(DomainError):
        worldline(1.0, 0.0)


@given(st.floats(-3, 3), st.floats(1e-6, 1e2))
def test_hyperbola(tau, a):
    p = worldline(tau / max(a, 1.0), a)
    assert abs((p.x**2 - p.t**2) * a**2 - 1) <= 1e-12


def test_delay_examples():
    assert lightcone_delay(1.0, 0.0) == 1.0
    assert math.isclose(lightcone_delay(1.0, 2.0), 0.8813736, rel_tol=1e-7)
    assert math.isclose(kernel_normalization(1.0, 2.0), 1.4142136, rel_tol=1e-7)
    assert math.isclose(math.sinh(2 * lightcone_delay(1.0, 2.0)) / 2, 1.4142136, rel_tol=1e-7)


@given(st.floats(1e-3, 1e3), st.floats(1e-6, 1e2))
def test_delay_identities(z, a):
    rho, n = lightcone_delay(z, a), kernel_normalization(z, a)
    assert 0 < rho <= z * (1 + 1e-15)
    assert math.isclose(2 / a * math.sinh(a * rho / 2), z, rel_tol=1e-12)
    assert math.isclose(math.sinh(a * rho) / a, n, rel_tol=1e-12)


@given(st.floats(1e-2, 1e2), st.floats(1e-3, 10), st.floats(1.01, 10))
def test_delay_decreases_with_acceleration(z, a, f):
    assert lightcone_delay(z, a * f) < lightcone_delay(z, a)


def test_kernel_examples():
    k = spectral_kernel(accel(1.0, 2.0))
    # direct evaluation of sin(asinh(1))
    assert math.isclose(float(k.weight(1.0)), 0.7716133340725974, rel_tol=1e-12)
    assert k.norm == kernel_normalization(1.0, 2.0)
    w = np.geomspace(1e-3, 1e3, 30)
    a = 0.4
    assert np.array_equal(spectral_kernel(accel(1.0, a)).statistics(w), spectral_kernel(thermal(1.0, a / (2 * math.pi))).statistics(w))


def test_kernel_routing():
    assert spectral_kernel(thermal(1.0, 0.0)).scenario is Scenario.STATIC_VACUUM
    assert np.all(spectral_kernel(static(1.0)).statistics([0.1, 1.0]) == 1.0)
    with pytest.raises(UnsupportedScenarioError):
        spectral_kernel(PhysicalConfig(0.1, 1.0, 1.0, 0.1, 0.1, Scenario.ACCELERATED))


def test_limit_chain():
    w = np.geomspace(1e-4, 1e3, 60)
    for z in (0.05, 1.0, 20.0):
        ks = spectral_kernel(static(z))
        ref = ks.weight(w) / ks.norm
        ka = spectral_kernel(accel(z, 1e-9))
        kt = spectral_kernel(thermal(z, 1e-12))
        assert np.max(np.abs(ka.weight(w) / ka.norm / ref - 1)) <= 1e-10
        assert np.max(np.abs(kt.weight(w) / kt.norm / ref - 1)) <= 1e-10
        assert np.max(np.abs(kt.statistics(w) - 1)) <= 1e-10


def test_local_inertial_expansion_is_quadratic():
    w = np.array([0.3, 1.0, 2.7])
    z = 1.0

    def dev(a):
        k = spectral_kernel(accel(z, a))
        return np.abs((k.weight(w) / k.norm - np.sin(w * z) / z) / (np.sin(w * z) / z))

    ratio = dev(1e-2) / dev(5e-3)
    assert np.all(np.abs(ratio / 4 - 1) < 0.01)


def test_weighted_statistics_series_branch():
    k = spectral_kernel(thermal(2.0, 0.3))
    w = np.array([0.0, 1e-12, 1e-8, 1e-7 * 0.3 * 9, 1e-3])
    v = k.weighted_statistics(w)
    assert np.all(np.isfinite(v))
    assert math.isclose(v[0], 2 * 0.3 * 2.0, rel_tol=1e-15)
    # continuity across the branch switch
    lo, hi = 1e-6 * max(0.3, 0.5) * (1 - 1e-9), 1e-6 * max(0.3, 0.5) * (1 + 1e-9)
    a, b = k.weighted_statistics(np.array([lo, hi]))
    assert math.isclose(a, b, rel_tol=1e-9)


def test_delta_form_examples():
    d = susceptibility_delta_form(spectral_kernel(static(1.0)))
    assert d.delay == 1.0 and d.amplitude == -1j / (8 * math.pi)
    d = susceptibility_delta_form(spectral_kernel(accel(1.0, 2.0)))
    assert math.isclose(d.delay, 0.8813736, rel_tol=1e-7)
    assert math.isclose(d.amplitude.imag, -1 / (8 * math.pi * 1.4142136), rel_tol=1e-7)
    assert susceptibility_delta_form(spectral_kernel(thermal(1.0, 0.3))) == susceptibility_delta_form(spectral_kernel(static(1.0)))


def test_static_correlation_at_zero():
    c = symmetric_correlation(spectral_kernel(static(1.0)), 0.0)
    assert math.isclose(c, 1 / (4 * math.pi**2), rel_tol=1e-8)


@pytest.mark.parametrize("cfg", [static(1.0), thermal(1.0, 0.2), accel(1.0, 0.5), thermal(3.0, 0.01), accel(0.2, 0.05)])
@pytest.mark.parametrize("t", [0.0, 0.37, 2.5, 7.0])
def test_spectral_matches_closed_form(cfg, t):
    k = spectral_kernel(cfg)
    spectral = symmetric_correlation(k, t)
    closed = symmetric_correlation(k, t, method="closed")
    assert math.isclose(spectral, closed, rel_tol=1e-8)
    assert symmetric_correlation(k, -t) == spectral


def test_thermal_vs_accelerated_correlation_difference_scales_as_az_squared():
    z = 1.0

    def rel(a):
        ca = symmetric_correlation(spectral_kernel(accel(z, a)), 0.0)
        ct = symmetric_correlation(spectral_kernel(thermal(z, a / (2 * math.pi))), 0.0)
        return abs(ca / ct - 1)

    assert abs(rel(1e-3) / rel(5e-4) / 4 - 1) < 0.05


def test_light_cone_is_singular():
    k = spectral_kernel(static(1.0))
    with pytest.raises(DomainError):
        symmetric_correlation(k, 1.0)
    with pytest.raises(DomainError):
        k.sine_transform(0.0)
    with pytest.raises(ValueError):
        symmetric_correlation(k, 0.5, method="bogus")


def test_nonconvergent_extrapolation_raises_with_residual():
    quad = QuadratureSpec(regulator=40.0, n_extrapolation=2, tolerance=1e-9)
    with pytest.raises(AccuracyError) as info:
        symmetric_correlation(spectral_kernel(thermal(1.0, 0.3)), 0.3, quad)
    assert info.value.residual > 0
