import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

import casimir_unruh.energy_engine as ee
from casimir_unruh.core import (
    AccuracyError,
    ConfigError,
    ConsistencyError,
    DomainError,
    PhysicalConfig,
    Scenario,
    UnsupportedScenarioError,
)
from casimir_unruh.energy_engine import (
    QuadratureSpec,
    energy_vf,
    energy_vf_inertial_reference,
    energy_vf_oracle,
    pv_integrate,
    stationary_reduction,
)

PI = math.pi


def static(z, lam=0.1, gap=1.0):
    return PhysicalConfig(lam, gap, z)


def thermal(z, t, lam=0.1, gap=1.0):
    return PhysicalConfig(lam, gap, z, 0.0, t, Scenario.THERMAL)


def accel(z, a, lam=0.1, gap=1.0):
    return PhysicalConfig(lam, gap, z, a, 0.0, Scenario.ACCELERATED)


# QuadratureSpec ------------------------------------------------------------


@pytest.mark.parametrize(
    "kw",
    [dict(tolerance=0.0), dict(tolerance=0.05), dict(omega_max_factor=20.0), dict(regulator=-1.0), dict(n_extrapolation=1), dict(pv_halfwidth=1.5), dict(u_max=0.0)],
)
def test_quadrature_spec_rejects(kw):
    with pytest.raises(ConfigError):
        QuadratureSpec(**kw)


def test_quadrature_spec_defaults():
    q = QuadratureSpec()
    assert q.omega_max_factor == 200 and q.tolerance == 1e-6 and math.isinf(q.u_max)


# pv_integrate --------------------------------------------------------------


def test_pv_examples():
    v, _ = pv_integrate(lambda w: 1.0, 1.0, 0.0, 2.0)
    assert abs(v) < 1e-12
    v, _ = pv_integrate(lambda w: w, 1.0, 0.0, 2.0)
    assert math.isclose(v, 2.0, rel_tol=1e-12)


@pytest.mark.parametrize("f", [np.exp, np.cos, lambda w: 1 / (1 + w**2), lambda w: w**3 - 2 * w])
@pytest.mark.parametrize("pole, a, b", [(0.7, 0.0, 2.0), (3.0, 1.0, 4.0)])
def test_pv_matches_cauchy_weight(f, pole, a, b):
    ref = integrate.quad(f, a, b, weight="cauchy", wvar=pole, epsabs=1e-14)[0]
    v, err = pv_integrate(f, pole, a, b)
    assert abs(v - ref) <= 1e-10 * max(1.0, abs(ref))
    assert err >= 0


def test_pv_halving_stable():
    q = QuadratureSpec(pv_halfwidth=0.5)
    v1, _ = pv_integrate(np.exp, 1.0, 0.0, 2.0, q)
    v2, _ = pv_integrate(np.exp, 1.0, 0.0, 2.0, q.replace(pv_halfwidth=0.25))
    assert abs(v1 - v2) < q.tolerance * abs(v1)


@pytest.mark.parametrize("pole", [0.0, 2.0, 3.0])
def test_pv_pole_at_edge(pole):
    with pytest.raises(DomainError):
        pv_integrate(np.exp, pole, 0.0, 2.0)


# stationary reduction --------------------------------------------------------


def test_reduction_sign_chain():
    c = accel(2.0, 0.3, lam=0.7)
    red = stationary_reduction(c)
    pref = red.combined_prefactor()
    assert pref.imag == 0.0
    assert math.isclose(pref.real, -(0.7**4) / (32 * PI * red.kernel.norm), rel_tol=1e-15)
    u1, u3 = 0.4, 1.3
    direct = red.chain_prefactor * red.field_susceptibility.amplitude * red.field_correlation(u1 + red.delay + u3)
    direct *= (-1j * math.sin(u1)) * (-1j * math.sin(u3))
    assert red.collapsed_integrand(u1, u3) == pytest.approx(direct, rel=1e-15)


@pytest.mark.parametrize("cfg", [static(1.0), thermal(2.0, 0.1), accel(2.0, 0.3)])
@pytest.mark.parametrize("s", [1e-3, 0.5, 4.0])
def test_response_sum_identity(cfg, s):
    # s is recovered as rho - (s + rho), so its absolute rounding is amplified by 1/s^2
    red = stationary_reduction(cfg)
    assert math.isclose(red.response_sum(s), float(red.kernel.sine_transform(s + 2 * red.delay)), rel_tol=1e-12 + 1e-15 / s**2)


def test_reduction_rejects_combined_scenario():
    with pytest.raises(UnsupportedScenarioError):
        stationary_reduction(PhysicalConfig(0.1, 1.0, 1.0, 0.1, 0.1, Scenario.THERMAL))
    with pytest.raises(UnsupportedScenarioError):
        energy_vf(PhysicalConfig(0.1, 1.0, 1.0, 0.1, 0.1, Scenario.ACCELERATED))


# closed-form anchors -------------------------------------------------------


def test_far_zone_anchor():
    e = energy_vf(static(100.0)).value
    assert abs(e / (-(0.1**4) / (512 * PI**3 * 100.0**3)) - 1) <= 0.02


def test_near_zone_anchor():
    e = energy_vf(static(0.01)).value
    assert abs(e / (-(0.1**4) / (1024 * PI**2 * 0.01**2)) - 1) <= 0.02


def test_near_zone_limit_is_quarter_pi():
    # J(rho -> 0) = int_0^inf gap^2 / (gap^2 + x^2)^2 dx = pi / (4 gap)
    r = energy_vf(static(1e-7))
    assert math.isclose(r.diagnostics["J"], PI / 4, rel_tol=1e-6)


def test_result_metadata():
    r = energy_vf(static(100.0))
    assert r.method == "frequency-domain"
    assert r.regime == "FarZone"
    assert "gap" in r.convention
    assert r.error >= 0 and r.value < 0


# routes agree ----------------------------------------------------------------


@pytest.mark.parametrize(
    "cfg",
    [static(0.1), static(1.0), static(5.0), thermal(1.0, 0.05), thermal(3.0, 0.1), accel(1.0, 0.3), accel(4.0, 0.05), thermal(0.5, 1e-3)],
)
def test_real_axis_route_matches_matsubara(cfg):
    m = energy_vf(cfg)
    r = energy_vf(cfg, method="real")
    assert math.isclose(r.value, m.value, rel_tol=1e-6)
    d = r.diagnostics
    assert math.isclose(d["boundary_term"] + d["principal_value"] + d["resonance_term"], d["J"], rel_tol=1e-12)


def test_real_axis_route_refuses_large_phase():
    with pytest.raises(DomainError):
        energy_vf(static(100.0), method="real")
    with pytest.raises(ValueError):
        energy_vf(static(1.0), method="bogus")


@pytest.mark.parametrize("cfg", [static(1.0), accel(1000.0, 1e-3), thermal(10.0, 0.01), static(100.0)])
def test_oracle_agrees(cfg):
    e, o = energy_vf(cfg), energy_vf_oracle(cfg)
    assert abs(e.value - o.value) / abs(e.value) < 1e-3
    assert abs(e.value - o.value) <= e.error + o.error
    assert o.method == "time-domain-oracle"
    assert o.diagnostics["extrapolation_residual"] >= 0


def test_oracle_far_zone_anchor():
    o = energy_vf_oracle(static(100.0))
    assert abs(o.value / (-(0.1**4) / (512 * PI**3 * 100.0**3)) - 1) <= 0.05


def test_oracle_with_finite_u_max():
    q = QuadratureSpec(u_max=2e4)
    e, o = energy_vf(static(1.0)), energy_vf_oracle(static(1.0), q)
    assert abs(o.value / e.value - 1) < 1e-6


def test_euler_maclaurin_branch_matches_direct_sum(monkeypatch):
    q = QuadratureSpec()
    for gap, rho, t in [(1.0, 0.01, 1e-2), (1.0, 1.0, 1e-3), (2.0, 0.1, 3e-3)]:
        direct = ee._j_matsubara(gap, rho, t, q)
        monkeypatch.setattr(ee, "_MAX_DIRECT_TERMS", 10)
        em = ee._j_matsubara(gap, rho, t, q)
        monkeypatch.setattr(ee, "_MAX_DIRECT_TERMS", 2_000_000)
        assert em[2]["route"] == "euler-maclaurin" and direct[2]["route"] == "sum"
        assert math.isclose(em[0], direct[0], rel_tol=1e-11)


@pytest.mark.parametrize("rho, t", [(1.0, 1e-3), (0.01, 2e-3), (30.0, 1e-4)])
def test_low_temperature_shift_matches_euler_maclaurin_leading_term(rho, t):
    # h sum' F(nh) - int F = -(h^2/12) F'(0) + O(h^4), F'(0) = -2 rho / gap^2
    q = QuadratureSpec()
    h = 2 * PI * t
    dj = ee._j_matsubara(1.0, rho, t, q)[0] - ee._j_matsubara(1.0, rho, 0.0, q)[0]
    assert math.isclose(dj, h * h * rho / 6, rel_tol=5e-3)


def test_inertial_reference_equals_static_energy_for_a_equal_zero():
    assert energy_vf_inertial_reference(static(2.0)).value == energy_vf(static(2.0)).value


def test_consistency_error_on_wrong_sign(monkeypatch):
    monkeypatch.setattr(ee, "_j_matsubara", lambda *a: (-1.0, 0.0, {"route": "patched"}))
    with pytest.raises(ConsistencyError):
        energy_vf(static(1.0))


def test_imaginary_residual_is_consistency_error(monkeypatch):
    monkeypatch.setattr(ee.StationaryReduction, "combined_prefactor", lambda self: complex(-1.0, 0.5))
    with pytest.raises(ConsistencyError):
        energy_vf(static(1.0))


def test_accuracy_error_when_frequency_error_exceeds_tolerance(monkeypatch):
    monkeypatch.setattr(ee, "_j_matsubara", lambda *a: (1.0, 0.5, {"route": "patched"}))
    with pytest.raises(AccuracyError) as info:
        energy_vf(static(1.0))
    assert info.value.residual == 0.5


# properties ------------------------------------------------------------------

configs = st.one_of(
    st.builds(static, st.floats(1e-3, 1e4)),
    st.builds(thermal, st.floats(1e-2, 1e4), st.floats(1e-4, 0.05)),
    st.builds(accel, st.floats(1e-2, 1e4), st.floats(1e-4, 0.05)),
)


@settings(max_examples=40, deadline=None)
@given(configs, st.sampled_from([2.0, 0.5, 4.0, 0.25]))
def test_quartic_coupling_is_exact(cfg, s):
    e1 = energy_vf(cfg).value
    e2 = energy_vf(cfg.replace(coupling=cfg.coupling * s)).value
    assert e2 / e1 == s**4


@settings(max_examples=30, deadline=None)
@given(configs, st.sampled_from([0.5, 2.0, 10.0]))
def test_dimensional_homogeneity(cfg, s):
    e0 = energy_vf(cfg).value
    cs = cfg.replace(gap=s * cfg.gap, separation=cfg.separation / s, acceleration=s * cfg.acceleration, temperature=s * cfg.temperature)
    assert abs(energy_vf(cs).value / (s * e0) - 1) <= QuadratureSpec().tolerance


@settings(max_examples=40, deadline=None)
@given(configs)
def test_negative(cfg):
    assert energy_vf(cfg).value < 0


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["static", "thermal", "accel"]), st.floats(1e-4, 0.05))
def test_monotone_decay_in_z(kind, x):
    make = {"static": lambda z: static(z), "thermal": lambda z: thermal(z, x), "accel": lambda z: accel(z, x)}[kind]
    vals = [abs(energy_vf(make(z)).value) for z in np.geomspace(1e-3, 1e5, 30)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_thermal_accelerated_short_distance_agreement_is_quadratic():
    # |E_acc - E_th(T_U)| / |E_th| <= C (az)^2 with C stable under halving
    z = 10.0
    cs = []
    for a in (1e-3, 5e-4, 2.5e-4):
        ea = energy_vf(accel(z, a)).value
        et = energy_vf(thermal(z, a / (2 * PI))).value
        cs.append(abs(ea / et - 1) / (a * z) ** 2)
    assert max(cs) / min(cs) < 1.01
