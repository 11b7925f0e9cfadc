import math

import pytest
from hypothesis import given, strategies as st

from casimir_unruh.core import (
    ConfigError,
    DimensionlessGroups,
    PhysicalConfig,
    Regime,
    Scenario,
    Thresholds,
    UnsupportedScenarioError,
    classify_regime,
    errors_only,
    require_valid,
    validate_config,
)

pos = st.floats(1e-4, 1e4)


def test_valid_static_config_has_no_violations():
    assert validate_config(PhysicalConfig(0.1, 1.0, 1.0)) == []


def test_accelerated_with_temperature_is_rejected():
    v = validate_config(PhysicalConfig(0.1, 1.0, 1.0, 0.01, 0.01, Scenario.ACCELERATED))
    fields = {x.field for x in errors_only(v)}
    assert "temperature" in fields and "scenario" in fields
    assert any("Accelerated requires temperature = 0" in x.message for x in v)
    with pytest.raises(UnsupportedScenarioError):
        require_valid(PhysicalConfig(0.1, 1.0, 1.0, 0.01, 0.01, Scenario.ACCELERATED))


def test_validity_window_is_a_warning():
    v = validate_config(PhysicalConfig(0.1, 1.0, 1.0, 2.0, 0.0, Scenario.ACCELERATED))
    assert [x.severity for x in v] == ["warning"]
    assert v[0].field == "acceleration"
    require_valid(PhysicalConfig(0.1, 1.0, 1.0, 2.0, 0.0, Scenario.ACCELERATED))


@pytest.mark.parametrize(
    "kwargs, field",
    [
        (dict(coupling=0.0), "coupling"),
        (dict(gap=-1.0), "gap"),
        (dict(separation=math.inf), "separation"),
        (dict(acceleration=-1.0, scenario=Scenario.ACCELERATED), "acceleration"),
        (dict(temperature=math.nan, scenario=Scenario.THERMAL), "temperature"),
        (dict(acceleration=0.1), "acceleration"),
        (dict(temperature=0.1), "temperature"),
        (dict(acceleration=0.1, scenario=Scenario.THERMAL), "acceleration"),
        (dict(scenario=Scenario.ACCELERATED), "acceleration"),
    ],
)
def test_each_violation_names_its_field(kwargs, field):
    base = dict(coupling=0.1, gap=1.0, separation=1.0)
    base.update(kwargs)
    bad = errors_only(validate_config(PhysicalConfig(**base)))
    assert field in {v.field for v in bad}
    with pytest.raises(ConfigError):
        require_valid(PhysicalConfig(**base))


def test_scenario_accepts_strings():
    assert PhysicalConfig(0.1, 1.0, 1.0, scenario="thermal").scenario is Scenario.THERMAL


def groups(oz, az, tz, gap=1.0):
    return DimensionlessGroups(omega_z=oz, a_z=az, t_over_omega=0.0, a_over_omega=0.0, t_z=tz)


@pytest.mark.parametrize(
    "g, label",
    [
        (groups(0.01, 0, 0), Regime.NEAR_ZONE),
        (groups(100, 100, 0), Regime.ACCELERATED_NON_THERMAL),
        (groups(1, 1, 0), Regime.CROSSOVER),
        (groups(100, 0, 0), Regime.FAR_ZONE),
        (groups(100, 0, 50), Regime.THERMAL_CLASSICAL),
        (groups(0.01, 0.5, 0), Regime.CROSSOVER),
    ],
)
def test_classify_examples(g, label):
    assert classify_regime(g) is label


def test_invalid_thresholds():
    with pytest.raises(ConfigError):
        Thresholds(lo=10, hi=1)
    with pytest.raises(ConfigError):
        classify_regime(groups(1, 0, 0), thresholds=(0.1, 10))


@given(pos, st.floats(0, 1e3), st.floats(0, 1e3), st.floats(1e-3, 1e3), st.floats(1e-2, 1e2))
def test_scaling_closure(gap, a, t, z, s):
    c = PhysicalConfig(0.1, gap, z, a, t)
    cs = PhysicalConfig(0.1, gap * s, z / s, a * s, t * s)
    g, gs = c.groups(), cs.groups()
    for name in ("omega_z", "a_z", "t_z", "t_over_omega", "a_over_omega"):
        assert math.isclose(getattr(g, name), getattr(gs, name), rel_tol=1e-12, abs_tol=1e-300)
    # away from the threshold boundaries the label is unchanged
    lab, labs = classify_regime(g), classify_regime(gs)
    edges = (0.1, 10.0)
    near_edge = any(abs(math.log(max(getattr(g, n), 1e-300)) - math.log(e)) < 1e-9 for n in ("omega_z", "a_z", "t_z") for e in edges)
    assert near_edge or lab is labs


@given(pos, st.floats(0, 1e3), st.floats(0, 1e3))
def test_groups_nonnegative_and_az_zero_iff_a_zero(z, a, t):
    g = PhysicalConfig(0.1, 1.0, z, a, t).groups()
    assert min(g.omega_z, g.a_z, g.t_z, g.t_over_omega, g.a_over_omega) >= 0
    assert (g.a_z == 0) == (a == 0)
