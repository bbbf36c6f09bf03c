import math

import pytest
from hypothesis import given, settings, strategies as st

from humsim.dielectric import (
    LayerStack,
    Permittivities,
    effective_permittivity,
    layer_capacitance,
    morphology_exponent,
    reconstruct_wet_capacitance,
    stack_capacitance,
)
from humsim.exceptions import DomainError

EPS = Permittivities()


def test_effective_permittivity_examples():
    # exp(0.7 ln 9), exp(0.7 ln 9 + 0.3 ln 80)
    assert effective_permittivity(0.3, 0.0, EPS) == pytest.approx(4.656, abs=1e-3)
    assert effective_permittivity(0.3, 1.0, EPS) == pytest.approx(17.34, abs=1e-2)
    assert effective_permittivity(1e-12, 0.7, EPS) == pytest.approx(9.0, rel=1e-9)


def test_effective_permittivity_rejects_bad_fill():
    with pytest.raises(DomainError):
        effective_permittivity(0.3, 1.1, EPS)
    with pytest.raises(DomainError):
        effective_permittivity(0.3, -0.1, EPS)
    with pytest.raises(DomainError):
        effective_permittivity(0.3, 0.5, EPS, mixing="bruggeman")


@pytest.mark.parametrize("mixing", ["lichtenecker", "parallel", "series"])
@settings(max_examples=50, deadline=None)
@given(P=st.floats(0.01, 0.95), w1=st.floats(0, 1), w2=st.floats(0, 1))
def test_mixing_bounds_and_monotonicity(mixing, P, w1, w2):
    lo, hi = sorted((w1, w2))
    e_lo = effective_permittivity(P, lo, EPS, mixing)
    e_hi = effective_permittivity(P, hi, EPS, mixing)
    assert e_lo <= e_hi + 1e-12
    if hi - lo > 1e-9:
        assert e_lo < e_hi
    for e in (e_lo, e_hi):
        assert EPS.eps_air - 1e-12 <= e <= EPS.eps_water + 1e-12


def test_rule_ordering():
    # series <= lichtenecker <= parallel (Wiener bounds)
    for w in (0.0, 0.3, 1.0):
        s = effective_permittivity(0.4, w, EPS, "series")
        l = effective_permittivity(0.4, w, EPS, "lichtenecker")
        p = effective_permittivity(0.4, w, EPS, "parallel")
        assert s <= l <= p


def test_layer_capacitance_examples():
    assert layer_capacitance(9.0, 1e-6, 440e-9) == pytest.approx(181.1e-12, rel=1e-3)
    assert layer_capacitance(3.9, 1e-6, 70e-9) == pytest.approx(493.3e-12, rel=1e-3)
    assert layer_capacitance(9.0, 1e-6, 880e-9) == pytest.approx(
        layer_capacitance(9.0, 1e-6, 440e-9) / 2)
    with pytest.raises(DomainError):
        layer_capacitance(9.0, 0.0, 1e-7)


def test_stack_capacitance_examples():
    stack = LayerStack()
    c = stack_capacitance(stack, 9.0, 3.9)
    assert c == pytest.approx(132.5e-12, rel=1e-3)
    c_ox = layer_capacitance(3.9, stack.area, stack.oxide_thickness)
    c_s = layer_capacitance(9.0, stack.area, stack.alumina_thickness)
    assert c < min(c_ox, c_s)
    twin = LayerStack(oxide_thickness=100e-9, alumina_thickness=100e-9)
    assert stack_capacitance(twin, 5.0, 5.0) == pytest.approx(
        layer_capacitance(5.0, twin.area, 100e-9) / 2)
    thin = LayerStack(oxide_thickness=1e-15)
    assert stack_capacitance(thin, 9.0, 3.9) == pytest.approx(c_s, rel=1e-6)


def test_stack_symmetric_in_layers():
    a = LayerStack(oxide_thickness=70e-9, alumina_thickness=300e-9)
    b = LayerStack(oxide_thickness=300e-9, alumina_thickness=70e-9)
    assert stack_capacitance(a, 7.0, 3.9) == pytest.approx(stack_capacitance(b, 3.9, 7.0))


def test_morphology_exponent_examples():
    assert morphology_exponent(1.0, 1.0, 80, 5) == 0.0
    assert morphology_exponent(16.0, 1.0, 80, 5) == pytest.approx(1.0)
    assert morphology_exponent(2.0, 1.0, 80, 5) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        morphology_exponent(2.0, 1.0, 5, 5)


@pytest.mark.parametrize("area", [1e-7, 1e-6, 3.3e-5])
def test_morphology_exponent_area_invariant(area):
    stack = LayerStack(area=area)
    e_dry = effective_permittivity(stack.porosity, 0.0, EPS)
    e_wet = effective_permittivity(stack.porosity, 1.0, EPS)
    n = morphology_exponent(stack_capacitance(stack, e_wet, 3.9),
                            stack_capacitance(stack, e_dry, 3.9), EPS.eps_water, e_dry)
    ref_stack = LayerStack()
    n_ref = morphology_exponent(stack_capacitance(ref_stack, e_wet, 3.9),
                                stack_capacitance(ref_stack, e_dry, 3.9), EPS.eps_water, e_dry)
    assert n == pytest.approx(n_ref, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(cw=st.floats(1e-12, 1e-9), cd=st.floats(1e-12, 1e-9), ew=st.floats(1.5, 90))
def test_morphology_round_trip(cw, cd, ew):
    ed = 4.0
    n = morphology_exponent(cw, cd, ew, ed)
    assert reconstruct_wet_capacitance(cd, ew, ed, n) == pytest.approx(cw, rel=1e-12)


def test_water_temperature_coefficient():
    eps = Permittivities(eps_water_slope=-0.36)
    assert eps.water_at(298.15) == 80.0
    assert eps.water_at(348.15) == pytest.approx(62.0)
    assert math.isclose(Permittivities().water_at(350.0), 80.0)
