import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptcoupled.model import CriticalCouplingError, ModelParams, RegimeError
from ptcoupled.spectrum import (
    Regime,
    classify_regime,
    energy,
    level_indices,
    max_abs_imag,
    require_regime,
    spectrum_table,
)


def test_decoupled_ground():
    assert energy(ModelParams.model1(0.0), 0, 0).value == pytest.approx(3.0, abs=1e-15)


def test_ground_eps06():
    expected = math.sqrt(1.6) + math.sqrt(0.4) + 1 / 0.64
    value = energy(ModelParams.model1(0.6), 0, 0).value
    assert value == pytest.approx(expected, abs=1e-15)
    assert value.real == pytest.approx(3.4598665, abs=1e-7)


def test_ground_broken():
    value = energy(ModelParams.model1(1.5), 0, 0).value
    assert value.real == pytest.approx(0.7811388, abs=1e-7)
    assert value.imag == pytest.approx(0.7071068, abs=1e-7)


def test_ground_model2():
    value = energy(ModelParams.model2(0.5, 1.0, 1.0), 0, 0).value
    assert value.real == pytest.approx(3.2651850, abs=1e-7)
    assert value.imag == 0


def test_table_decoupled():
    values = [lv.value.real for lv in spectrum_table(ModelParams.model1(0.0), 1)]
    assert values == pytest.approx([3.0, 5.0, 5.0])


def test_table_eps06():
    values = [lv.value.real for lv in spectrum_table(ModelParams.model1(0.6), 1)]
    e0 = math.sqrt(1.6) + math.sqrt(0.4) + 1.5625
    assert values == pytest.approx([e0, e0 + 2 * math.sqrt(0.4), e0 + 2 * math.sqrt(1.6)], abs=1e-14)
    # rounded reference values
    assert values == pytest.approx([3.4598665, 4.7247800, 5.9896935], abs=1e-5)


def test_table_ground_only():
    table = spectrum_table(ModelParams.model1(0.3), 0)
    assert [(lv.n1, lv.n2) for lv in table] == [(0, 0)]


def test_table_sorted_and_complete():
    table = spectrum_table(ModelParams.model2(0.4, 1, 2), 4)
    assert len(table) == 15
    keys = [lv.sort_key for lv in table]
    assert keys == sorted(keys)
    assert {(lv.n1, lv.n2) for lv in table} == set(level_indices(4))


def test_negative_max_total():
    with pytest.raises(ValueError):
        spectrum_table(ModelParams.model1(0.3), -1)


def test_negative_quantum_number():
    with pytest.raises(ValueError):
        energy(ModelParams.model1(0.3), -1, 0)


@pytest.mark.parametrize("eps, regime", [
    (0.99, Regime.UNBROKEN),
    (1.0, Regime.CRITICAL),
    (-1.0, Regime.CRITICAL),
    (-1.2, Regime.BROKEN),
    (0.0, Regime.UNBROKEN),
    (1.0 + 1e-13, Regime.CRITICAL),
    (1.0 + 1e-9, Regime.BROKEN),
])
def test_classify(eps, regime):
    assert classify_regime(eps) is regime


def test_classify_non_finite():
    with pytest.raises(ValueError):
        classify_regime(math.nan)


def test_energy_critical():
    with pytest.raises(CriticalCouplingError):
        energy(ModelParams.model1(1.0), 0, 0)


def test_require_regime():
    with pytest.raises(RegimeError):
        require_regime(ModelParams.model1(1.5), Regime.UNBROKEN)
    assert require_regime(ModelParams.model1(0.5), Regime.UNBROKEN) is Regime.UNBROKEN


@given(eps=st.floats(-0.999, 0.999), t1=st.floats(-3, 3), t2=st.floats(-3, 3),
       zeta=st.sampled_from([1, -1]))
@settings(max_examples=80)
def test_unbroken_spectrum_real(eps, t1, t2, zeta):
    assert max_abs_imag(ModelParams.model2(eps, t1, t2, zeta=zeta), 4) == 0.0


@given(eps=st.floats(1.001, 5.0), sign=st.sampled_from([1, -1]), zeta=st.sampled_from([1, -1]))
def test_broken_spectrum_complex(eps, sign, zeta):
    assert max_abs_imag(ModelParams.model1(sign * eps, zeta=zeta), 4) > 0


@given(eps=st.floats(-0.99, 0.99), n1=st.integers(0, 6), n2=st.integers(0, 6))
def test_level_spacing(eps, n1, n2):
    p = ModelParams.model1(eps)
    base = energy(p, n1, n2).value
    assert energy(p, n1 + 1, n2).value - base == pytest.approx(2 * math.sqrt(1 + eps), abs=1e-12)
    assert energy(p, n1, n2 + 1).value - base == pytest.approx(2 * math.sqrt(1 - eps), abs=1e-12)


@given(eps=st.floats(-3, 3).filter(lambda e: abs(abs(e) - 1) > 1e-6),
       a=st.floats(0.1, 5.0), b=st.floats(-5.0, -0.1))
def test_gauge_invariance_exact(eps, a, b):
    ref = [lv.value for lv in spectrum_table(ModelParams.model2(eps, 0.5, 1.5), 4)]
    got = [lv.value for lv in spectrum_table(ModelParams.model2(eps, 0.5, 1.5, a=a, b=b), 4)]
    assert got == ref


@given(eps=st.floats(-3, 3).filter(lambda e: abs(abs(e) - 1) > 1e-6))
def test_zeta_flip_multiset(eps):
    plus = Counter(lv.value for lv in spectrum_table(ModelParams.model2(eps, 1, 2, zeta=1), 4))
    minus = Counter(lv.value for lv in spectrum_table(ModelParams.model2(eps, 1, 2, zeta=-1), 4))
    assert plus == minus
