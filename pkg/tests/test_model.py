import math

import pytest

from ptcoupled.model import (
    DEFAULT_GAUGE,
    CriticalCouplingError,
    Model,
    ModelError,
    ModelParams,
    build_hamiltonian,
    hermitian_counterpart,
    is_critical,
)


def test_model1_coefficients():
    spec = build_hamiltonian(ModelParams.model1(0.5))
    assert spec.x1x2 == 1.0
    assert (spec.x1_imag, spec.x2_imag) == (0, 2)
    table = spec.table()
    assert table["x1"] == 0 and table["x2"] == 2j
    assert table["p1^2"] == table["p2^2"] == table["x1^2"] == table["x2^2"] == 1


def test_model2_hermitian_limit():
    spec = build_hamiltonian(ModelParams.model2(0.0, 0.0, 0.0))
    assert spec.is_hermitian
    assert spec.x1x2 == 0 and spec.constant == 0


def test_model2_coefficients():
    spec = build_hamiltonian(ModelParams.model2(0.3, 1.0, 2.0))
    assert spec.table()["x1"] == 2j
    assert spec.table()["x2"] == 4j
    assert spec.x1x2 == pytest.approx(0.6, abs=1e-15)


def test_pt_image_is_the_hamiltonian():
    # PT maps the coefficient table to itself
    for params in (ModelParams.model1(0.4), ModelParams.model2(-0.7, 1.5, -0.2)):
        spec = build_hamiltonian(params)
        assert spec.pt_image() == spec.table()


@pytest.mark.parametrize("eps, const", [(0.0, 1.0), (0.6, 1.5625)])
def test_counterpart_constant(eps, const):
    spec = hermitian_counterpart(ModelParams.model1(eps))
    assert spec.constant == pytest.approx(const, rel=1e-15)
    assert spec.is_hermitian
    assert spec.x1x2 == pytest.approx(2 * eps)


@pytest.mark.parametrize("eps", [1.0, -1.0])
def test_counterpart_critical(eps):
    with pytest.raises(CriticalCouplingError):
        hermitian_counterpart(ModelParams.model1(eps))


def test_counterpart_model2_rejected():
    with pytest.raises(ModelError):
        hermitian_counterpart(ModelParams.model2(0.2, 1, 1))


def test_model1_pins_shifts():
    with pytest.raises(ModelError):
        ModelParams(Model.MODEL1, 0.3, tau1=1.0, tau2=1.0)
    p = ModelParams.model1(0.3)
    assert (p.tau1, p.tau2) == (0, 1)


@pytest.mark.parametrize("kwargs", [
    {"a": 0.0},
    {"b": 0.0},
    {"zeta": 2},
    {"a": math.inf},
    {"b": math.nan},
])
def test_invalid_params(kwargs):
    with pytest.raises(ModelError):
        ModelParams.model2(0.3, 1.0, 1.0, **kwargs)


def test_non_finite_epsilon():
    with pytest.raises(ModelError):
        ModelParams.model1(math.nan)


def test_replace_and_dict():
    p = ModelParams.model2(0.3, 1.0, 2.0)
    q = p.replace(epsilon=0.5, zeta=-1)
    assert q.epsilon == 0.5 and q.zeta == -1 and q.tau2 == 2.0
    d = q.as_dict()
    assert d["model"] == 2 and d["a"] == DEFAULT_GAUGE


def test_is_critical():
    assert is_critical(1.0) and is_critical(-1.0)
    assert not is_critical(0.999)
    assert is_critical(1.0 + 1e-14, tol=1e-12)
