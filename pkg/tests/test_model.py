import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dampwave import (
    Band,
    CutoffBands,
    DerivativeIndex,
    InvalidParams,
    ModelParams,
    Regime,
    classify_regime,
    cutoff_eval,
    decay_exponents,
    expected_rate,
    is_admissible,
    rho_max,
)
from dampwave.model import critical_radius, time_derivative_gain


@pytest.mark.parametrize(
    "sigma,nu,regime",
    [
        (0.25, 1.0, Regime.SUB_HALF),
        (0.5, 1.0, Regime.HALF_UNDERDAMPED),
        (0.5, 2.0, Regime.HALF_CRITICAL),
        (0.5, 3.0, Regime.HALF_OVERDAMPED),
        (0.75, 1.0, Regime.SUPER_HALF),
        (1.0, 1.0, Regime.SUPER_HALF),
        (0.3, 1.0, Regime.SUB_HALF),
        (0.75, 5.0, Regime.SUPER_HALF),
    ],
)
def test_classify(sigma, nu, regime):
    assert classify_regime(ModelParams(2, sigma, nu)) is regime


@pytest.mark.parametrize("n,sigma,nu", [(0, 0.5, 1), (2, 0.0, 1), (2, 1.2, 1), (2, 0.5, 0), (2, 0.5, -1), (2.5, 0.5, 1), (2, math.nan, 1)])
def test_bad_params(n, sigma, nu):
    with pytest.raises(InvalidParams):
        ModelParams(n, sigma, nu)


def test_bad_index():
    with pytest.raises(InvalidParams):
        DerivativeIndex(-1.0, 0)
    with pytest.raises(InvalidParams):
        DerivativeIndex(0.0, 2)


def test_exponent_values():
    ex = decay_exponents(ModelParams(2, 0.25, 1.0))
    assert ex.gamma == pytest.approx(2 / 3 - 1 / 3)
    assert ex.gamma_tilde == pytest.approx(2 / 3)
    ex = decay_exponents(ModelParams(3, 0.75, 1.0), 1.0)
    assert ex.gamma == pytest.approx(1.0 - 2 / 3 + 2 / 3)
    assert ex.gamma_tilde == pytest.approx(1.0 + 2 / 3)
    ex = decay_exponents(ModelParams(3, 0.5, 3.0), 2.0)
    assert (ex.gamma, ex.gamma_tilde) == (2.5, 3.5)


@given(n=st.integers(1, 6), k=st.floats(0, 4), nu=st.floats(0.1, 5))
def test_exponents_continuous_at_half(n, k, nu):
    mid = decay_exponents(ModelParams(n, 0.5, nu), k)
    for s in (0.5 - 1e-9, 0.5 + 1e-9):
        ex = decay_exponents(ModelParams(n, s, nu), k)
        assert ex.gamma == pytest.approx(mid.gamma, abs=1e-6)
        assert ex.gamma_tilde == pytest.approx(mid.gamma_tilde, abs=1e-6)


@given(n=st.integers(1, 6), k=st.floats(0, 4), s=st.floats(0.01, 1.0))
def test_u0_decays_faster(n, k, s):
    ex = decay_exponents(ModelParams(n, s, 1.0), k)
    assert ex.gamma_tilde > ex.gamma


def test_expected_rate_time_derivative():
    p = ModelParams(3, 0.75, 1.0)
    base = expected_rate(p, DerivativeIndex(0, 0))
    assert expected_rate(p, DerivativeIndex(0, 1)) == pytest.approx(base + 2 / 3)
    assert time_derivative_gain(ModelParams(2, 0.3, 1)) == 1.0
    with pytest.raises(ValueError):
        expected_rate(p, DerivativeIndex(), "u2")


def test_admissible():
    assert not is_admissible(ModelParams(1, 0.25, 1))
    assert is_admissible(ModelParams(2, 0.25, 1))
    assert is_admissible(ModelParams(1, 0.5, 1))
    assert not is_admissible(ModelParams(2, 0.75, 1))
    assert is_admissible(ModelParams(2, 0.75, 1), k=1.5)
    assert is_admissible(ModelParams(3, 1.0, 1))


def test_rho_examples():
    assert rho_max(ModelParams(2, 0.25, 2.0)) == pytest.approx(0.5)
    assert rho_max(ModelParams(2, 0.5, 7.0)) == 0.5
    assert rho_max(ModelParams(3, 1.0, 2.0)) == pytest.approx(0.5)
    assert decay_exponents(ModelParams(3, 1.0, 1.0)).gamma == pytest.approx(0.25)
    assert decay_exponents(ModelParams(2, 0.25, 1.0), 1.0).gamma == pytest.approx(1.0)
    assert decay_exponents(ModelParams(2, 0.5, 2.0)).gamma == 0.0
    b = CutoffBands.for_params(ModelParams(2, 0.5, 1.0))
    assert cutoff_eval(b, 0.0) == (1.0, 0.0, 0.0)
    assert cutoff_eval(b, 10.0) == (0.0, 0.0, 1.0)


@given(s=st.floats(0.01, 1.0), nu=st.floats(0.05, 10.0))
def test_rho_below_collision(s, nu):
    p = ModelParams(2, s, nu)
    if s != 0.5:
        assert rho_max(p) < critical_radius(p)


def test_rho_and_critical_radius():
    assert rho_max(ModelParams(2, 0.5, 1)) == 0.5
    p = ModelParams(2, 0.25, 5.0)
    assert rho_max(p) == pytest.approx(0.5 * 2.5**2)
    q = ModelParams(3, 0.75, 1.0)
    rc = critical_radius(q)
    # roots collide where ν r^{2σ} = 2r
    assert q.nu * rc ** (2 * q.sigma) == pytest.approx(2 * rc)
    assert rho_max(q) < rc
    assert critical_radius(ModelParams(2, 0.5, 1)) == math.inf


@given(rho=st.floats(0.01, 2.0), r=st.floats(0, 10))
def test_partition_of_unity(rho, r):
    lo, mid, hi = cutoff_eval(CutoffBands(rho), r)
    assert lo + mid + hi == pytest.approx(1.0)
    assert min(lo, mid, hi) >= -1e-15
    if r <= rho / 2:
        assert lo == 1.0
    if r >= rho:
        assert lo == 0.0
    if r <= 2:
        assert hi == 0.0
    if r >= 4:
        assert hi == 1.0


def test_bands_validation_and_weights():
    with pytest.raises(InvalidParams):
        CutoffBands(3.0)
    b = CutoffBands(1.0)
    r = np.linspace(0, 6, 61)
    total = sum(b.weight(x, r) for x in (Band.LOW, Band.MID, Band.HIGH))
    assert np.allclose(total, 1.0)
    assert np.all(b.weight(Band.FULL, r) == 1.0)
    assert np.all(np.diff(b.low(r)) <= 1e-15)
    with pytest.raises(ValueError):
        cutoff_eval(b, -1.0)
    assert CutoffBands.for_params(ModelParams(2, 0.5, 1)).rho == 0.25
