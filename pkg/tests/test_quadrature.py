import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from dampwave import (
    CutoffBands,
    DerivativeIndex,
    Family,
    ModelParams,
    NonIntegrableSingularity,
    NormQuery,
    QuadratureConfig,
    SymbolSpec,
    TolNotMet,
    lp_band_norm,
    parse_datum,
    sobolev_seminorm,
    tail_cutoff_radius,
)
from dampwave.quadrature import _gl_batch, integrate_query, integrate_radial, sphere_area
from dampwave.symbols import constant_multiplier

GAUSS = parse_datum("gaussian:1")


def test_sphere_area():
    assert sphere_area(1) == pytest.approx(2)
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)


@pytest.mark.parametrize("deg", [0, 5, 17, 29])
def test_panel_rule_exact_to_degree_29(deg):
    a, b = np.array([0.2]), np.array([1.7])
    val, _ = _gl_batch(lambda x: x**deg, a, b)
    exact = (1.7 ** (deg + 1) - 0.2 ** (deg + 1)) / (deg + 1)
    assert val[0] == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("n,k", [(1, 0), (2, 0), (2, 1), (3, 2)])
def test_constant_symbol_gaussian_norm(n, k):
    # ω_{n-1} ∫ r^{n-1+2k} e^{-r²} dr = ω_{n-1} Γ(n/2 + k) / 2
    q = NormQuery(constant_multiplier(), ModelParams(n, 0.5, 1.0), DerivativeIndex(k, 0), GAUSS)
    want = math.sqrt(sphere_area(n) * math.gamma(n / 2 + k) / 2)
    assert sobolev_seminorm(q) == pytest.approx(want, rel=1e-10)


def test_sqrt_pi_example():
    q = NormQuery(constant_multiplier(), ModelParams(2, 0.5, 1.0), DerivativeIndex(), GAUSS)
    assert sobolev_seminorm(q) == pytest.approx(math.sqrt(math.pi), rel=1e-10)


@pytest.mark.parametrize("n,s", [(2, 0.25), (3, 0.4), (2, 0.45)])
def test_singular_model_integral(n, s):
    # ∫_0^1 r^{n-1-4σ} dr = 1/(n - 4σ), integrable with a steep singularity
    e = n - 4 * s
    res = integrate_radial(lambda r: r ** (e - 1), 1.0, 0.0, e, QuadratureConfig())
    assert res.value == pytest.approx(1 / e, rel=1e-9)


def test_non_integrable_rejected():
    q = NormQuery(SymbolSpec(Family.K3), ModelParams(2, 0.75, 1.0), DerivativeIndex(), None, 1.0)
    with pytest.raises(NonIntegrableSingularity):
        sobolev_seminorm(q)
    with pytest.raises(NonIntegrableSingularity):
        integrate_radial(lambda r: 1 / r, 1.0, 0.0, 0.0, QuadratureConfig())


def test_subhalf_profile_singular_weight():
    # ProfileG ~ r^{-2σ} e^{-t r^{2-2σ}/ν}: closed form via the Gamma function
    p = ModelParams(2, 0.25, 2.0)
    t = 10.0
    q = NormQuery(SymbolSpec(Family.ProfileG), p, DerivativeIndex(), None, t)
    beta = 1.5
    # 2π ∫ r^{1-1} ν^{-2} e^{-2 t r^β/ν} dr = 2π ν^{-2} Γ(1/β) / (β (2t/ν)^{1/β})
    want = 2 * math.pi / p.nu**2 * math.gamma(1 / beta) / (beta * (2 * t / p.nu) ** (1 / beta))
    assert integrate_query(q).value == pytest.approx(want, rel=1e-9)


def test_oscillation_self_convergence():
    p = ModelParams(3, 0.75, 1.0)
    q = NormQuery(SymbolSpec(Family.K3), p, DerivativeIndex(), GAUSS, 1000.0)
    cfg = QuadratureConfig()
    a = sobolev_seminorm(q, cfg)
    b = sobolev_seminorm(q, QuadratureConfig(panels_per_period=16))
    assert abs(a - b) <= cfg.rel_tol * a


def test_oscillatory_closed_form():
    # ‖e^{-at} sin(tr)/r ĝ‖ at σ = 1/2, ν = 1, n = 3 against direct scipy integration
    from scipy import integrate

    p = ModelParams(3, 0.5, 1.0)
    t = 50.0
    q = NormQuery(SymbolSpec(Family.ProfileG), p, DerivativeIndex(), GAUSS, t)
    w = math.sqrt(1 - 0.25)

    def f(r):
        return 4 * math.pi * r * r * (math.exp(-0.5 * t * r) * math.sin(w * t * r) / (w * r)) ** 2 * math.exp(-r * r)

    want, _ = integrate.quad(f, 0, 10, limit=2000, epsabs=1e-15, epsrel=1e-12)
    assert integrate_query(q).value == pytest.approx(want, rel=1e-8)


def test_panel_budget():
    q = NormQuery(SymbolSpec(Family.K3), ModelParams(3, 0.75, 1.0), DerivativeIndex(), GAUSS, 1000.0)
    with pytest.raises(TolNotMet):
        sobolev_seminorm(q, QuadratureConfig(max_panels=100))


def test_tail_radius_gaussian():
    p = ModelParams(2, 0.5, 1.0)
    one = constant_multiplier()
    r12 = tail_cutoff_radius(one, p, 0.0, GAUSS, 1e-12)
    # exact tail of 2π ∫ r e^{-r²}: π e^{-R²} = eps · π
    assert math.sqrt(-math.log(1e-12)) <= r12 <= 6.0
    r6 = tail_cutoff_radius(one, p, 0.0, GAUSS, 1e-6)
    assert r6 < r12


@settings(max_examples=20, deadline=None)
@given(e1=st.floats(-14, -2), e2=st.floats(-14, -2))
def test_tail_radius_monotone(e1, e2):
    p = ModelParams(2, 0.5, 1.0)
    lo, hi = sorted((10**e1, 10**e2))
    one = constant_multiplier()
    assert tail_cutoff_radius(one, p, 0.0, GAUSS, hi, partial=1.0) <= tail_cutoff_radius(one, p, 0.0, GAUSS, lo, partial=1.0)


def test_tail_radius_shrinks_with_symbol_decay():
    p = ModelParams(3, 0.75, 1.0)
    gauss_only = tail_cutoff_radius(constant_multiplier(), p, 1000.0, GAUSS, 1e-12)
    damped = tail_cutoff_radius(SymbolSpec(Family.ProfileH), p, 1000.0, GAUSS, 1e-12)
    assert damped < 0.5 * gauss_only


def test_lp_band_gaussian_closed_form():
    # whole mass inside the low plateau: ‖e^{-s r²}‖_2² over R² is π/(2s)
    s = 400.0
    v = lp_band_norm(1.0, s, 2.0, 0.0, "Low", 2.0, 2, bands=CutoffBands(2.0))
    assert v == pytest.approx(math.sqrt(math.pi / (2 * s)), rel=1e-9)


@pytest.mark.parametrize("alpha,beta", [(1.5, 1.0), (0.5, 0.0)])
def test_lp_band_scaling(alpha, beta):
    n = 2
    vals = [lp_band_norm(1.0, s, alpha, beta, "Low", 2.0, n) * s ** (n / (2 * alpha) + beta / alpha) for s in (10, 100, 1000)]
    assert max(vals) / min(vals) - 1 <= 0.01


def test_lp_band_validation():
    with pytest.raises(ValueError):
        lp_band_norm(1.0, 10.0, 2.0, 0.0, "Mid", 2.0, 2)
    with pytest.raises(ValueError):
        lp_band_norm(1.0, 10.0, 2.0, 0.0, "Low", 1.0, 2)


def test_query_validation():
    p = ModelParams(2, 0.5, 1.0)
    with pytest.raises(ValueError):
        NormQuery(constant_multiplier(), p, t=-1.0)
    with pytest.raises(ValueError):
        NormQuery(constant_multiplier(), p, lebesgue_r=2.0)
    assert NormQuery(constant_multiplier(), p, lebesgue_r=1.5).p == pytest.approx(6.0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_panels=10)
