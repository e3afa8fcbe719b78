"""Acceptance criteria 1-9, each at its stated tolerance.

Every test reports one verdict line through the ``report`` fixture; the
terminal summary lists them per criterion.
"""

import filecmp
import math
import time

import numpy as np
import pytest

from dampwave import (
    CutoffBands,
    DerivativeIndex,
    Family,
    ModelParams,
    ModeState,
    NormQuery,
    SymbolSpec,
    classify_regime,
    decay_exponents,
    expected_rate,
    integrate_mode,
    lp_band_norm,
    ode_residual,
    parse_datum,
    solution_hat,
)
from dampwave.asymptotics import (
    LEMMAS,
    bound_fit_pass,
    decay_fit,
    log_times,
    norm_ladder,
    pointwise_bound_fit,
    profile_residual_norm,
    residual_ladder,
    residual_trend,
    scaling_constancy_check,
    solution_norm_query,
    two_sided_check,
    two_sided_pass,
)
from dampwave.cli import main
from dampwave.oracle import relative_error
from dampwave.suites import ExperimentConfig, oracle_tuples, richardson_resolved

MATRIX = [
    ModelParams(2, 0.25, 1.0),
    ModelParams(2, 0.5, 1.0),
    ModelParams(2, 0.5, 2.0),
    ModelParams(2, 0.5, 3.0),
    ModelParams(3, 0.75, 1.0),
    ModelParams(3, 1.0, 1.0),
]
GAUSS = parse_datum("gaussian:1")
ZERO_MEAN = parse_datum("gaussdiff:1:2")
LADDER = log_times(10.0, 1000.0, 9)
PROBLEMS = (("u1", None, GAUSS), ("u0", GAUSS, None))


def _label(p):
    return f"s={p.sigma:g},nu={p.nu:g},n={p.n}"


@pytest.fixture(scope="module")
def tuples():
    return oracle_tuples(ExperimentConfig())


def test_c1_oracle_equivalence(tuples, report):
    start = time.perf_counter()
    worst = 0.0
    for p, r, t, u0, u1 in tuples:
        ref = integrate_mode(p, r, t, ModeState(u0, u1))
        worst = max(worst, relative_error(solution_hat(p, t, r, u0, u1), ref.v, 1e-9))
        worst = max(worst, relative_error(solution_hat(p, t, r, u0, u1, 1), ref.w, 1e-9))
    elapsed = time.perf_counter() - start
    regimes = {classify_regime(p) for p, *_ in tuples}
    ok = len(tuples) == 50 and len(regimes) == 5 and worst <= 1e-6 and elapsed < 30
    report(1, ok, f"{len(tuples)} tuples, {len(regimes)} regimes, max rel err {worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_c2_ode_residual(tuples, report):
    h = 1e-3
    worst, ratios, limited = 0.0, [], 0
    for p, r, t, u0, u1 in tuples:
        if t < 2 * h:
            continue
        res = ode_residual(p, r, t, u0, u1, h)
        worst = max(worst, res)
        # the ratio only carries information where the h² term clears rounding
        if richardson_resolved(p, r, t, u0, u1, h):
            ratios.append(res / ode_residual(p, r, t, u0, u1, h / 2))
        else:
            limited += 1
    ok = worst <= 1e-5 and len(ratios) > 0 and all(3.5 <= x <= 4.5 for x in ratios)
    span = f"[{min(ratios):.3f}, {max(ratios):.3f}]" if ratios else "none"
    report(2, ok, f"max residual {worst:.2e}; Richardson ratios {span} on {len(ratios)} resolved tuples, {limited} rounding-limited")
    assert ok


def test_c3_kernel_scaling(report):
    times = [10.0, 31.6, 100.0, 316.0, 1000.0]
    worst, where = 0.0, ""
    for s in (0.25, 0.4):
        p = ModelParams(2, s, 1.0)
        for fam, which in ((Family.ProfileG, "G"), (Family.ProfileH, "H")):
            for k, ell in ((0.0, 0), (1.0, 0), (0.0, 1)):
                ex = decay_exponents(p, k)
                exponent = (ex.gamma if which == "G" else ex.gamma_tilde) + ell
                lad = norm_ladder(NormQuery(SymbolSpec(fam), p, DerivativeIndex(k, ell)), times)
                dev = scaling_constancy_check(lad, exponent)
                if dev >= worst:
                    worst, where = dev, f"{which} s={s} k={k:g} l={ell}"
    ok = worst < 0.005
    report(3, ok, f"max deviation from median {worst:.2e} ({where})")
    assert ok


def test_c4_decay_rates(report):
    start = time.perf_counter()
    worst, where = 0.0, ""
    idx = DerivativeIndex()
    for p in MATRIX:
        for problem, u0, u1 in PROBLEMS:
            datum = u1 if problem == "u1" else u0
            fit = decay_fit(norm_ladder(solution_norm_query(p, datum, problem, idx), LADDER))
            err = abs(fit.slope + expected_rate(p, idx, problem))
            if err >= worst:
                worst, where = err, f"{problem} {_label(p)}"
    elapsed = time.perf_counter() - start
    ok = worst <= 0.05 and elapsed < 180
    report(4, ok, f"max |slope + rate| {worst:.4f} ({where}), {elapsed:.1f}s")
    assert ok


def test_c5_profile_trend(report):
    worst, where = 0.0, ""
    for p in MATRIX:
        for ell in (0, 1):
            idx = DerivativeIndex(0.0, ell)
            for problem, u0, u1 in PROBLEMS:
                lad = residual_ladder(p, idx, u0, u1, [10.0, 1000.0])
                trend = residual_trend(lad, expected_rate(p, idx, problem))
                if trend >= worst:
                    worst, where = trend, f"{problem} l={ell} {_label(p)}"
    ok = worst <= 0.5
    report(5, ok, f"max normalized residual ratio t=1e3/t=10 {worst:.3f} ({where})")
    assert ok


def test_c6_two_sided(report):
    worst, where = 0.0, ""
    idx = DerivativeIndex()
    ok = True
    for p in MATRIX:
        for problem, u0, u1 in PROBLEMS:
            datum = u1 if problem == "u1" else u0
            lad = norm_ladder(solution_norm_query(p, datum, problem, idx), LADDER)
            lo, hi = two_sided_check(lad, expected_rate(p, idx, problem), (100.0, 1000.0))
            ok &= two_sided_pass(lo, hi, 10.0)
            ratio = hi / lo if lo > 0 else math.inf
            if ratio >= worst:
                worst, where = ratio, f"{problem} {_label(p)}"
    p = ModelParams(2, 0.25, 1.0)
    lad = norm_ladder(solution_norm_query(p, ZERO_MEAN, "u1", idx), LADDER)
    lo, hi = two_sided_check(lad, expected_rate(p, idx, "u1"), (100.0, 1000.0))
    control = not two_sided_pass(lo, hi, 10.0)
    ok &= control
    report(6, ok, f"max upper/lower {worst:.2f} ({where}); zero-mean control at {_label(p)}: upper/lower {hi / lo:.1f} rejected={control}")
    assert ok


def test_c7_band_lp_scaling(report):
    sigma, n, r_leb = 0.25, 2, 1.0
    p_exp = 2 * r_leb / (2 - r_leb)
    bands = CutoffBands.for_params(ModelParams(n, sigma, 5.0))
    worst_dev, worst_exp = 0.0, 0.0
    for alpha, beta in ((2 * (1 - sigma), 1.0), (2 * sigma, 0.0)):
        expo = (n / alpha) * (1 / r_leb - 0.5) + beta / alpha
        vals = [lp_band_norm(1.0, s, alpha, beta, "Low", p_exp, n, bands=bands) * s**expo for s in (10.0, 100.0, 1000.0)]
        med = float(np.median(vals))
        worst_dev = max(worst_dev, max(abs(v / med - 1) for v in vals))
        for s in (50.0, 100.0, 1000.0):
            low = lp_band_norm(1.0, s, alpha, beta, "Low", p_exp, n, bands=bands)
            high = lp_band_norm(1.0, s, alpha, beta, "MidHigh", p_exp, n, bands=bands)
            worst_exp = max(worst_exp, high / (math.exp(-s / 2) * low))
    ok = worst_dev <= 0.01 and worst_exp <= 1.0
    report(7, ok, f"max scaling deviation {worst_dev:.2e}; max MidHigh/(e^(-s/2) Low) {worst_exp:.2e}")
    assert ok


def test_c8a_pointwise_bound_fits(report):
    fits, bad = 0, []
    for p in MATRIX:
        reg = classify_regime(p)
        for lemma_id, items in LEMMAS.items():
            for item in items:
                if item.regimes and reg not in item.regimes:
                    continue
                fit = pointwise_bound_fit(lemma_id, item.name, p)
                fits += 1
                if not bound_fit_pass(fit, 1e-3):
                    bad.append(f"{lemma_id}:{item.name}@{_label(p)}")
    ok = fits > 0 and not bad
    report(8, ok, f"bound fits {fits - len(bad)}/{fits} with finite C_hat and c_hat >= 1e-3" + (f", failing {bad}" if bad else ""))
    assert ok


def test_c8b_naive_vs_hybrid(report):
    p = ModelParams(3, 0.75, 1.0)
    idx = DerivativeIndex(0.0, 1)
    ratios = {}
    for problem, u0, u1 in PROBLEMS:
        hybrid = profile_residual_norm(p, idx, u0, u1, 1000.0)
        naive = profile_residual_norm(p, idx, u0, u1, 1000.0, kind="naive")
        ratios[problem] = naive / hybrid
    ok = all(r >= 2.0 for r in ratios.values())
    report(8, ok, "naive/hybrid residual at t=1e3: " + ", ".join(f"{k} {v:.3f}" for k, v in ratios.items()) + " (need >= 2)")
    assert ok


def test_c9_determinism(tmp_path, report):
    a, b = tmp_path / "a", tmp_path / "b"
    start = time.perf_counter()
    main(["verify", "--out", str(a)])
    elapsed = time.perf_counter() - start
    main(["verify", "--out", str(b)])
    csvs = sorted(x.name for x in a.glob("*.csv"))
    same = len(csvs) == 6 and all(filecmp.cmp(a / c, b / c, shallow=False) for c in csvs)
    ok = same and elapsed < 300
    report(9, ok, f"{len(csvs)} CSVs byte-identical={same}, one run {elapsed:.1f}s")
    assert ok
