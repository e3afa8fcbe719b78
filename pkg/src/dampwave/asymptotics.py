"""Large-time verification harness.

Turns quadrature norms into falsifiable checks: power-law fits of norm
ladders, exact self-similar scaling of the profile kernels, profile residual
trends, two-sided bounds, and empirical fits of pointwise multiplier bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .data import RadialDatum
from .errors import BandViolation, DampwaveError, InsufficientPoints, RegimeMismatch
from .model import (
    CutoffBands,
    DerivativeIndex,
    ModelParams,
    Regime,
    classify_regime,
)
from .quadrature import NormQuery, QuadratureConfig, sobolev_seminorm
from .symbols import (
    EnvTerm,
    Family,
    Multiplier,
    SymbolSpec,
    eval_symbol,
    solution_multiplier,
    symbol_multiplier,
)


def log_times(t_min: float = 10.0, t_max: float = 1000.0, count: int = 9) -> list[float]:
    return [float(x) for x in np.logspace(math.log10(t_min), math.log10(t_max), count)]


# ---------------------------------------------------------------------------
# ladders and fits
# ---------------------------------------------------------------------------


@dataclass
class NormLadder:
    times: list[float]
    values: list[float]
    idx: DerivativeIndex = DerivativeIndex()
    meta: str = ""
    failed: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values differ in length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")

    def valid(self, window: tuple[float, float] | None = None):
        out = []
        for t, v in zip(self.times, self.values):
            if not (math.isfinite(v) and v > 0):
                continue
            if window and not (window[0] <= t <= window[1]):
                continue
            out.append((t, v))
        return out


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]


@dataclass(frozen=True)
class BoundFit:
    C_hat: float
    c_hat: float
    max_violation: float


def norm_ladder(
    query: NormQuery,
    times: Sequence[float],
    cfg: QuadratureConfig | None = None,
    meta: str = "",
) -> NormLadder:
    """Evaluate the query at each time; failures become NaN entries.

    Raises the last error when fewer than 80% of the entries succeed.
    """
    values, failed = [], []
    last_err: Exception | None = None
    for t in times:
        try:
            values.append(sobolev_seminorm(query.at(t), cfg))
        except (DampwaveError, FloatingPointError) as exc:
            values.append(math.nan)
            failed.append(f"t={t:g}: {type(exc).__name__}")
            last_err = exc
    if last_err is not None and len(failed) > 0.2 * len(times):
        raise last_err
    return NormLadder(list(times), values, query.idx, meta, failed)


def decay_fit(ladder: NormLadder, window: tuple[float, float] | None = None) -> DecayFit:
    pts = ladder.valid(window)
    if len(pts) < 5:
        raise InsufficientPoints(f"need at least 5 valid points, have {len(pts)}")
    t = np.array([p[0] for p in pts])
    v = np.array([p[1] for p in pts])
    if math.log10(t[-1] / t[0]) < 1.5:
        raise InsufficientPoints("the fit window must span at least 1.5 decades")
    x, y = np.log(t), np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    # a flat ladder has ss_tot at rounding level; call that a perfect fit
    flat = ss_tot <= 1e-24 * len(y) * max(1.0, float(np.max(y * y)))
    r2 = 1.0 if flat else 1.0 - float(np.sum(resid**2)) / ss_tot
    return DecayFit(float(slope), float(intercept), max(0.0, min(1.0, r2)), (float(t[0]), float(t[-1])))


def normalized(ladder: NormLadder, exponent: float, window=None) -> list[tuple[float, float]]:
    return [(t, v * t**exponent) for t, v in ladder.valid(window)]


def scaling_constancy_check(ladder: NormLadder, exponent: float) -> float:
    """max_i |v_i t_i^exponent / median - 1|."""
    vals = np.array([v for _, v in normalized(ladder, exponent)])
    if len(vals) == 0:
        return math.inf
    med = float(np.median(vals))
    return float(np.max(np.abs(vals / med - 1.0)))


def two_sided_check(
    ladder: NormLadder, exponent: float, window: tuple[float, float] = (100.0, 1000.0)
) -> tuple[float, float]:
    """(min, max) of v t^exponent over the window; zero/NaN entries count as 0."""
    vals = []
    for t, v in zip(ladder.times, ladder.values):
        if window[0] <= t <= window[1]:
            vals.append(v * t**exponent if math.isfinite(v) else 0.0)
    if not vals:
        return 0.0, 0.0
    return float(min(vals)), float(max(vals))


def two_sided_pass(lower: float, upper: float, budget: float = 10.0) -> bool:
    return lower > 0 and upper / lower <= budget


# ---------------------------------------------------------------------------
# solutions and profiles
# ---------------------------------------------------------------------------


def solution_norm_query(
    params: ModelParams, datum: RadialDatum, problem: str, idx: DerivativeIndex, t: float = 0.0
) -> NormQuery:
    """‖∂_t^ℓ ∇^k u(t)‖₂ for data (0, datum) if problem='u1', (datum, 0) if 'u0'."""
    return NormQuery(solution_multiplier(params, problem, idx.ell), params, idx, datum, t)


def profile_multiplier(params: ModelParams, problem: str, ell: int, kind: str = "hybrid") -> Multiplier:
    """Large-time profile of ∂_t^ℓ u, per unit mass of the driving datum.

    For σ > 1/2 and ℓ = 1 the 'hybrid' choice keeps only the oscillating wave
    part: e^{-at} cos(tr) for u1 data and -r e^{-at} sin(tr) for u0 data.  The
    'naive' choice is the exact time derivative of the ℓ = 0 profile.
    """
    if kind not in ("hybrid", "naive"):
        raise ValueError(f"profile kind must be 'hybrid' or 'naive', got {kind!r}")
    base = Family.ProfileG if problem == "u1" else Family.ProfileH
    regime = classify_regime(params)
    if ell == 1 and regime is Regime.SUPER_HALF and kind == "hybrid":
        if problem == "u1":
            return symbol_multiplier(SymbolSpec(Family.ProfileCosHybrid), params)
        return symbol_multiplier(SymbolSpec(Family.ProfileSinHybrid), params).weighted(1.0, sign=-1.0)
    return symbol_multiplier(SymbolSpec(base, ell=ell), params)


def residual_multiplier(
    params: ModelParams,
    ell: int,
    u0: RadialDatum | None,
    u1: RadialDatum | None,
    kind: str = "hybrid",
    form: str = "direct",
) -> Multiplier:
    """r ↦ ∂_t^ℓ û(t, r) - m · profile(t, r) · (2π)^{-n/2}, data folded in.

    The profile is driven by u1 when it is present (mass m1), else by u0.
    ``form='factorized'`` evaluates U(ĝ - ĝ(0)) + (U - P)ĝ(0) instead of the
    direct difference U ĝ - P ĝ(0); both are the same function.
    """
    if form not in ("direct", "factorized"):
        raise ValueError(f"form must be 'direct' or 'factorized', got {form!r}")
    n = params.n
    pairs = [(p, d) for p, d in (("u0", u0), ("u1", u1)) if d is not None]
    if not pairs:
        raise ValueError("at least one of u0, u1 is required")
    lead_problem, lead = pairs[-1]
    U = {p: solution_multiplier(params, p, ell) for p, _ in pairs}
    P = profile_multiplier(params, lead_problem, ell, kind)
    g0 = float(lead.fourier(n, 0.0))

    def func(t, r):
        out = np.zeros(np.shape(r), dtype=complex)
        for p, d in pairs:
            g = d.fourier(n, r)
            if form == "direct" or p != lead_problem:
                out = out + U[p](t, r) * g
            else:
                out = out + U[p](t, r) * (g - g0)
        if form == "direct":
            return out - P(t, r) * g0
        return out + (U[lead_problem](t, r) - P(t, r)) * g0

    def envelope(t):
        terms = []
        for p, d in pairs:
            de = d.envelope(n)
            for e in U[p].envelope(t):
                terms.append(EnvTerm(e.M * de.M, e.q, de.d, de.beta))
        for e in P.envelope(t):
            terms.append(EnvTerm(e.M * abs(g0), e.q, e.d, e.beta))
        return terms

    order = max([U[p].singular_order for p, _ in pairs] + [P.singular_order])
    return Multiplier(func, envelope, order, max(P.r_min, 1.0), f"residual[{lead_problem},l={ell},{kind}]")


def profile_residual_norm(
    params: ModelParams,
    idx: DerivativeIndex,
    u0: RadialDatum | None,
    u1: RadialDatum | None,
    t: float,
    kind: str = "hybrid",
    form: str = "direct",
    cfg: QuadratureConfig | None = None,
) -> float:
    """‖∇^k (∂_t^ℓ u(t) - m · profile(t))‖₂ by Plancherel."""
    mult = residual_multiplier(params, idx.ell, u0, u1, kind, form)
    return sobolev_seminorm(NormQuery(mult, params, idx, None, t), cfg)


def residual_ladder(
    params: ModelParams,
    idx: DerivativeIndex,
    u0: RadialDatum | None,
    u1: RadialDatum | None,
    times: Sequence[float],
    kind: str = "hybrid",
    form: str = "direct",
    cfg: QuadratureConfig | None = None,
) -> NormLadder:
    mult = residual_multiplier(params, idx.ell, u0, u1, kind, form)
    return norm_ladder(NormQuery(mult, params, idx, None), times, cfg, meta=mult.label)


def residual_trend(ladder: NormLadder, exponent: float) -> float:
    """Normalized residual at the last time divided by that at the first."""
    first = ladder.values[0] * ladder.times[0] ** exponent
    last = ladder.values[-1] * ladder.times[-1] ** exponent
    return last / first


# ---------------------------------------------------------------------------
# pointwise bound fits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundItem:
    """|lhs(t, r)| <= C e^{-c w(t) r^alpha} model(t, r) on a band.

    ``w(t)`` is 1 + t when ``plus_one`` else t.  lhs and model exclude the
    band cut-off, which is common to both sides.
    """

    name: str
    lhs: Callable[[ModelParams, float, np.ndarray], np.ndarray]
    model: Callable[[ModelParams, float, np.ndarray], np.ndarray]
    alpha: Callable[[ModelParams], float]
    band: str = "Low"
    plus_one: bool = True
    regimes: tuple[Regime, ...] = ()


def _sym(family: Family, ell: int = 0):
    return lambda p, t, r: np.abs(eval_symbol(SymbolSpec(family, ell=ell), p, t, r))


def _heat(p, t, r):
    return np.exp(-t * r ** (2 * (1 - p.sigma)) / p.nu)


def _wave_damp(p, t, r):
    return np.exp(-0.5 * p.nu * t * r ** (2 * p.sigma))


def _j_items() -> list[BoundItem]:
    out = []
    a_par = lambda p: 2 * (1 - p.sigma)
    a_dmp = lambda p: 2 * p.sigma
    specs = [
        (Family.J1, a_par, lambda p, l: 2 * (1 - p.sigma) * l),
        (Family.J2, a_par, lambda p, l: 2 * (1 - p.sigma) * l - 2 * p.sigma),
        (Family.J3, a_dmp, lambda p, l: 2 * l * p.sigma + 2 * (1 - 2 * p.sigma)),
        (Family.J4, a_dmp, lambda p, l: 2 * l * p.sigma - 2 * p.sigma),
    ]
    for fam, alpha, power in specs:
        for ell in (0, 1):
            out.append(
                BoundItem(
                    f"{fam.value}L:l{ell}",
                    _sym(fam, ell),
                    (lambda pw, l: lambda p, t, r: r ** pw(p, l))(power, ell),
                    alpha,
                    regimes=(Regime.SUB_HALF,),
                )
            )
    return out


def _k_items() -> list[BoundItem]:
    out = []
    alpha = lambda p: 2 * p.sigma
    specs = [
        (Family.K1, lambda p, l: l),
        # K2 = (ν/2) r^{2σ} · K3, so it carries r^{2σ-1} relative to K1
        (Family.K2, lambda p, l: 2 * p.sigma - 1 + l),
        (Family.K3, lambda p, l: l - 1),
    ]
    for fam, power in specs:
        for ell in (0, 1):
            out.append(
                BoundItem(
                    f"{fam.value}L:l{ell}",
                    _sym(fam, ell),
                    (lambda pw, l: lambda p, t, r: r ** pw(p, l))(power, ell),
                    alpha,
                    regimes=(Regime.SUPER_HALF,),
                )
            )
    return out


def _parabolic_items() -> list[BoundItem]:
    alpha = lambda p: 2 * (1 - p.sigma)

    def j1_lhs(p, t, r):
        return np.abs(eval_symbol(SymbolSpec(Family.J1), p, t, r) - _heat(p, t, r))

    def j2_lhs(p, t, r):
        return np.abs(eval_symbol(SymbolSpec(Family.J2), p, t, r) - _heat(p, t, r) / (p.nu * r ** (2 * p.sigma)))

    def j1_model(p, t, r):
        s = p.sigma
        return t * r ** (2 * (2 - 3 * s)) + r ** (2 * (1 - 2 * s))

    def j2_model(p, t, r):
        return j1_model(p, t, r) * r ** (-2 * p.sigma)

    return [
        BoundItem("J1L-heat", j1_lhs, j1_model, alpha, regimes=(Regime.SUB_HALF,)),
        BoundItem("J2L-heat", j2_lhs, j2_model, alpha, regimes=(Regime.SUB_HALF,)),
    ]


def _hybrid_items() -> list[BoundItem]:
    alpha = lambda p: 2 * p.sigma

    def k1(p, t, r):
        return np.abs(eval_symbol(SymbolSpec(Family.K1), p, t, r) - _wave_damp(p, t, r) * np.cos(t * r))

    def k3(p, t, r):
        return np.abs(eval_symbol(SymbolSpec(Family.K3), p, t, r) - _wave_damp(p, t, r) * np.sin(t * r) / r)

    return [
        BoundItem("K1L-hybrid", k1, lambda p, t, r: t * r ** (4 * p.sigma - 1), alpha, regimes=(Regime.SUPER_HALF,)),
        BoundItem(
            "K3L-hybrid",
            k3,
            lambda p, t, r: t * r ** (4 * p.sigma - 2) + r ** (4 * p.sigma - 3),
            alpha,
            regimes=(Regime.SUPER_HALF,),
        ),
    ]


def _hybrid_dt_items() -> list[BoundItem]:
    alpha = lambda p: 2 * p.sigma

    def k1(p, t, r):
        val = eval_symbol(SymbolSpec(Family.K1, ell=1), p, t, r)
        return np.abs(val + _wave_damp(p, t, r) * r * np.sin(t * r))

    def k3(p, t, r):
        val = eval_symbol(SymbolSpec(Family.K3, ell=1), p, t, r)
        return np.abs(val - _wave_damp(p, t, r) * np.cos(t * r))

    return [
        BoundItem(
            "dK1L-hybrid",
            k1,
            lambda p, t, r: t * r ** (4 * p.sigma) + r ** (2 * p.sigma),
            alpha,
            regimes=(Regime.SUPER_HALF,),
        ),
        BoundItem(
            "dK3L-hybrid",
            k3,
            lambda p, t, r: t * r ** (4 * p.sigma - 1) + r ** (2 * p.sigma - 1),
            alpha,
            regimes=(Regime.SUPER_HALF,),
        ),
    ]


def _half_items() -> list[BoundItem]:
    half = (Regime.HALF_UNDERDAMPED, Regime.HALF_OVERDAMPED)
    one = lambda p: 1.0

    def fams(p):
        if classify_regime(p) is Regime.HALF_UNDERDAMPED:
            return Family.Kt1, Family.Kt2, Family.Kt3
        return Family.Jt1, Family.Jt2, Family.Jt3

    out = []
    for ell in (0, 1):

        def pair(p, t, r, ell=ell):
            f1, f2, _ = fams(p)
            return _sym(f1, ell)(p, t, r) + _sym(f2, ell)(p, t, r)

        def third(p, t, r, ell=ell):
            return _sym(fams(p)[2], ell)(p, t, r)

        out.append(
            BoundItem(f"X1+X2:l{ell}", pair, (lambda l: lambda p, t, r: r**l)(ell), one, "Full", False, half)
        )
        out.append(
            BoundItem(
                f"X3:l{ell}",
                third,
                (lambda l: lambda p, t, r: t ** (1 - l) * np.ones_like(r))(ell),
                one,
                "Full",
                False,
                half,
            )
        )
    return out


def _critical_items() -> list[BoundItem]:
    crit = (Regime.HALF_CRITICAL,)
    one = lambda p: 1.0
    return [
        BoundItem("dE1", _sym(Family.E1, 1), lambda p, t, r: r, one, "Full", False, crit),
        BoundItem("dE2", _sym(Family.E2, 1), lambda p, t, r: r * (1 + t * r), one, "Full", False, crit),
        BoundItem("dE3", _sym(Family.E3, 1), lambda p, t, r: 1 + t * r, one, "Full", False, crit),
    ]


LEMMAS: dict[str, list[BoundItem]] = {
    "subhalf-low": _j_items(),
    "superhalf-low": _k_items(),
    "subhalf-parabolic": _parabolic_items(),
    "superhalf-hybrid": _hybrid_items(),
    "superhalf-hybrid-dt": _hybrid_dt_items(),
    "half-full": _half_items(),
    "critical-full": _critical_items(),
}

C_GRID = tuple(2.0**j for j in range(-10, 7))


def default_grid(item: BoundItem, params: ModelParams, count: int = 40):
    """t ∈ {1, 10, 100} and `count` log-spaced radii across the item's band."""
    times = (1.0, 10.0, 100.0)
    if item.band == "Low":
        rho = CutoffBands.for_params(params).rho
        radii = np.logspace(math.log10(1e-3 * rho), math.log10(rho), count)
        # logspace can overshoot its endpoint by an ulp
        radii[-1] = rho
    else:
        radii = np.logspace(-2, 1, count)
    return times, radii


def pointwise_bound_fit(
    lemma_id: str,
    item: str,
    params: ModelParams,
    times: Sequence[float] | None = None,
    radii: Sequence[float] | None = None,
    growth_budget: float = 4.0,
) -> BoundFit:
    """Fit C, c in |lhs| <= C e^{-c w(t) r^α} model on a (t, r) grid.

    A trial c counts as admissible when the largest ratio
    lhs · e^{c w(t) r^α} / model over r grows by at most ``growth_budget``
    between the last two grid times (too large a c makes it grow like
    e^{Δc Δt r^α}; the early times only show transients).  c_hat is half the
    largest admissible c on the grid 2^-10 ... 2^6 (0 if none), and C_hat the
    sup of the ratio at c_hat, so the fitted bound holds on every grid point.
    """
    try:
        entry = next(x for x in LEMMAS[lemma_id] if x.name == item)
    except (KeyError, StopIteration):
        raise KeyError(f"unknown bound {lemma_id}:{item}") from None
    regime = classify_regime(params)
    if entry.regimes and regime not in entry.regimes:
        raise RegimeMismatch(f"{lemma_id}:{item} does not apply in regime {regime.value}")
    t_def, r_def = default_grid(entry, params)
    times = list(times if times is not None else t_def)
    if len(times) < 2:
        raise ValueError("need at least two grid times")
    radii = np.asarray(radii if radii is not None else r_def, dtype=float)
    if np.any(radii <= 0):
        raise BandViolation("grid radii must be positive")
    if entry.band == "Low" and np.any(radii > CutoffBands.for_params(params).rho):
        raise BandViolation(f"{lemma_id}:{item} grid leaves the low band")

    alpha = entry.alpha(params)
    ra = radii**alpha
    lhs = np.array([entry.lhs(params, t, radii) for t in times])
    model = np.array([entry.model(params, t, radii) for t in times])
    w = np.array([(1.0 + t) if entry.plus_one else t for t in times])

    def ratios(c):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            r = lhs * np.exp(c * w[:, None] * ra[None, :]) / model
        return np.where(lhs == 0, 0.0, r)

    best = 0.0
    for c in C_GRID:
        sup_t = np.max(ratios(c), axis=1)
        if np.all(np.isfinite(sup_t)) and sup_t[-1] <= growth_budget * sup_t[-2]:
            best = c
    c_hat = 0.5 * best
    rat = ratios(c_hat)
    C_hat = float(np.max(rat))
    bound = C_hat * model * np.exp(-c_hat * w[:, None] * ra[None, :])
    # relative to the bound, so rounding shows up at the 1e-16 level
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(lhs == 0, -1.0, lhs / bound - 1.0)
    viol = float(np.nanmax(rel)) if math.isfinite(C_hat) else math.inf
    return BoundFit(C_hat, c_hat, viol)


def bound_fit_pass(fit: BoundFit, c_floor: float = 1e-3) -> bool:
    return math.isfinite(fit.C_hat) and fit.c_hat >= c_floor
