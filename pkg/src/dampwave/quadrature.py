"""Radial quadrature for Plancherel norms of Fourier multipliers.

For a radial multiplier m(t, r) and radial datum ĝ(r) the norms reduce to

    ‖|ξ|^k m ĝ‖_p^p = ω_{n-1} ∫_0^∞ r^{n-1} |r^k m(t, r) ĝ(r)|^p dr,

with ω_{n-1} = 2π^{n/2}/Γ(n/2) the area of the unit sphere.  The engine
integrates on Gauss-Legendre-15 panels:

* dyadic panels toward r = 0, with the innermost remainder extrapolated from
  the geometric ratio of the last two levels;
* a fixed number of panels per oscillation period 2π/t;
* global adaptive bisection, using |GL15(panel) - GL15(halves)| as error;
* truncation at a radius R where an analytic envelope bounds the tail.

Sums are taken with math.fsum, so results do not depend on panel order.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammaincc

from .data import RadialDatum
from .errors import NoDecayBound, NonIntegrableSingularity, TolNotMet
from .model import CutoffBands, DerivativeIndex, ModelParams
from .symbols import EnvTerm, Multiplier, SymbolSpec, symbol_multiplier

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_panels: int = 200_000
    panels_per_period: int = 8

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_panels < 100:
            raise ValueError("max_panels must be at least 100")
        if self.panels_per_period < 1:
            raise ValueError("panels_per_period must be at least 1")


@dataclass(frozen=True)
class NormQuery:
    """One norm ‖|ξ|^k m(t) ĝ‖_{L^p} with p = 2r/(2 - r), r = ``lebesgue_r``.

    ``symbol`` is a SymbolSpec (its time order is taken from ``idx.ell``) or
    a ready-made :class:`Multiplier`.  Without a datum the kernel alone is
    measured.
    """

    symbol: SymbolSpec | Multiplier
    params: ModelParams
    idx: DerivativeIndex = DerivativeIndex()
    datum: RadialDatum | None = None
    t: float = 0.0
    lebesgue_r: float = 1.0
    bands: CutoffBands | None = None

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("t must be non-negative")
        if not (1.0 <= self.lebesgue_r < 2.0):
            raise ValueError("lebesgue_r must lie in [1, 2)")

    @property
    def p(self) -> float:
        return 2.0 * self.lebesgue_r / (2.0 - self.lebesgue_r)

    def multiplier(self) -> Multiplier:
        if isinstance(self.symbol, Multiplier):
            return self.symbol
        spec = dataclasses.replace(self.symbol, ell=self.idx.ell)
        return symbol_multiplier(spec, self.params, bands=self.bands)

    def at(self, t: float) -> "NormQuery":
        return dataclasses.replace(self, t=float(t))


@dataclass(frozen=True)
class QuadResult:
    value: float  # the integral (p-th power of the norm)
    error: float
    panels: int
    radius: float


def sphere_area(n: int) -> float:
    """ω_{n-1} = 2π^{n/2} / Γ(n/2): 2, 2π, 4π for n = 1, 2, 3."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def integrability_exponent(n: int, k: float, order: float, p: float = 2.0) -> float:
    """Exponent e with integrand ~ r^{e-1} at 0; the integral converges iff e > 0."""
    return n + p * (k - order)


# ---------------------------------------------------------------------------
# envelopes and truncation
# ---------------------------------------------------------------------------


def _power_exp_tail(Q: float, D: float, B: float, R: float) -> float:
    """∫_R^∞ r^Q exp(-D r^B) dr for Q > -1, D > 0."""
    a = (Q + 1.0) / B
    return float(gammaincc(a, D * R**B) * gamma_fn(a) / (B * D**a))


@dataclass(frozen=True)
class _TailBound:
    """Envelope of ω r^{n-1} |r^k m ĝ|^p on [r_min, ∞)."""

    terms: tuple[EnvTerm, ...]
    datum_env: EnvTerm | None
    n: int
    k: float
    p: float
    r_min: float

    def __call__(self, R: float) -> float:
        R = max(R, self.r_min)
        p = self.p
        # (Σ_i x_i)^p <= N^{p-1} Σ_i x_i^p
        scale = sphere_area(self.n) * len(self.terms) ** (p - 1.0)
        total = 0.0
        for term in self.terms:
            if term.M == 0:
                continue
            Q = self.n - 1.0 + p * (self.k + term.q)
            amp = term.M**p
            options = []
            if self.datum_env is not None:
                amp_d = amp * self.datum_env.M**p
                options.append(amp_d * _power_exp_tail(Q, p * self.datum_env.d, self.datum_env.beta, R))
                if term.d > 0:
                    options.append(amp_d * _power_exp_tail(Q, p * term.d, term.beta, R))
            elif term.d > 0:
                options.append(amp * _power_exp_tail(Q, p * term.d, term.beta, R))
            if not options:
                return math.inf
            total += min(options)
        return scale * total


def _tail_bound(mult: Multiplier, query: NormQuery) -> _TailBound:
    n = query.params.n
    denv = query.datum.envelope(n) if query.datum is not None else None
    bound = _TailBound(tuple(mult.envelope(query.t)), denv, n, query.idx.k, query.p, mult.r_min)
    if not math.isfinite(bound(bound.r_min * 2.0 + 1.0)):
        raise NoDecayBound(f"neither {mult.label} nor the datum decays in r")
    return bound


def _radius_for(bound: _TailBound, target: float) -> float:
    """Smallest R (to 1e-3 relative) with bound(R) <= target."""
    lo = bound.r_min
    if bound(lo) <= target:
        return lo
    hi = 2.0 * lo
    while bound(hi) > target:
        lo, hi = hi, 2.0 * hi
        if hi > 1e12:
            raise NoDecayBound("tail bound does not fall below the target")
    while hi - lo > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        if bound(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# panel engine
# ---------------------------------------------------------------------------


def _gl_batch(f: Callable[[np.ndarray], np.ndarray], a: np.ndarray, b: np.ndarray):
    """GL15 over each panel and over its two halves; returns (halves_sum, |diff|)."""
    m = 0.5 * (a + b)
    # columns: whole, left half, right half
    lo = np.stack([a, a, m], axis=1)
    hi = np.stack([b, m, b], axis=1)
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = c[..., None] + h[..., None] * _NODES
    y = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(y)):
        raise FloatingPointError("integrand is not finite on a quadrature panel")
    s = h * (y @ _WEIGHTS)
    halves = s[:, 1] + s[:, 2]
    return halves, np.abs(s[:, 0] - halves)


def _split_for_oscillation(edges: list[float], t: float, ppp: int) -> np.ndarray:
    """Subdivide each segment so that no panel is wider than 2π/(t·ppp)."""
    pieces = []
    width = 2.0 * math.pi / (t * ppp) if t > 0 else math.inf
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        m = max(1, math.ceil((hi - lo) / width))
        pieces.append(np.linspace(lo, hi, m + 1))
    return pieces


def _adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: np.ndarray,
    b: np.ndarray,
    level: np.ndarray,
    cfg: QuadratureConfig,
    floor: float = 0.0,
):
    """Refine panels until Σ err <= max(abs_tol, rel_tol·|I|, floor)."""
    val, err = _gl_batch(f, a, b)
    while True:
        total = math.fsum(val)
        etot = math.fsum(err)
        target = max(cfg.abs_tol, cfg.rel_tol * abs(total), floor)
        if etot <= target:
            return a, val, err, level, total, etot
        if len(a) >= cfg.max_panels:
            raise TolNotMet(
                f"panel budget {cfg.max_panels} exhausted (error {etot:.3g} > {target:.3g})",
                value=total,
                error=etot,
            )
        order = np.argsort(-err, kind="stable")
        # leave the smallest-error panels alone while they fit in half the budget
        tail = np.cumsum(err[order][::-1])[::-1]
        split = order[tail > 0.5 * target]
        keep = np.ones(len(a), dtype=bool)
        keep[split] = False
        room = cfg.max_panels - len(a)
        if len(split) > room:
            split = split[:room]
            keep = np.ones(len(a), dtype=bool)
            keep[split] = False
        sa, sb = a[split], b[split]
        sm = 0.5 * (sa + sb)
        na = np.concatenate([sa, sm])
        nb = np.concatenate([sm, sb])
        nl = np.concatenate([level[split], level[split]])
        nv, ne = _gl_batch(f, na, nb)
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        level = np.concatenate([level[keep], nl])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        idx = np.argsort(a, kind="stable")
        a, b, level, val, err = a[idx], b[idx], level[idx], val[idx], err[idx]


def integrate_radial(
    f: Callable[[np.ndarray], np.ndarray],
    R: float,
    t: float,
    exponent: float,
    cfg: QuadratureConfig,
    breakpoints: tuple[float, ...] = (),
    r_inner: float = 1.0,
) -> QuadResult:
    """∫_0^R f(r) dr for f >= 0 behaving like r^{exponent-1} near 0."""
    if exponent <= 0:
        raise NonIntegrableSingularity(f"integrand ~ r^{exponent - 1:g} at 0 is not integrable")
    r0 = min(r_inner, R)
    # enough dyadic levels that the unextrapolated remainder is ~ 2^-53 relative
    levels = min(1000, math.ceil(53.0 / exponent) + 4)
    dy = r0 * 2.0 ** -np.arange(levels + 1, dtype=float)
    edges = sorted({r0, R, *[x for x in breakpoints if r0 < x < R]})
    pieces = _split_for_oscillation(edges, t, cfg.panels_per_period)
    dy_pieces = _split_for_oscillation(list(dy[::-1]), t, cfg.panels_per_period)

    a_list, b_list, l_list = [], [], []
    for j, piece in enumerate(dy_pieces):
        a_list.append(piece[:-1])
        b_list.append(piece[1:])
        l_list.append(np.full(len(piece) - 1, levels - 1 - j))
    for piece in pieces:
        a_list.append(piece[:-1])
        b_list.append(piece[1:])
        l_list.append(np.full(len(piece) - 1, -1))
    a = np.concatenate(a_list)
    b = np.concatenate(b_list)
    lev = np.concatenate(l_list)
    if len(a) > cfg.max_panels:
        raise TolNotMet(f"{len(a)} base panels exceed the panel budget {cfg.max_panels}")

    a, val, err, lev, total, etot = _adaptive(f, a, b, lev, cfg)

    # geometric extrapolation of ∫_0^{r0 2^-levels}
    last = math.fsum(val[lev == levels - 1])
    prev = math.fsum(val[lev == levels - 2])
    tail = 0.0
    if last > 0 and prev > 0:
        q = last / prev
        if q >= 1.0:
            raise NonIntegrableSingularity("dyadic contributions do not shrink toward r = 0")
        tail = last * q / (1.0 - q)
    return QuadResult(total + tail, etot + 0.5 * tail, len(a), R)


# ---------------------------------------------------------------------------
# public norms
# ---------------------------------------------------------------------------


def _query_integrand(query: NormQuery, mult: Multiplier):
    n, k, p, t = query.params.n, query.idx.k, query.p, query.t
    omega = sphere_area(n)
    datum = query.datum

    def f(r):
        m = np.abs(mult(t, r))
        if datum is not None:
            m = m * np.abs(datum.fourier(n, r))
        if k:
            m = m * r**k
        return omega * r ** (n - 1) * m**p

    return f


def _breakpoints(query: NormQuery) -> tuple[float, ...]:
    pts = [2.0, 4.0]
    bands = query.bands or CutoffBands.for_params(query.params)
    pts += [bands.rho / 2.0, bands.rho]
    return tuple(pts)


def check_integrable(query: NormQuery) -> float:
    mult = query.multiplier()
    e = integrability_exponent(query.params.n, query.idx.k, mult.singular_order, query.p)
    if e <= 0:
        raise NonIntegrableSingularity(
            f"{mult.label}: n + p(k - s) = {e:g} <= 0 with singular order s = {mult.singular_order:g}"
        )
    return e


def integrate_query(query: NormQuery, cfg: QuadratureConfig | None = None) -> QuadResult:
    """∫ of the p-th power; tail truncation iterated against the running value."""
    cfg = cfg or QuadratureConfig()
    mult = query.multiplier()
    e = check_integrable(query)
    bound = _tail_bound(mult, query)
    f = _query_integrand(query, mult)
    bp = _breakpoints(query)
    eps = 0.1 * cfg.rel_tol

    # first pass: truncate where the envelope falls below a fixed fraction of its own mass
    R = _radius_for(bound, max(eps * bound(bound.r_min), 0.1 * cfg.abs_tol))
    res = integrate_radial(f, R, query.t, e, cfg, bp)
    value, error, panels = res.value, res.error, res.panels
    while bound(R) > max(eps * value, 0.1 * cfg.abs_tol):
        R_new = _radius_for(bound, max(eps * value, 0.1 * cfg.abs_tol))
        if R_new <= R:
            break
        extra = _integrate_segment(f, R, R_new, query.t, cfg, value)
        value += extra.value
        error += extra.error
        panels += extra.panels
        R = R_new
    return QuadResult(value, error, panels, R)


def _integrate_segment(f, lo: float, hi: float, t: float, cfg: QuadratureConfig, scale: float) -> QuadResult:
    pieces = _split_for_oscillation([lo, hi], t, cfg.panels_per_period)
    a = np.concatenate([p[:-1] for p in pieces])
    b = np.concatenate([p[1:] for p in pieces])
    lev = np.full(len(a), -1)
    a, val, err, lev, total, etot = _adaptive(f, a, b, lev, cfg, floor=cfg.rel_tol * abs(scale))
    return QuadResult(total, etot, len(a), hi)


def sobolev_seminorm(query: NormQuery, cfg: QuadratureConfig | None = None) -> float:
    """‖|ξ|^k m(t) ĝ‖_{L^p} by radial quadrature (p = 2 gives the L² Plancherel norm)."""
    res = integrate_query(query, cfg)
    return res.value ** (1.0 / query.p)


def tail_cutoff_radius(
    symbol: SymbolSpec | Multiplier,
    params: ModelParams,
    t: float,
    datum: RadialDatum | None,
    eps: float,
    idx: DerivativeIndex = DerivativeIndex(),
    partial: float | None = None,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Radius R with analytic tail bound beyond R below eps · (integral up to R)."""
    query = NormQuery(symbol, params, idx, datum, t)
    mult = query.multiplier()
    bound = _tail_bound(mult, query)
    if partial is not None:
        return _radius_for(bound, eps * partial)
    cfg = cfg or QuadratureConfig()
    f = _query_integrand(query, mult)
    e = check_integrable(query)
    R = _radius_for(bound, eps * bound(bound.r_min))
    value = integrate_radial(f, R, t, e, cfg, _breakpoints(query)).value
    while bound(R) > eps * value:
        R_new = _radius_for(bound, eps * value)
        if R_new <= R:
            break
        value += _integrate_segment(f, R, R_new, t, cfg, value).value
        R = R_new
    return R


def band_multiplier(
    C0: float, s: float, alpha: float, beta: float, band: str, bands: CutoffBands
) -> Multiplier:
    """r ↦ e^{-C0 s r^α} r^β χ(r), with χ = χ_L (``band='Low'``) or 1 - χ_L (``'MidHigh'``)."""
    if band not in ("Low", "MidHigh"):
        raise ValueError(f"band must be 'Low' or 'MidHigh', got {band!r}")
    low = band == "Low"

    def func(t, r):
        w = bands.low(r) if low else 1.0 - bands.low(r)
        return np.exp(-C0 * s * r**alpha) * r**beta * w

    return Multiplier(
        func=func,
        envelope=lambda t: [EnvTerm(1.0, beta, C0 * s, alpha)],
        singular_order=-beta,
        r_min=1.0,
        label=f"exp(-{C0:g}*{s:g}*r^{alpha:g})r^{beta:g}[{band}]",
    )


def lp_band_norm(
    C0: float,
    s: float,
    alpha: float,
    beta: float,
    band: str,
    p: float,
    n: int,
    cfg: QuadratureConfig | None = None,
    bands: CutoffBands | None = None,
) -> float:
    """‖e^{-C0 s |ξ|^α} |ξ|^β χ_band‖_{L^p(R^n)}."""
    if not (C0 > 0 and s > 0 and alpha > 0 and beta >= 0 and p >= 2):
        raise ValueError("need C0, s, alpha > 0, beta >= 0 and p >= 2")
    cfg = cfg or QuadratureConfig()
    bands = bands or CutoffBands(1.0)
    mult = band_multiplier(C0, s, alpha, beta, band, bands)
    e = integrability_exponent(n, 0.0, mult.singular_order, p)
    omega = sphere_area(n)

    def f(r):
        return omega * r ** (n - 1) * np.abs(mult(0.0, r)) ** p

    bound = _TailBound(tuple(mult.envelope(0.0)), None, n, 0.0, p, mult.r_min)
    # χ_L vanishes from ρ on; the other band is truncated by its envelope
    R = bands.rho if band == "Low" else max(4.0, _radius_for(bound, 0.1 * cfg.abs_tol))
    res = integrate_radial(f, R, 0.0, e, cfg, (bands.rho / 2.0, bands.rho, 2.0), r_inner=bands.rho / 2.0)
    value = res.value
    if band != "Low" and value > 0 and bound(R) > 0.1 * cfg.rel_tol * value:
        R_new = _radius_for(bound, 0.1 * cfg.rel_tol * value)
        value += _integrate_segment(f, R, R_new, 0.0, cfg, value).value
    return value ** (1.0 / p)
