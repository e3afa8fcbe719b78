"""Characteristic roots, Fourier-multiplier solution symbols and profile kernels.

Every mode of the equation solves ``v'' + 2a v' + r^2 v = 0`` with
``a = ν r^{2σ} / 2``.  All multipliers are built from the pair

    C(t) = e^{-at} cos(ωt),      S(t) = e^{-at} sin(ωt) / ω,      ω² = r² - a²,

read as cosh/sinh when ω² < 0.  :func:`_cs` evaluates C, S and C - aS without
cancellation or overflow in all three cases (ω² >, =, < 0), so the σ = 1/2
families stay continuous through ν = 2 without a special series branch.

Symbols take a scalar time ``t`` and a scalar or array radius ``r = |ξ|``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import OutOfRealBranch, RegimeMismatch, SingularAtZero
from .model import Band, CutoffBands, ModelParams, Regime, classify_regime


class Family(enum.Enum):
    J1 = "J1"
    J2 = "J2"
    J3 = "J3"
    J4 = "J4"
    K1 = "K1"
    K2 = "K2"
    K3 = "K3"
    Jt1 = "Jt1"
    Jt2 = "Jt2"
    Jt3 = "Jt3"
    Kt1 = "Kt1"
    Kt2 = "Kt2"
    Kt3 = "Kt3"
    E1 = "E1"
    E2 = "E2"
    E3 = "E3"
    ProfileG = "ProfileG"
    ProfileH = "ProfileH"
    ProfileCosHybrid = "ProfileCosHybrid"
    ProfileSinHybrid = "ProfileSinHybrid"


_J = {Family.J1, Family.J2, Family.J3, Family.J4}
_K = {Family.K1, Family.K2, Family.K3}
_JT = {Family.Jt1, Family.Jt2, Family.Jt3}
_KT = {Family.Kt1, Family.Kt2, Family.Kt3}
_E = {Family.E1, Family.E2, Family.E3}
_HYBRID = {Family.ProfileCosHybrid, Family.ProfileSinHybrid}

# cos-type, (a*sin)-type and sin-type members of the K, K~, J~ and E families
_COS_TYPE = {Family.K1, Family.Jt1, Family.Kt1, Family.E1}
_ASIN_TYPE = {Family.K2, Family.Jt2, Family.Kt2, Family.E2}
_SIN_TYPE = {Family.K3, Family.Jt3, Family.Kt3, Family.E3}

_VALID = {
    Regime.SUB_HALF: _J,
    Regime.SUPER_HALF: _K | _HYBRID,
    Regime.HALF_OVERDAMPED: _JT,
    Regime.HALF_UNDERDAMPED: _KT,
    Regime.HALF_CRITICAL: _E,
}


@dataclass(frozen=True)
class SymbolSpec:
    family: Family
    band: Band = Band.FULL
    ell: int = 0

    def __post_init__(self):
        if self.ell not in (0, 1):
            raise ValueError(f"ell must be 0 or 1, got {self.ell!r}")


def family_valid(family: Family, regime: Regime) -> bool:
    if family in (Family.ProfileG, Family.ProfileH):
        return True
    return family in _VALID[regime]


def check_regime(spec: SymbolSpec, params: ModelParams) -> Regime:
    regime = classify_regime(params)
    if not family_valid(spec.family, regime):
        raise RegimeMismatch(f"{spec.family.value} is not defined in regime {regime.value}")
    return regime


# ---------------------------------------------------------------------------
# roots and the stable (C, S) kernel
# ---------------------------------------------------------------------------


def damping_rate(params: ModelParams, r):
    """a(r) = ν r^{2σ} / 2."""
    return 0.5 * params.nu * np.power(np.asarray(r, dtype=float), 2.0 * params.sigma)


def _freq2(params: ModelParams, r, a):
    # ω² = r² - a², factored to keep the near-critical case accurate
    if params.sigma == 0.5:
        h = 0.5 * params.nu
        return r * r * ((1.0 - h) * (1.0 + h))
    return (r - a) * (r + a)


def _roots(params: ModelParams, r):
    """Return (λ+, λ-) as complex arrays for r > 0."""
    r = np.asarray(r, dtype=float)
    a = damping_rate(params, r)
    w2 = _freq2(params, r, a)
    om = np.sqrt(np.abs(w2))
    over = w2 < 0
    with np.errstate(divide="ignore", invalid="ignore"):
        lp_real = -(r * r) / (a + om)
    lam_p = np.where(over, lp_real + 0j, -a + 1j * om)
    lam_m = np.where(over, -(a + om) + 0j, -a - 1j * om)
    return lam_p, lam_m


def lambda_pm(params: ModelParams, r: float) -> tuple[complex, complex]:
    """Roots of λ² + ν r^{2σ} λ + r² = 0, larger real part first.

    The small-magnitude real root is taken from λ+ λ- = r² so it keeps full
    relative accuracy as r → 0.
    """
    if not r > 0:
        raise ValueError("lambda_pm needs r > 0")
    lp, lm = _roots(params, np.array([float(r)]))
    return complex(lp[0]), complex(lm[0])


def phi_sigma(params: ModelParams, r: float) -> float:
    """sqrt(1 - ν² r^{4σ-2} / 4), the frequency factor of the K family."""
    if params.sigma <= 0.5:
        raise RegimeMismatch("phi_sigma is defined for sigma > 1/2")
    if r == 0:
        return 1.0
    x = 1.0 - 0.25 * params.nu ** 2 * r ** (4.0 * params.sigma - 2.0)
    if x < 0:
        raise OutOfRealBranch(f"r={r} lies beyond the real branch of phi_sigma")
    return math.sqrt(x)


def _phi1(x):
    """(1 - e^{-x}) / x, with the removable value 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-300
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.expm1(-x) / np.where(small, 1.0, x)
    return np.where(small, 1.0, out)


def _cs(params: ModelParams, t: float, r):
    """Return a, ω², C, S and D = C - aS at time t for radii r >= 0."""
    r = np.asarray(r, dtype=float)
    a = damping_rate(params, r)
    w2 = _freq2(params, r, a)
    over = w2 < 0
    om = np.sqrt(np.where(over, 0.0, w2))
    kap = np.sqrt(np.where(over, -w2, 0.0))

    ea = np.exp(-a * t)
    c_osc = ea * np.cos(om * t)
    s_osc = ea * t * np.sinc(om * t / np.pi)
    d_osc = c_osc - a * s_osc

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        apk = np.where(over, a + kap, 1.0)
        lam_p = -(r * r) / apk
        e_p = np.exp(lam_p * t)
        e_m = np.exp(-apk * t)
        s_ovr = t * e_p * _phi1(2.0 * kap * t)
        c_ovr = 0.5 * (e_p + e_m)
        # strongly overdamped: C - aS = (λ+ e+ - λ- e-) / (2κ) avoids cancellation
        d_split = (lam_p * e_p + apk * e_m) / np.where(kap > 0, 2.0 * kap, 1.0)
        d_ovr = np.where(kap > 0.25 * a, d_split, c_ovr - a * s_ovr)

    C = np.where(over, c_ovr, c_osc)
    S = np.where(over, s_ovr, s_osc)
    D = np.where(over, d_ovr, d_osc)
    return a, w2, C, S, D


# ---------------------------------------------------------------------------
# symbol evaluation
# ---------------------------------------------------------------------------


def _j_family(family: Family, ell: int, params: ModelParams, t: float, r):
    out = np.empty(r.shape, dtype=complex)
    zero = r == 0
    pos = ~zero
    if np.any(pos):
        rp = r[pos]
        lp, lm = _roots(params, rp)
        # individual terms diverge at the double-root radius (only their sums
        # stay finite there), so that single point comes back as inf/nan
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / (lp - lm)
        ep = np.exp(lp * t)
        em = np.exp(lm * t)
        with np.errstate(invalid="ignore"):
            if family is Family.J1:
                val, rate = -lm * ep * inv, lp
            elif family is Family.J2:
                val, rate = ep * inv, lp
            elif family is Family.J3:
                val, rate = lp * em * inv, lm
            else:
                # C2 = (λ+ û0 - û1)/(λ+ - λ-), so the û1 weight on e^{λ- t} is negative
                val, rate = -em * inv, lm
        out[pos] = val * rate if ell else val
    if np.any(zero):
        # removable limits as r → 0: λ± → 0 with λ+/(λ+ - λ-) → 0
        limits = {
            (Family.J1, 0): 1.0,
            (Family.J1, 1): 0.0,
            (Family.J3, 0): 0.0,
            (Family.J3, 1): 0.0,
            (Family.J2, 1): 0.0,
            (Family.J4, 1): 1.0,
        }
        if (family, ell) not in limits:
            raise SingularAtZero(f"{family.value} is singular at r = 0")
        out[zero] = limits[(family, ell)]
    return out


def _subhalf_heat(params: ModelParams, t: float, r):
    beta = 2.0 * (1.0 - params.sigma)
    rb = np.power(r, beta)
    return rb, np.exp(-t * rb / params.nu)


def _profile(family: Family, ell: int, params: ModelParams, regime: Regime, t: float, r):
    s, nu = params.sigma, params.nu
    if family in _HYBRID or regime is Regime.SUPER_HALF:
        a = damping_rate(params, r)
        ea = np.exp(-a * t)
        cos_, sin_ = np.cos(t * r), np.sin(t * r)
        if family is Family.ProfileG:
            sinc_t = t * np.sinc(t * r / np.pi)  # sin(tr)/r
            if ell == 0:
                return ea * sinc_t
            return ea * (cos_ - a * sinc_t)
        if family in (Family.ProfileH, Family.ProfileCosHybrid):
            if ell == 0:
                return ea * cos_
            return ea * (-a * cos_ - r * sin_)
        if ell == 0:
            return ea * sin_
        return ea * (-a * sin_ + r * cos_)

    if regime is Regime.SUB_HALF:
        rb, heat = _subhalf_heat(params, t, r)
        if family is Family.ProfileH:
            return heat * (-rb / nu) if ell else heat
        if ell == 1:
            # -(r^{2-2σ}/ν) e^{..} / (ν r^{2σ}) = -r^{2-4σ} e^{..} / ν²
            return -np.power(r, 2.0 - 4.0 * s) * heat / nu ** 2
        if np.any(r == 0):
            raise SingularAtZero("ProfileG is singular at r = 0 for sigma < 1/2")
        return heat / (nu * np.power(r, 2.0 * s))

    # σ = 1/2: G is the sin-type member, H the sum of cos- and a*sin-type members
    a, _, C, S, D = _cs(params, t, r)
    if family is Family.ProfileG:
        return D if ell else S
    return -(r * r) * S if ell else C + a * S


def _cs_family(family: Family, ell: int, params: ModelParams, t: float, r):
    a, w2, C, S, D = _cs(params, t, r)
    if family in _COS_TYPE:
        return -a * C - w2 * S if ell else C
    if family in _ASIN_TYPE:
        return a * D if ell else a * S
    return D if ell else S


def eval_symbol(
    spec: SymbolSpec,
    params: ModelParams,
    t: float,
    r,
    bands: CutoffBands | None = None,
):
    """Value of the multiplier (or its t-derivative when spec.ell == 1) at (t, r).

    Returns a Python complex for scalar ``r`` and a complex array otherwise.
    The band cut-off is applied unless ``spec.band`` is FULL.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    regime = check_regime(spec, params)
    scalar = np.ndim(r) == 0
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(rr < 0):
        raise ValueError("radius must be non-negative")

    fam = spec.family
    if fam in _J:
        val = _j_family(fam, spec.ell, params, t, rr)
    elif fam in (_K | _JT | _KT | _E):
        val = _cs_family(fam, spec.ell, params, t, rr)
    else:
        val = _profile(fam, spec.ell, params, regime, t, rr)

    val = np.asarray(val, dtype=complex)
    if spec.band is not Band.FULL:
        bands = bands or CutoffBands.for_params(params)
        val = val * bands.weight(spec.band, rr)
    return complex(val[0]) if scalar else val


def solution_multipliers(params: ModelParams, t: float, r, ell: int = 0):
    """Multipliers (m0, m1) with ∂_t^ℓ û(t) = m0 û0 + m1 û1, for all regimes.

    Equal to the regime's operator sum (J1+J3, J2+J4 / K1+K2, K3 / ...), but
    written through the stable (C, S) kernel so it stays finite where the
    individual J terms blow up at colliding roots.
    """
    a, w2, C, S, D = _cs(params, t, np.asarray(r, dtype=float))
    if ell == 0:
        return C + a * S, S
    r = np.asarray(r, dtype=float)
    return -(r * r) * S, D


def solution_hat(params: ModelParams, t: float, r: float, u0_hat: complex, u1_hat: complex, ell: int = 0) -> complex:
    if t < 0:
        raise ValueError("t must be non-negative")
    if ell not in (0, 1):
        raise ValueError("ell must be 0 or 1")
    if t == 0:
        return complex(u1_hat if ell else u0_hat)
    m0, m1 = solution_multipliers(params, t, np.array([float(r)]), ell)
    return complex(m0[0] * u0_hat + m1[0] * u1_hat)


# ---------------------------------------------------------------------------
# multipliers with the metadata the quadrature engine needs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnvTerm:
    """Upper-envelope term ``M r^q exp(-d r^beta)``."""

    M: float
    q: float
    d: float = 0.0
    beta: float = 1.0


@dataclass(frozen=True)
class Multiplier:
    """A radial multiplier m(t, r) plus what the quadrature needs to know about it.

    ``envelope(t)`` returns terms whose sum bounds |m(t, r)| for r >= r_min.
    ``singular_order`` is s in the t-uniform bound |m| <~ r^{-s} near 0.
    """

    func: Callable[[float, np.ndarray], np.ndarray]
    envelope: Callable[[float], Sequence[EnvTerm]]
    singular_order: float = 0.0
    r_min: float = 1.0
    label: str = ""

    def __call__(self, t: float, r) -> np.ndarray:
        return np.asarray(self.func(t, np.asarray(r, dtype=float)), dtype=complex)

    def __sub__(self, other: "Multiplier") -> "Multiplier":
        return self + other.scaled(-1.0)

    def __add__(self, other: "Multiplier") -> "Multiplier":
        f, g = self.func, other.func
        e1, e2 = self.envelope, other.envelope
        return Multiplier(
            func=lambda t, r: np.asarray(f(t, r), dtype=complex) + np.asarray(g(t, r), dtype=complex),
            envelope=lambda t: [*e1(t), *e2(t)],
            singular_order=max(self.singular_order, other.singular_order),
            r_min=max(self.r_min, other.r_min),
            label=f"({self.label} + {other.label})",
        )

    def scaled(self, c: complex) -> "Multiplier":
        f, e = self.func, self.envelope
        ac = abs(c)
        return Multiplier(
            func=lambda t, r: c * np.asarray(f(t, r), dtype=complex),
            envelope=lambda t: [EnvTerm(ac * x.M, x.q, x.d, x.beta) for x in e(t)],
            singular_order=self.singular_order,
            r_min=self.r_min,
            label=f"{c}*{self.label}",
        )

    def weighted(self, power: float, sign: float = 1.0) -> "Multiplier":
        """sign * r^power * m, with power >= 0."""
        f, e = self.func, self.envelope
        return Multiplier(
            func=lambda t, r: sign * np.power(r, power) * np.asarray(f(t, r), dtype=complex),
            envelope=lambda t: [EnvTerm(x.M, x.q + power, x.d, x.beta) for x in e(t)],
            singular_order=self.singular_order - power,
            r_min=self.r_min,
            label=f"r^{power}*{self.label}",
        )


def constant_multiplier(value: complex = 1.0) -> Multiplier:
    v = complex(value)
    return Multiplier(
        func=lambda t, r: np.full(np.shape(r), v, dtype=complex),
        envelope=lambda t: [EnvTerm(abs(v), 0.0)],
        label=f"const({value})",
    )


def _half_decay(nu: float) -> float:
    """d with |G|, |H| <~ e^{-d t r} at σ = 1/2 (the slow root is -d r)."""
    if nu < 2.0:
        return nu / 2.0
    if nu == 2.0:
        return 1.0
    return 0.5 * (nu - math.sqrt(nu * nu - 4.0))


def singular_order(spec: SymbolSpec, params: ModelParams) -> float:
    regime = classify_regime(params)
    fam, ell = spec.family, spec.ell
    if ell == 1:
        return 0.0
    if fam in (Family.J2, Family.J4):
        return 2.0 * params.sigma
    if fam is Family.ProfileG and regime is Regime.SUB_HALF:
        return 2.0 * params.sigma
    if fam is Family.K3 or (fam is Family.ProfileG and regime is Regime.SUPER_HALF):
        return 1.0
    return 0.0


def _envelope(spec: SymbolSpec, params: ModelParams, t: float) -> tuple[list[EnvTerm], float]:
    """Envelope terms bounding |m(t, r)| for r >= r_min (r_min >= 1, so r^{2σ} <= r²)."""
    regime = classify_regime(params)
    fam, ell, nu, s = spec.family, spec.ell, params.nu, params.sigma
    if fam in _COS_TYPE:
        return ([EnvTerm(nu + 1.0, 2.0)] if ell else [EnvTerm(1.0, 0.0)]), 1.0
    if fam in _SIN_TYPE:
        return ([EnvTerm(1.0 + 0.5 * nu * t, 2.0)] if ell else [EnvTerm(t, 0.0)]), 1.0
    if fam in _ASIN_TYPE:
        if ell:
            return [EnvTerm(0.5 * nu * (1.0 + 0.5 * nu * t), 4.0)], 1.0
        return [EnvTerm(0.5 * nu * t, 2.0)], 1.0
    if fam in _J:
        # beyond ν^{1/(1-2σ)} the roots are complex with |Im| >= (√3/2) r
        r_min = max(1.0, nu ** (1.0 / (1.0 - 2.0 * s)))
        return [EnvTerm(1.0, float(ell))], r_min
    if regime is Regime.SUB_HALF:
        beta = 2.0 * (1.0 - s)
        d = t / nu
        if fam is Family.ProfileG:
            return [EnvTerm(1.0 / nu ** (1 + ell), beta * ell, d, beta)], 1.0
        return [EnvTerm(1.0 / nu ** ell, beta * ell, d, beta)], 1.0
    if regime.is_half:
        d = _half_decay(nu) * t
        if fam is Family.ProfileG:
            term = EnvTerm(1.0 + 0.5 * nu * t, 1.0, d, 1.0) if ell else EnvTerm(t, 0.0, d, 1.0)
        else:
            term = EnvTerm(t, 2.0, d, 1.0) if ell else EnvTerm(1.0 + 0.5 * nu * t, 1.0, d, 1.0)
        return [term], 1.0
    d = 0.5 * nu * t
    if fam is Family.ProfileG:
        return [EnvTerm(1.0 + 0.5 * nu, 1.0, d, 2 * s) if ell else EnvTerm(1.0, 0.0, d, 2 * s)], 1.0
    return [EnvTerm(1.0 + 0.5 * nu, 2.0, d, 2 * s) if ell else EnvTerm(1.0, 0.0, d, 2 * s)], 1.0


def symbol_multiplier(spec: SymbolSpec, params: ModelParams, bands: CutoffBands | None = None) -> Multiplier:
    check_regime(spec, params)
    terms_at_1, r_min = _envelope(spec, params, 1.0)
    return Multiplier(
        func=lambda t, r: eval_symbol(spec, params, t, r, bands=bands),
        envelope=lambda t: _envelope(spec, params, t)[0],
        singular_order=singular_order(spec, params),
        r_min=r_min,
        label=f"{spec.family.value}[{spec.band.value},l={spec.ell}]",
    )


def solution_multiplier(params: ModelParams, problem: str, ell: int = 0) -> Multiplier:
    """Multiplier of the u0-driven (``problem='u0'``) or u1-driven solution operator."""
    nu = params.nu
    idx = 0 if problem == "u0" else 1
    if problem not in ("u0", "u1"):
        raise ValueError(f"problem must be 'u0' or 'u1', got {problem!r}")

    def func(t, r):
        return solution_multipliers(params, t, r, ell)[idx]

    if problem == "u0":
        env = (lambda t: [EnvTerm(t, 2.0)]) if ell else (lambda t: [EnvTerm(1.0 + 0.5 * nu * t, 2.0)])
        order = 0.0
    else:
        env = (lambda t: [EnvTerm(1.0 + 0.5 * nu * t, 2.0)]) if ell else (lambda t: [EnvTerm(t, 0.0)])
        regime = classify_regime(params)
        if ell == 1:
            order = 0.0
        elif regime is Regime.SUB_HALF:
            order = 2.0 * params.sigma
        elif regime is Regime.SUPER_HALF:
            order = 1.0
        else:
            order = 0.0
    return Multiplier(func=func, envelope=env, singular_order=order, r_min=1.0, label=f"U[{problem},l={ell}]")
