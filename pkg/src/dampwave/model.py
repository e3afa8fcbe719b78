"""Problem parameters, regime classification, decay exponents and frequency bands.

The equation is ``u_tt - Δu + ν(-Δ)^σ u_t = 0`` on R^n.  Everything here is a
pure function of a :class:`ModelParams` instance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams

HALF = 0.5


@dataclass(frozen=True)
class ModelParams:
    n: int
    sigma: float
    nu: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise InvalidParams(f"dimension n must be a positive integer, got {self.n!r}")
        if not (0.0 < self.sigma <= 1.0) or not math.isfinite(self.sigma):
            raise InvalidParams(f"sigma must lie in (0, 1], got {self.sigma!r}")
        if not (self.nu > 0.0) or not math.isfinite(self.nu):
            raise InvalidParams(f"nu must be positive, got {self.nu!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "nu", float(self.nu))


class Regime(enum.Enum):
    SUB_HALF = "SubHalf"
    HALF_UNDERDAMPED = "HalfUnderdamped"
    HALF_CRITICAL = "HalfCritical"
    HALF_OVERDAMPED = "HalfOverdamped"
    SUPER_HALF = "SuperHalf"

    @property
    def is_half(self) -> bool:
        return self in (Regime.HALF_UNDERDAMPED, Regime.HALF_CRITICAL, Regime.HALF_OVERDAMPED)

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DerivativeIndex:
    """Spatial order ``k`` (applied as the weight |ξ|^k) and time order ``ell``."""

    k: float = 0.0
    ell: int = 0

    def __post_init__(self):
        if not (self.k >= 0.0) or not math.isfinite(self.k):
            raise InvalidParams(f"k must be a finite real >= 0, got {self.k!r}")
        if self.ell not in (0, 1):
            raise InvalidParams(f"ell must be 0 or 1, got {self.ell!r}")
        object.__setattr__(self, "k", float(self.k))


def classify_regime(params: ModelParams) -> Regime:
    # exact comparisons on purpose; near-critical inputs are handled by the
    # evaluators in `symbols`, not by fuzzy classification
    if params.sigma < HALF:
        return Regime.SUB_HALF
    if params.sigma > HALF:
        return Regime.SUPER_HALF
    if params.nu < 2.0:
        return Regime.HALF_UNDERDAMPED
    if params.nu == 2.0:
        return Regime.HALF_CRITICAL
    return Regime.HALF_OVERDAMPED


def is_admissible(params: ModelParams, k: float = 0.0, ell: int = 0) -> bool:
    """Dimension condition under which the decay and profile results hold.

    sigma < 1/2 needs n >= 2, sigma = 1/2 any n, sigma > 1/2 needs n >= 3
    unless ``k + ell > 3 - n``.
    """
    n, s = params.n, params.sigma
    if s < HALF:
        return n >= 2
    if s == HALF:
        return True
    return n >= 3 or (k + ell) > 3 - n


@dataclass(frozen=True)
class DecayExponents:
    gamma: float
    gamma_tilde: float


def decay_exponents(params: ModelParams, idx: DerivativeIndex | float = 0.0) -> DecayExponents:
    """Return (γ_{σ,k}, γ̃_{σ,k}).

    γ governs the u1-driven solution and the kernel G, γ̃ the u0-driven
    solution and the kernel H.  Both are continuous across σ = 1/2.
    """
    k = idx.k if isinstance(idx, DerivativeIndex) else float(idx)
    n, s = params.n, params.sigma
    if s < HALF:
        gamma = n / (4 * (1 - s)) - s / (1 - s) + k / (2 * (1 - s))
        gamma_tilde = n / (4 * (1 - s)) + k / (2 * (1 - s))
    elif s == HALF:
        gamma = n / 2 - 1 + k
        gamma_tilde = n / 2 + k
    else:
        gamma = n / (4 * s) - 1 / (2 * s) + k / (2 * s)
        gamma_tilde = n / (4 * s) + k / (2 * s)
    return DecayExponents(gamma, gamma_tilde)


def time_derivative_gain(params: ModelParams) -> float:
    """Extra decay bought by one time derivative: 1 for σ <= 1/2, 1/(2σ) above."""
    return 1.0 if params.sigma <= HALF else 1.0 / (2.0 * params.sigma)


def expected_rate(params: ModelParams, idx: DerivativeIndex, problem: str = "u1") -> float:
    """Decay exponent of ``||∂_t^ℓ ∇^k u(t)||_2`` for u1-driven or u0-driven data."""
    ex = decay_exponents(params, idx)
    if problem == "u1":
        base = ex.gamma
    elif problem == "u0":
        base = ex.gamma_tilde
    else:
        raise ValueError(f"problem must be 'u0' or 'u1', got {problem!r}")
    return base + idx.ell * time_derivative_gain(params)


def rho_max(params: ModelParams) -> float:
    """Strict upper bound on the low-band radius ρ."""
    s, nu = params.sigma, params.nu
    if s < HALF:
        return 0.5 * (nu / 2.0) ** (1.0 / (1.0 - 2.0 * s))
    if s == HALF:
        return 0.5
    return 0.5 * (2.0 / nu) ** (1.0 / (2.0 * s - 1.0))


def critical_radius(params: ModelParams) -> float:
    """Positive root of τ^(4σ-2) = 4/ν², where the characteristic roots collide.

    Infinite at σ = 1/2 (no collision unless ν = 2, when every radius is critical).
    """
    s, nu = params.sigma, params.nu
    if s == HALF:
        return math.inf
    return (2.0 / nu) ** (1.0 / (2.0 * s - 1.0))


class Band(enum.Enum):
    LOW = "Low"
    MID = "Mid"
    HIGH = "High"
    FULL = "Full"


def _smooth_step(x):
    """C^∞ step: 0 for x <= 0, 1 for x >= 1, exp(-1/x) blend in between."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(x > 0.0, np.exp(-1.0 / np.where(x > 0.0, x, 1.0)), 0.0)
        y = 1.0 - x
        b = np.where(y > 0.0, np.exp(-1.0 / np.where(y > 0.0, y, 1.0)), 0.0)
        out = a / (a + b)
    return out


@dataclass(frozen=True)
class CutoffBands:
    """Radial partition of unity χ_L + χ_M + χ_H = 1.

    χ_L is 1 on [0, ρ/2] and 0 from ρ on; χ_H is 0 up to 2 and 1 from 4 on.
    """

    rho: float

    def __post_init__(self):
        if not (0.0 < self.rho <= 2.0):
            raise InvalidParams(f"rho must lie in (0, 2] so the bands nest, got {self.rho!r}")

    @classmethod
    def for_params(cls, params: ModelParams) -> "CutoffBands":
        return cls(rho=min(rho_max(params) / 2.0, 2.0))

    def low(self, r):
        half = self.rho / 2.0
        return 1.0 - _smooth_step((np.asarray(r, dtype=float) - half) / half)

    def high(self, r):
        return _smooth_step((np.asarray(r, dtype=float) - 2.0) / 2.0)

    def mid(self, r):
        return 1.0 - self.low(r) - self.high(r)

    def weight(self, band: Band, r):
        if band is Band.FULL:
            return np.ones_like(np.asarray(r, dtype=float))
        if band is Band.LOW:
            return self.low(r)
        if band is Band.MID:
            return self.mid(r)
        return self.high(r)


def cutoff_eval(bands: CutoffBands, r: float) -> tuple[float, float, float]:
    if r < 0:
        raise ValueError("radius must be non-negative")
    lo = float(bands.low(r))
    hi = float(bands.high(r))
    return lo, 1.0 - lo - hi, hi
