"""Radial initial data with closed-form Fourier transforms.

Fourier transforms use the unitary convention ``f̂(ξ) = (2π)^{-n/2} ∫ e^{-ix·ξ} f(x) dx``,
so the total mass is ``(2π)^{n/2} f̂(0)`` and the unit Gaussian is self-dual.
Every datum reports a Gaussian envelope for its transform, which the
quadrature uses to truncate the radial integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams
from .symbols import EnvTerm

KINDS = ("gaussian", "gaussdiff", "bump")


@dataclass(frozen=True)
class RadialDatum:
    """One catalog entry.

    gaussian   e^{-|x|²/(2a²)}
    gaussdiff  e^{-|x|²/(2a²)} - (a/b)^n e^{-|x|²/(2b²)}   (mean zero)
    bump       (1 + |x|²/(2a²)) e^{-|x|²/(2a²)}
    """

    kind: str
    a: float = 1.0
    b: float = 2.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParams(f"unknown datum kind {self.kind!r}; expected one of {KINDS}")
        if not (self.a > 0 and self.b > 0):
            raise InvalidParams("datum widths must be positive")
        if self.kind == "gaussdiff" and self.a == self.b:
            raise InvalidParams("gaussdiff needs two different widths")

    @property
    def id(self) -> str:
        if self.kind == "gaussdiff":
            return f"gaussdiff:{self.a:g}:{self.b:g}"
        return f"{self.kind}:{self.a:g}"

    @property
    def mean_zero(self) -> bool:
        return self.kind == "gaussdiff"

    def fourier(self, n: int, r):
        return datum_fourier(self, n, r)

    def moment(self, n: int) -> float:
        return datum_moment(self, n)

    def envelope(self, n: int) -> EnvTerm:
        """|f̂(r)| <= M exp(-d r²) for all r >= 0."""
        a, b = self.a, self.b
        if self.kind == "gaussian":
            return EnvTerm(a**n, 0.0, a * a / 2.0, 2.0)
        if self.kind == "gaussdiff":
            m = min(a, b)
            return EnvTerm(a**n, 0.0, m * m / 2.0, 2.0)
        # (1 + n/2 - x) e^{-x} <= (1 + n/2 + 2/e) e^{-x/2},  x = a²r²/2
        return EnvTerm(a**n * (1.0 + n / 2.0 + 2.0 / math.e), 0.0, a * a / 4.0, 2.0)

    def l1_norm_bound(self, n: int) -> float:
        mass = (2.0 * math.pi) ** (n / 2.0)
        if self.kind == "gaussian":
            return mass * self.a**n
        if self.kind == "gaussdiff":
            return 2.0 * mass * self.a**n
        return mass * self.a**n * (1.0 + n / 2.0)


def parse_datum(spec: str | RadialDatum) -> RadialDatum:
    """Parse ``gaussian[:a]``, ``gaussdiff[:a[:b]]`` or ``bump[:a]``."""
    if isinstance(spec, RadialDatum):
        return spec
    parts = str(spec).strip().lower().split(":")
    kind = parts[0]
    try:
        nums = [float(x) for x in parts[1:]]
    except ValueError as exc:
        raise InvalidParams(f"bad datum id {spec!r}") from exc
    if kind not in KINDS or len(nums) > (2 if kind == "gaussdiff" else 1):
        raise InvalidParams(f"bad datum id {spec!r}")
    return RadialDatum(kind, *nums)


def datum_fourier(datum: RadialDatum, n: int, r):
    """Radial profile of the transform at |ξ| = r (scalar in, float out)."""
    scalar = np.ndim(r) == 0
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    a, b = datum.a, datum.b
    if datum.kind == "gaussian":
        val = a**n * np.exp(-0.5 * (a * r) ** 2)
    elif datum.kind == "gaussdiff":
        val = a**n * (np.exp(-0.5 * (a * r) ** 2) - np.exp(-0.5 * (b * r) ** 2))
    else:
        x = 0.5 * (a * r) ** 2
        val = a**n * np.exp(-x) * (1.0 + n / 2.0 - x)
    return float(val) if scalar else val


def datum_moment(datum: RadialDatum, n: int) -> float:
    """∫ u dx, exact."""
    if datum.kind == "gaussdiff":
        return 0.0
    mass = (2.0 * math.pi) ** (n / 2.0) * datum.a**n
    if datum.kind == "gaussian":
        return mass
    return mass * (1.0 + n / 2.0)
