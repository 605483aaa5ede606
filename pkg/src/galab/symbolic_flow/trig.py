"""Trigonometric polynomials on the 2-torus.

``f(x) = c + sum_k a_k cos(2 pi k.x) + b_k sin(2 pi k.x)``.  Composition with
an integer matrix stays in the class: ``f(A x)`` has frequencies ``A^T k``,
which is how planted coboundaries ``b - b o A`` are built exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError
from .toral import ToralAuto

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class TrigPoly:
    const: float = 0.0
    terms: tuple[tuple[tuple[int, int], float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        clean = []
        for k, a, b in self.terms:
            k = (int(k[0]), int(k[1]))
            clean.append((k, float(a), float(b)))
        object.__setattr__(self, "terms", tuple(clean))
        if not math.isfinite(self.const) or any(not (math.isfinite(a) and math.isfinite(b)) for _, a, b in clean):
            raise InvalidInputError("coefficients must be finite")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at float points ``x`` of shape (..., 2)."""
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape[:-1], self.const)
        for (k1, k2), a, b in self.terms:
            ph = TWO_PI * (k1 * x[..., 0] + k2 * x[..., 1])
            if a:
                out = out + a * np.cos(ph)
            if b:
                out = out + b * np.sin(ph)
        return out

    def at_rational(self, num: np.ndarray, den: int) -> np.ndarray:
        """Evaluate at ``num/den``, reducing phases mod 1 in exact integers first."""
        out = np.full(num.shape[:-1], self.const)
        for (k1, k2), a, b in self.terms:
            ph = TWO_PI * (((k1 * num[..., 0] + k2 * num[..., 1]) % den) / den)
            if a:
                out = out + a * np.cos(ph)
            if b:
                out = out + b * np.sin(ph)
        return out

    def __add__(self, other: "TrigPoly | float") -> "TrigPoly":
        if not isinstance(other, TrigPoly):
            return TrigPoly(self.const + float(other), self.terms)
        return TrigPoly(self.const + other.const, self.terms + other.terms)

    __radd__ = __add__

    def scale(self, s: float) -> "TrigPoly":
        return TrigPoly(s * self.const, tuple((k, s * a, s * b) for k, a, b in self.terms))

    def __neg__(self) -> "TrigPoly":
        return self.scale(-1.0)

    def __sub__(self, other: "TrigPoly | float") -> "TrigPoly":
        if not isinstance(other, TrigPoly):
            return self + (-float(other))
        return self + (-other)

    def compose(self, auto: ToralAuto) -> "TrigPoly":
        """``x -> f(A x)``."""
        (a, b), (c, d) = auto.A
        terms = tuple(((a * k1 + c * k2, b * k1 + d * k2), ca, sb) for (k1, k2), ca, sb in self.terms)
        return TrigPoly(self.const, terms)

    def lipschitz_bound(self) -> float:
        """Upper bound for the sup norm of the gradient (max-norm on the torus)."""
        return sum(TWO_PI * (abs(k1) + abs(k2)) * math.hypot(a, b) for (k1, k2), a, b in self.terms)

    def sup_bound(self) -> float:
        return abs(self.const) + sum(math.hypot(a, b) for _, a, b in self.terms)


def constant(c: float) -> TrigPoly:
    return TrigPoly(float(c))


def coboundary(b: TrigPoly, auto: ToralAuto) -> TrigPoly:
    """Planted coboundary ``b - b o A``; its orbit sums vanish identically."""
    return b - b.compose(auto)


GRID = 256


@dataclass(frozen=True)
class RoofFunction:
    """Positive roof ``r = c + trig``.  Positivity is checked on a grid.

    The grid minimum must exceed ten times the worst variation inside a cell,
    which then certifies a positive minimum everywhere.
    """

    poly: TrigPoly

    def __post_init__(self):
        if self.grid_min() <= 10 * self.cell_variation():
            raise InvalidInputError(f"roof not certified positive (grid min {self.grid_min():.3g})")

    @property
    def c(self) -> float:
        return self.poly.const

    def cell_variation(self) -> float:
        return self.poly.lipschitz_bound() * (0.5 / GRID)

    def grid_min(self) -> float:
        g = (np.arange(GRID) + 0.0) / GRID
        X, Y = np.meshgrid(g, g, indexing="ij")
        return float(self.poly(np.stack([X, Y], axis=-1)).min())

    def lower_bound(self) -> float:
        return self.grid_min() - self.cell_variation()

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.poly(x)

    def at_rational(self, num: np.ndarray, den: int) -> np.ndarray:
        return self.poly.at_rational(num, den)

    def scale(self, s: float) -> "RoofFunction":
        return RoofFunction(self.poly.scale(s))

    def shift(self, a: float) -> "RoofFunction":
        return RoofFunction(self.poly + a)


def roof(c: float, terms=()) -> RoofFunction:
    return RoofFunction(TrigPoly(float(c), tuple(terms)))


@dataclass(frozen=True)
class SuspensionFlow:
    base: ToralAuto
    roof: RoofFunction
