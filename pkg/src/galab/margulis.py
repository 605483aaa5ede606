"""Measures of maximal entropy for expanding circle maps and the CDF coordinate.

The model map is ``g(x) = d x + (eps / 2 pi) sin(2 pi x) mod 1``.  Its measure
of maximal entropy is the weak limit of uniform measures on ``g^-D(0)``; the
CDF ``F`` of that measure conjugates ``g`` to ``y -> d y``, so in the new
coordinate the expansion is constant.  On the suspension with constant roof
``c`` the leaf measures ``e^{lambda u} nu`` with ``lambda = log(d)/c`` scale
exactly like the Margulis family along the flow.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import InvalidInputError, NonConvergenceError

NEWTON_TOL = 1e-15
STENCIL = 4  # central-difference half width in grid cells


class CircleMap(Protocol):
    """Degree-d expanding circle map given by an increasing lift ``G``."""

    degree: int

    def lift(self, x: np.ndarray) -> np.ndarray: ...

    def preimages(self, y: np.ndarray) -> np.ndarray:
        """All ``x`` in [0, 1) with ``G(x) = y + j``; shape (d, len(y)), ordered by j."""
        ...


@dataclass(frozen=True)
class ExpandingMap:
    degree: int
    eps: float = 0.0

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 2:
            raise InvalidInputError("degree must be an integer >= 2")
        if abs(self.eps) > self.degree - 1.1:
            raise InvalidInputError("|eps| must be <= d - 1.1 so that g' > 1")

    def lift(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.degree * x + self.eps / (2 * math.pi) * np.sin(2 * math.pi * x)

    def derivative(self, x: np.ndarray) -> np.ndarray:
        return self.degree + self.eps * np.cos(2 * math.pi * np.asarray(x, dtype=float))

    def preimages(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        d = self.degree
        target = y[None, :] + np.arange(d)[:, None]
        x = target / d
        if self.eps == 0.0:
            return x
        for _ in range(60):
            step = (self.lift(x) - target) / self.derivative(x)
            x = x - step
            if np.abs(step).max() <= NEWTON_TOL:
                break
        else:
            raise NonConvergenceError("Newton iteration for preimages did not converge")
        return x


@dataclass(frozen=True)
class GridMap:
    """Circle map known by its lift on a uniform grid, linearly interpolated."""

    values: np.ndarray  # lift at y_i = i/N, i = 0..N (values[N] = values[0] + d)
    degree: int

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, len(self.values))

    def lift(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = np.floor(x)
        return np.interp(x - k, self.nodes, self.values) + self.degree * k

    def preimages(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        v0 = self.values[0]
        target = y[None, :] + np.arange(self.degree)[:, None]
        # move targets into the range [v0, v0 + d) of the lift on [0, 1]
        target = v0 + np.mod(target - v0, self.degree)
        return np.interp(target, self.values, self.nodes)


# --- measure of maximal entropy ------------------------------------------------------


@dataclass
class LeafMeasureCDF:
    """Piecewise linear CDF through the preimage-tree knots ``(x_j, j/N)``."""

    knots: np.ndarray  # x_0 = 0 < x_1 < ... < x_N = 1
    values: np.ndarray  # j / N
    depth: int

    def __post_init__(self):
        if np.any(np.diff(self.knots) <= 0) or np.any(np.diff(self.values) <= 0):
            raise InvalidInputError("CDF must be strictly increasing")

    @property
    def resolution(self) -> int:
        return len(self.knots) - 1

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """``F`` extended to the line by ``F(x + 1) = F(x) + 1``."""
        x = np.asarray(x, dtype=float)
        k = np.floor(x)
        return np.interp(x - k, self.knots, self.values) + k

    def inverse(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        k = np.floor(u)
        return np.interp(u - k, self.values, self.knots) + k

    def on_grid(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        if 2**m > self.resolution:
            raise InvalidInputError(f"resolution 2^{m} exceeds the {self.resolution} preimage knots")
        y = np.linspace(0.0, 1.0, 2**m + 1)
        return y, self(y)

    def to_csv(self, m: int) -> str:
        y, F = self.on_grid(m)
        buf = io.StringIO()
        buf.write("y,F\n")
        for a, b in zip(y.tolist(), F.tolist()):
            buf.write(f"{a!r},{b!r}\n")
        return buf.getvalue()


MAX_DEPTH_POINTS = 2**25


def preimage_tree(g: CircleMap, depth: int) -> np.ndarray:
    """Sorted ``g^-depth(0)`` in [0, 1)."""
    if depth < 0:
        raise InvalidInputError("depth must be >= 0")
    if g.degree**depth > MAX_DEPTH_POINTS:
        raise InvalidInputError(f"preimage tree of size {g.degree}^{depth} is too large")
    pts = np.zeros(1)
    for _ in range(depth):
        # branch-major order keeps the level sorted since each branch is increasing
        pts = g.preimages(pts).ravel()
    pts = np.mod(pts, 1.0)
    pts.sort()
    return pts


def mme_cdf(g: CircleMap, depth: int) -> LeafMeasureCDF:
    """CDF of the uniform measure on ``g^-depth(0)``, linearly interpolated."""
    pts = preimage_tree(g, depth)
    N = len(pts)
    knots = np.append(pts, 1.0)
    knots[0] = 0.0
    return LeafMeasureCDF(knots, np.arange(N + 1) / N, depth)


def conjugacy_limit(g: ExpandingMap, x: np.ndarray, n: int = 40) -> np.ndarray:
    """Oracle for the CDF: ``h(x) = lim G^n(x) / d^n``, from the lift only.

    Unrolls ``h(x) = (k + h(G(x) - k)) / d`` with ``k = floor(G(x))``.
    """
    x = np.asarray(x, dtype=float)
    d = g.degree
    acc = np.zeros_like(x)
    cur = x.copy()
    scale = 1.0
    for _ in range(n):
        y = g.lift(cur)
        k = np.floor(y)
        scale /= d
        acc += k * scale
        cur = y - k
    return acc + cur * scale


def scaling_residual(g: ExpandingMap, F: LeafMeasureCDF, n_intervals: int = 100, seed: int = 0, max_width: float = 0.05) -> float:
    """Max of ``|nu(g(I)) - d nu(I)|`` over random intervals inside one branch."""
    rng = np.random.default_rng(seed)
    a = rng.random(n_intervals)
    w = rng.random(n_intervals) * max_width
    b = a + w
    Ga, Gb = g.lift(a), g.lift(b)
    if np.any(Gb - Ga >= 1):
        raise AssertionError("sampled interval is not inside an injectivity branch")
    mu = F(b) - F(a)
    mu_img = F(Gb) - F(Ga)
    return float(np.abs(mu_img - g.degree * mu).max())


def depth_agreement(g: CircleMap, depth: int, m: int = 12) -> float:
    """``max |F_depth - F_{depth+2}|`` on a uniform grid of 2^m cells."""
    y = np.linspace(0.0, 1.0, 2**m + 1)
    return float(np.abs(mme_cdf(g, depth)(y) - mme_cdf(g, depth + 2)(y)).max())


# --- linearization ---------------------------------------------------------------------


@dataclass
class Linearized:
    hat: GridMap
    resolution: int
    max_deviation: float
    derivative: np.ndarray

    def as_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "degree": self.hat.degree,
            "max_derivative_deviation": self.max_deviation,
            "derivative_range": [float(self.derivative.min()), float(self.derivative.max())],
        }


def linearize(g: CircleMap, F: LeafMeasureCDF, m: int | None = None) -> Linearized:
    """``g_hat = F o g o F^-1`` on the grid ``y_i = i/2^m`` with its derivative.

    The derivative uses central differences over ``2*STENCIL`` cells.
    """
    if np.any(np.diff(F.knots) <= 0):
        raise InvalidInputError("F must be strictly increasing")
    if m is None:
        m = int(round(math.log2(F.resolution)))
    N = 2**m
    if N > F.resolution:
        raise InvalidInputError(f"resolution 2^{m} exceeds the {F.resolution} knots of F")
    y = np.arange(N + 1) / N
    vals = F(g.lift(F.inverse(y)))
    vals[-1] = vals[0] + g.degree
    hat = GridMap(vals, g.degree)
    # periodic extension of the lift for the stencil
    ext = np.concatenate([vals[-STENCIL - 1 : -1] - g.degree, vals, vals[1 : STENCIL + 1] + g.degree])
    der = (ext[2 * STENCIL :] - ext[: -2 * STENCIL]) * N / (2 * STENCIL)
    dev = float(np.abs(der - g.degree).max())
    return Linearized(hat, N, dev, der)


# --- holonomy Radon-Nikodym check -------------------------------------------------------


def holonomy_rn_check(g: ExpandingMap, F: LeafMeasureCDF, c: float = 1.0, samples: int = 100, seed: int = 0, half_width: float = 1e-3, eta_max: float = 3.0) -> dict:
    """Finite-difference RN derivative of the transported leaf measures.

    Leaf measures on the suspension with roof ``c`` are ``mu_u = e^{lambda u} nu``
    at fiber height ``u``.  For ``q = Phi^eta(p)`` and the holonomy from the
    leaf of ``q`` back to the leaf of ``p``, the derivative
    ``mu_p(A) / mu_q(Phi^eta A)`` must equal ``exp(-lambda eta)``.
    """
    if c <= 0:
        raise InvalidInputError("roof must be positive")
    lam = math.log(g.degree) / c
    rng = np.random.default_rng(seed)
    x = rng.random(samples)
    u = rng.random(samples) * c
    eta = rng.random(samples) * eta_max * c
    eta[0] = 0.0
    a, b = x - half_width, x + half_width
    mu_p = np.exp(lam * u) * (F(b) - F(a))
    # flow the interval for time eta: each roof crossing applies g
    h = u + eta
    k = np.floor(h / c).astype(int)
    ga, gb = a.copy(), b.copy()
    for i in range(int(k.max(initial=0))):
        go = k > i
        ga = np.where(go, g.lift(ga), ga)
        gb = np.where(go, g.lift(gb), gb)
    mu_q = np.exp(lam * (h - k * c)) * (F(gb) - F(ga))
    ratio = mu_p / mu_q
    expected = np.exp(-lam * eta)
    resid = np.abs(ratio / expected - 1.0)
    return {
        "lambda": lam,
        "samples": samples,
        "seed": seed,
        "max_residual": float(resid.max()),
        "eta_zero_ratio": float(ratio[0]),
        "passed": bool(resid.max() <= 1e-3),
    }


# --- regularity ---------------------------------------------------------------------------


def regularity_diagnostic(F: LeafMeasureCDF, m: int | None = None, k_range: tuple[int, int] = (4, 14)) -> dict:
    """Holder exponent of ``F`` from a log-log fit of its dyadic moduli of continuity."""
    if m is None:
        m = min(int(round(math.log2(F.resolution))), 20)
    y, Fy = F.on_grid(m)
    lo, hi = k_range
    hi = min(hi, m - 2)
    if hi - lo < 2:
        raise InvalidInputError("grid too coarse for the regularity fit")
    hs, mods = [], []
    for k in range(lo, hi + 1):
        step = 2 ** (m - k)
        mods.append(float((Fy[step:] - Fy[:-step]).max()))
        hs.append(2.0**-k)
    slope, _ = np.polyfit(np.log(hs), np.log(mods), 1)
    return {"exponent": float(slope), "h": hs, "modulus": mods, "grid": m}
