"""Coboundary recovery from periodic data and the averaging smoother.

Discrete side: if ``S_n f = 0`` on every periodic orbit then ``f = b - b o A``
and ``b`` can be read off each orbit by partial sums.

Flow side: a cocycle over the suspension is given by its increment ``G(x)``
per passage through the fiber over ``x``.  Its generator is ``G/r`` along the
fiber, so ``alpha(p, t)`` is piecewise linear in ``t`` and known in closed
form.  The smoother ``beta(p) = (1/T) int_0^T alpha(p, s) ds`` upgrades a rate
bound on periodic orbits to a pointwise bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import HypothesisViolatedError, InvalidInputError, NonConvergenceError
from ..parallel import tree_sum
from .toral import prime_orbits, toral
from .trig import SuspensionFlow, TrigPoly, coboundary

ORBIT_SUM_TOL = 1e-9


# --- discrete Livschitz --------------------------------------------------------


@dataclass
class LivschitzResult:
    n_max: int
    n_orbits: int
    max_orbit_sum: float
    beta: dict[int, np.ndarray]  # period -> (orbits, period) values along each orbit
    holder_exponent: float
    holder_constant: float
    recovery_spread: float | None = None
    orbits: dict = field(default_factory=dict, repr=False)

    def point_values(self) -> dict[tuple[int, int, int], float]:
        """``b`` keyed by ``(period, x_num, y_num)`` over the period's denominator."""
        out = {}
        for n, beta in self.beta.items():
            pts, _ = self.orbits[n]
            for (x, y), v in zip(pts.reshape(-1, 2).tolist(), beta.ravel().tolist()):
                out[(n, x, y)] = v
        return out

    def as_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "n_orbits": self.n_orbits,
            "max_orbit_sum": self.max_orbit_sum,
            "holder_exponent": self.holder_exponent,
            "holder_constant": self.holder_constant,
            "recovery_spread": self.recovery_spread,
        }


def _torus_dist(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    d = np.abs(p - q) % 1.0
    d = np.minimum(d, 1.0 - d)
    return d.max(axis=-1)


def holder_fit(h: np.ndarray, dv: np.ndarray) -> tuple[float, float]:
    """Fit ``max |dv| ~ C h^theta`` over dyadic bins of ``h``."""
    keep = h > 0
    h, dv = h[keep], dv[keep]
    if h.size == 0:
        return math.nan, math.nan
    b = np.floor(-np.log2(h)).astype(int)
    xs, ys = [], []
    for k in np.unique(b):
        m = dv[b == k].max()
        if m > 0:
            xs.append(math.log(2.0 ** (-k)))
            ys.append(math.log(m))
    if len(xs) < 2:
        return math.nan, math.nan
    theta, logc = np.polyfit(xs, ys, 1)
    return float(theta), float(math.exp(logc))


def livschitz_solve(A, f: TrigPoly, n_max: int = 10, anchor: str = "min", planted: TrigPoly | None = None) -> LivschitzResult:
    """Reconstruct ``b`` with ``f = b - b o A`` on all periodic orbits of period <= n_max.

    ``b`` is pinned to 0 at the anchor of each orbit: the lexicographically
    least point (``anchor="min"``) or the greatest (``anchor="max"``).
    Raises :class:`HypothesisViolatedError` if an orbit sum is not zero.
    """
    auto = toral(A)
    if n_max < 1:
        raise InvalidInputError("n_max must be >= 1")
    if anchor not in ("min", "max"):
        raise InvalidInputError("anchor must be 'min' or 'max'")
    worst = 0.0
    betas: dict[int, np.ndarray] = {}
    orbits = {}
    pairs_h, pairs_dv, spreads = [], [], []
    n_orbits = 0
    for n in range(1, n_max + 1):
        orb = prime_orbits(auto, n)
        if len(orb) == 0:
            continue
        pts = orb.points
        if anchor == "max":
            keys = pts[:, :, 0] * orb.den + pts[:, :, 1]
            shift = keys.argmax(axis=1)
            idx = (shift[:, None] + np.arange(n)[None, :]) % n
            pts = np.take_along_axis(pts, idx[:, :, None], axis=1)
        fv = f.at_rational(pts, orb.den)  # (orbits, n)
        sums = np.abs(fv.sum(axis=1))
        worst = max(worst, float(sums.max()))
        if worst > ORBIT_SUM_TOL:
            raise HypothesisViolatedError(f"orbit sum {worst:.3g} at period {n} is not zero")
        # b(A x) = b(x) - f(x), b(anchor) = 0
        beta = np.zeros_like(fv)
        beta[:, 1:] = -np.cumsum(fv[:, :-1], axis=1)
        betas[n] = beta
        orbits[n] = (pts, orb.den)
        n_orbits += len(pts)
        xy = pts / orb.den
        if n > 1:
            i, j = np.triu_indices(n, 1)
            pairs_h.append(_torus_dist(xy[:, i], xy[:, j]).ravel())
            pairs_dv.append(np.abs(beta[:, i] - beta[:, j]).ravel())
        if planted is not None:
            diff = beta - planted.at_rational(pts, orb.den)
            spreads.append(float((diff.max(axis=1) - diff.min(axis=1)).max()))
    if pairs_h:
        theta, C = holder_fit(np.concatenate(pairs_h), np.concatenate(pairs_dv))
    else:
        theta, C = math.nan, math.nan
    spread = max(spreads) if spreads else None
    return LivschitzResult(n_max, n_orbits, worst, betas, theta, C, spread, orbits)


# --- flow cocycles ----------------------------------------------------------------


@dataclass(frozen=True)
class CocycleSpec:
    """Cocycle over a suspension with increment ``G(x)`` per fiber passage.

    The generator at ``(x, u)`` is ``G(x) / r(x)``.
    """

    flow: SuspensionFlow
    increment: TrigPoly

    def generator(self, x: np.ndarray) -> np.ndarray:
        return self.increment(x) / self.flow.roof(x)


def constant_rate(flow: SuspensionFlow, lam: float) -> CocycleSpec:
    """``alpha(p, t) = lam * t``."""
    return CocycleSpec(flow, flow.roof.poly.scale(lam))


def planted_rate(flow: SuspensionFlow, lam: float, b: TrigPoly) -> CocycleSpec:
    """``lam * t`` plus a cocycle whose fiber increments are ``b - b o A``."""
    return CocycleSpec(flow, flow.roof.poly.scale(lam) + coboundary(b, flow.base))


@dataclass
class _Walk:
    """Crossing data along forward orbits of a batch of points."""

    times: np.ndarray  # (P, K+1) start time of each segment, times[:, 0] = 0
    alpha: np.ndarray  # (P, K+1) alpha at segment start
    rate: np.ndarray  # (P, K+1) generator on the segment
    base: np.ndarray  # (P, K+1, 2) base point of the segment
    u0: np.ndarray  # (P,) fiber height at segment 0 start

    def index(self, s: np.ndarray) -> np.ndarray:
        """Segment index for times ``s`` (shape (P, M))."""
        out = np.empty(s.shape, dtype=np.int64)
        for i in range(len(s)):
            out[i] = np.searchsorted(self.times[i], s[i], side="right") - 1
        return out

    def alpha_at(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        j = self.index(s)
        rows = np.arange(len(s))[:, None]
        return self.alpha[rows, j] + (s - self.times[rows, j]) * self.rate[rows, j]

    def point_at(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``Phi^s p`` as (base point, fiber height) for ``s`` of shape (P,)."""
        s = np.asarray(s, dtype=float)[:, None]
        j = self.index(s)[:, 0]
        rows = np.arange(len(s))
        u = s[:, 0] - self.times[rows, j]
        u = np.where(j == 0, u + self.u0, u)
        return self.base[rows, j], u


def walk(coc: CocycleSpec, x: np.ndarray, u: np.ndarray, horizon: float) -> _Walk:
    """Follow points ``(x, u)`` forward for time ``horizon``."""
    flow = coc.flow
    x = np.atleast_2d(np.asarray(x, dtype=float)) % 1.0
    u = np.asarray(u, dtype=float).reshape(len(x))
    rmin = flow.roof.lower_bound()
    K = int(math.ceil(horizon / rmin)) + 2
    A = np.array(flow.base.A, dtype=float)
    P = len(x)
    base = np.empty((P, K + 1, 2))
    cur = x
    for j in range(K + 1):
        base[:, j] = cur
        cur = (cur @ A.T) % 1.0
    r = flow.roof(base)
    G = coc.increment(base)
    rate = G / r
    if np.any(u < -1e-12) or np.any(u > r[:, 0] * (1 + 1e-12)):
        raise InvalidInputError("fiber height must lie in [0, r(x))")
    u = np.clip(u, 0.0, np.nextafter(r[:, 0], 0.0))
    times = np.zeros((P, K + 1))
    times[:, 1] = r[:, 0] - u
    times[:, 2:] = times[:, 1:2] + np.cumsum(r[:, 1:-1], axis=1)
    alpha = np.zeros((P, K + 1))
    alpha[:, 1] = rate[:, 0] * (r[:, 0] - u)
    alpha[:, 2:] = alpha[:, 1:2] + np.cumsum(G[:, 1:-1], axis=1)
    return _Walk(times, alpha, rate, base, u)


def _midpoints(a: np.ndarray, b: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite midpoint nodes on [a, b] (per row) and the step."""
    h = (b - a) / m
    nodes = a[:, None] + (np.arange(m)[None, :] + 0.5) * h[:, None]
    return nodes, h


def averaged(w: _Walk, T: float, m: int) -> np.ndarray:
    """``(1/T) int_0^T alpha(p, s) ds`` by the composite midpoint rule."""
    P = len(w.times)
    nodes, h = _midpoints(np.zeros(P), np.full(P, T), m)
    return (w.alpha_at(nodes) * h[:, None]).sum(axis=1) / T


def averaged_exact(w: _Walk, T: float) -> np.ndarray:
    """Oracle: the same integral computed piece by piece in closed form."""
    out = np.zeros(len(w.times))
    for i in range(len(w.times)):
        t = w.times[i]
        k = np.searchsorted(t, T, side="right")
        ends = np.append(t[1:k], T)
        starts = t[:k]
        dt = ends - starts
        out[i] = np.sum(w.alpha[i, :k] * dt + 0.5 * w.rate[i, :k] * dt * dt)
    return out / T


def beta_at(coc: CocycleSpec, x: np.ndarray, u: np.ndarray, T: float, m: int) -> np.ndarray:
    return averaged(walk(coc, x, u, T), T, m)


def orbit_rates(coc: CocycleSpec, n_max: int = 8) -> np.ndarray:
    """``alpha(p, tau(p)) / tau(p)`` on all prime orbits of period <= n_max."""
    flow = coc.flow
    out = []
    for n in range(1, n_max + 1):
        orb = prime_orbits(flow.base, n)
        if len(orb) == 0:
            continue
        g = coc.increment.at_rational(orb.points, orb.den).sum(axis=1)
        tau = flow.roof.at_rational(orb.points, orb.den).sum(axis=1)
        if (tau <= 0).any():
            raise AssertionError("non-positive orbit period with a positive roof")
        out.append(g / tau)
    return np.concatenate(out)


def _grid_points(n: int) -> np.ndarray:
    g = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(g, g, indexing="ij")
    return np.stack([X.ravel(), Y.ravel()], axis=1)


@dataclass
class SmootherResult:
    T: float
    lam: float
    lam_prime: float
    beta_grid: np.ndarray
    min_grid_excess: float
    inequality_min: float
    identity_residual: float
    quadrature_check: float
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "T": self.T,
            "lambda": self.lam,
            "lambda_prime": self.lam_prime,
            "beta_range": [float(self.beta_grid.min()), float(self.beta_grid.max())],
            "min_grid_excess": self.min_grid_excess,
            "inequality_min": self.inequality_min,
            "inequality_holds": self.inequality_min >= -1e-9,
            "identity_residual": self.identity_residual,
            "quadrature_check": self.quadrature_check,
            **self.details,
        }


def choose_T(coc: CocycleSpec, lam_prime: float, grid: int = 128, t_max: float = 2.0**10) -> tuple[float, float]:
    """Smallest ``T = 2^j`` with ``alpha(p, T) >= lam' T`` at every grid point."""
    pts = _grid_points(grid)
    T = 1.0
    while T <= t_max:
        w = walk(coc, pts, np.zeros(len(pts)), T)
        excess = float((w.alpha_at(np.full((len(pts), 1), T))[:, 0] - lam_prime * T).min())
        if excess >= -1e-12:
            return T, excess
        T *= 2
    raise NonConvergenceError(f"no valid averaging time up to {t_max:g}")


def averaging_smoother(
    coc: CocycleSpec,
    lam_prime: float,
    T: float | None = None,
    grid: int = 128,
    n_samples: int = 1000,
    t_max: float = 2.0,
    seed: int = 0,
    nodes_per_unit: int = 256,
) -> SmootherResult:
    """Build ``beta = (1/T) int_0^T alpha`` and verify the pointwise rate bound.

    Checks, on ``n_samples`` random ``(p, t)``: the identity
    ``alpha(p,t) + beta(Phi^t p) - beta(p) = (1/T) int_0^t alpha(Phi^s p, T) ds``
    and the inequality ``alpha(p,t) + beta(Phi^t p) - beta(p) >= lam' t``.
    """
    rates = orbit_rates(coc, 8)
    lam = float(rates.min())
    if lam < lam_prime - 1e-12:
        raise HypothesisViolatedError(f"periodic rate {lam:.6g} is below lambda' = {lam_prime:.6g}")
    if T is None:
        T, excess = choose_T(coc, lam_prime, grid)
    else:
        pts = _grid_points(grid)
        w = walk(coc, pts, np.zeros(len(pts)), T)
        excess = float((w.alpha_at(np.full((len(pts), 1), T))[:, 0] - lam_prime * T).min())
    m = max(int(nodes_per_unit * T), 64)

    pts = _grid_points(grid)
    wg = walk(coc, pts, np.zeros(len(pts)), T)
    beta_grid = averaged(wg, T, m).reshape(grid, grid)

    rng = np.random.default_rng(seed)
    x = rng.random((n_samples, 2))
    r0 = coc.flow.roof(x)
    u = rng.random(n_samples) * r0
    t = rng.random(n_samples) * t_max
    w = walk(coc, x, u, t_max + T)
    alpha_t = w.alpha_at(t[:, None])[:, 0]
    beta_p = averaged(w, T, m)
    xb, ub = w.point_at(t)
    beta_q = averaged(walk(coc, xb, ub, T), T, m)
    lhs = alpha_t + beta_q - beta_p
    # right side: (1/T) int_0^t [alpha(p, s+T) - alpha(p, s)] ds
    mt = max(int(nodes_per_unit * t_max), 64)
    nodes, h = _midpoints(np.zeros(n_samples), t, mt)
    inner = w.alpha_at(nodes + T) - w.alpha_at(nodes)
    rhs = (inner * h[:, None]).sum(axis=1) / T
    resid = float(np.abs(lhs - rhs).max())
    ineq = float((lhs - lam_prime * t).min())
    quad = float(np.abs(beta_p - averaged_exact(w, T)).max())
    return SmootherResult(
        T, lam, lam_prime, beta_grid, excess, ineq, resid, quad,
        {"n_samples": n_samples, "nodes": m, "seed": seed, "beta_mean": tree_sum(beta_grid) / beta_grid.size},
    )
