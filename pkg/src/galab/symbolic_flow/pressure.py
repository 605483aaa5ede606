"""Topological pressure from periodic orbits, Bowen roots and entropy identities.

For a hyperbolic toral automorphism the estimator

    P_n(f) = (1/n) log sum_{x in Fix(A^n)} exp(S_n f(x))

converges exponentially fast, so an Aitken step on the last three terms is
enough for 1e-6 accuracy around n = 12.  The entropy of a suspension with
roof r is the unique s with P(-s r) = 0.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ..errors import InvalidInputError, NonConvergenceError
from .toral import ToralAuto, apply_mod, fixed_points, toral
from .trig import RoofFunction, SuspensionFlow, TrigPoly

N_MIN, N_MAX = 4, 14
DEFAULT_N = tuple(range(4, 13))
# raw tail vs extrapolation disagreement that flags non-convergence
CONVERGENCE_TOL = 5e-3


@functools.lru_cache(maxsize=64)
def _fix(auto: ToralAuto, n: int):
    return fixed_points(auto, n)


def birkhoff_sums(auto: ToralAuto, f: TrigPoly, n: int) -> np.ndarray:
    """``S_n f(x) = sum_{k<n} f(A^k x)`` for every ``x`` in ``Fix(A^n)``."""
    fp = _fix(auto, n)
    cur = fp.num
    total = np.zeros(len(cur))
    for _ in range(n):
        total += f.at_rational(cur, fp.den)
        cur = apply_mod(auto, cur, fp.den)
    return total


def _check_range(n_range) -> tuple[int, ...]:
    ns = tuple(sorted(int(n) for n in n_range))
    if len(ns) < 3:
        raise InvalidInputError("need at least three values of n")
    if ns[0] < N_MIN or ns[-1] > N_MAX:
        raise InvalidInputError(f"n_range must lie in [{N_MIN}, {N_MAX}]")
    return ns


def aitken(seq) -> float:
    """Aitken delta-squared extrapolation from the last three terms."""
    p0, p1, p2 = (float(x) for x in seq[-3:])
    d1, d2 = p1 - p0, p2 - p1
    den = d2 - d1
    if abs(den) <= 1e-15 * max(1.0, abs(p2)) or abs(d2) <= 1e-15 * max(1.0, abs(p2)):
        return p2
    return p2 - d2 * d2 / den


@dataclass
class PressureResult:
    value: float
    raw: list[tuple[int, float]]
    converged: bool
    method: str = "aitken"
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "diagnostics": {
                "P_n": [[n, p] for n, p in self.raw],
                "extrapolation": {"method": self.method, "tail": self.raw[-1][1], "converged": self.converged},
                **self.extra,
            },
        }


def pressure_sequence(auto: ToralAuto, f: TrigPoly, ns) -> list[tuple[int, float]]:
    return [(n, float(logsumexp(birkhoff_sums(auto, f, n)) / n)) for n in ns]


def pressure_base(A, f: TrigPoly | float = 0.0, n_range=DEFAULT_N) -> PressureResult:
    """Extrapolated periodic-orbit pressure of ``f`` under ``A``."""
    auto = toral(A)
    if not isinstance(f, TrigPoly):
        f = TrigPoly(float(f))
    ns = _check_range(n_range)
    raw = pressure_sequence(auto, f, ns)
    ext = aitken([p for _, p in raw])
    ok = abs(ext - raw[-1][1]) <= CONVERGENCE_TOL
    return PressureResult(ext, raw, ok)


# --- Bowen root ------------------------------------------------------------------


class _RoofPressure:
    """Extrapolated ``P(-s r)`` with the roof orbit sums computed once."""

    def __init__(self, auto: ToralAuto, r: RoofFunction, ns):
        self.ns = ns
        self.sums = [birkhoff_sums(auto, r.poly, n) for n in ns]
        if any((s <= 0).any() for s in self.sums):
            raise AssertionError("non-positive orbit period with a positive roof")

    def raw(self, s: float) -> list[float]:
        return [float(logsumexp(-s * R) / n) for n, R in zip(self.ns, self.sums)]

    def __call__(self, s: float) -> float:
        return aitken(self.raw(s))


@dataclass
class EntropyResult:
    value: float
    bracket: tuple[float, float]
    iterations: int
    pressure_at_root: list[tuple[int, float]]

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "diagnostics": {
                "bracket": list(self.bracket),
                "iterations": self.iterations,
                "P_n_at_root": [[n, p] for n, p in self.pressure_at_root],
            },
        }


def entropy_suspension(flow: SuspensionFlow, n_range=DEFAULT_N, tol: float = 1e-8) -> EntropyResult:
    """Bowen root: the ``s`` with extrapolated ``P(-s * roof) = 0``, by bisection."""
    ns = _check_range(n_range)
    auto = flow.base
    rmin = flow.roof.lower_bound()
    if rmin <= 0:
        raise InvalidInputError("roof must be positive")
    fn = _RoofPressure(auto, flow.roof, ns)
    # P(-s r) <= log(lambda) - s*min(r); the 1% slack absorbs extrapolation error
    lo, hi = 0.0, 1.01 * auto.entropy / rmin
    f_lo, f_hi = fn(lo), fn(hi)
    if not (f_lo > 0 > f_hi):
        raise NonConvergenceError(f"Bowen root not bracketed: P(0)={f_lo}, P(hi)={f_hi}")
    it = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fn(mid) > 0:
            lo = mid
        else:
            hi = mid
        it += 1
    s = 0.5 * (lo + hi)
    return EntropyResult(s, (0.0, 1.01 * auto.entropy / rmin), it, list(zip(ns, fn.raw(s))))


def srb_identity_check(A, n: int = 12, lambdas=(0.5, 1.0, 2.0), n_range=DEFAULT_N) -> dict:
    """Unstable-Jacobian identities of the linear model.

    (i) ``sum_{Fix(A^n)} lambda_1^{-n}`` tends to 1, i.e. ``P(-log lambda_1) = 0``.
    (ii) A constant roof ``log(lambda_1)/lam`` gives a flow of entropy ``lam``.
    """
    auto = toral(A)
    L = auto.entropy
    count = len(_fix(auto, n))
    zeta_sum = count * math.exp(-n * L)
    p_unstable = pressure_base(auto, TrigPoly(-L), n_range)
    cases = []
    for lam in lambdas:
        flow = SuspensionFlow(auto, RoofFunction(TrigPoly(L / lam)))
        h = entropy_suspension(flow, n_range).value
        cases.append({"lambda": lam, "roof": L / lam, "entropy": h, "error": abs(h - lam)})
    return {
        "n": n,
        "fix_count": count,
        "weighted_sum": zeta_sum,
        "closed_form": (auto.lam**n + auto.lam**-n - 2) * auto.lam**-n,
        "weighted_sum_ok": abs(zeta_sum - 1) <= 1e-3,
        "pressure_unstable": p_unstable.value,
        "pressure_unstable_ok": abs(p_unstable.value) <= 2e-3,
        "constant_roof_cases": cases,
        "constant_roof_ok": all(c["error"] <= 1e-6 for c in cases),
    }


# --- separated sets for the doubling map ----------------------------------------


def doubling_separated_count(n: int, k: int, refine: int = 2) -> int:
    """Greedy maximal ``(n, 2^-k)``-separated set for ``x -> 2x`` on a dyadic grid.

    ``d_n(x, y) = max_{j<n} |2^j (x - y)|`` with the circle distance; points
    are separated when ``d_n >= 2^-k``.  Everything is integer arithmetic on
    the grid of mesh ``2^-(n+k+refine)``.
    """
    if n < 1 or k < 1:
        raise InvalidInputError("n and k must be positive")
    m = n + k + refine
    if m > 20:
        raise InvalidInputError("grid too fine for the greedy count")
    N = 1 << m
    d = np.arange(N, dtype=np.int64)
    dn = np.zeros(N, dtype=np.int64)
    for j in range(n):
        v = (d << j) % N
        dn = np.maximum(dn, np.minimum(v, N - v))
    close = dn < (N >> k)  # differences that are too close
    taken: list[int] = []
    blocked = np.zeros(N, dtype=bool)
    for x in range(N):
        if not blocked[x]:
            taken.append(x)
            blocked |= np.roll(close, x)
    return len(taken)
