"""Arithmetic in SL(2,R), PSL(2,R) and the universal cover of PSL(2,R).

An element of the universal cover is stored as a unit-determinant matrix
``m`` together with an integer winding ``k``.  It stands for the lifted
circle map ``f = f_m + k*pi`` acting on the angle coordinate of RP^1
(angles modulo pi), where ``f_m`` is the canonical lift of the projective
action of ``m`` normalised by ``f_m(0)`` in ``[0, pi)``.

All elements are immutable and every function here is pure.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateCommutatorError, InvalidInputError

DET_RENORM = 1e-13
DET_FAIL = 1e-6
_EPS = float(np.finfo(float).eps)
PARABOLIC_BAND = 1e-9
CENTRAL_TOL = 1e-9
# snap f_m(0) back to 0 when it lands this close to pi (central elements)
_ANGLE_SNAP = 1e-12


class ElementClass(enum.Enum):
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    CENTRAL = "central"


def _renormalize(a: float, b: float, c: float, d: float) -> tuple[float, float, float, float]:
    det = a * d - b * c
    # cancellation in ad - bc: drift below this floor is rounding, not an error
    floor = 8 * _EPS * (abs(a * d) + abs(b * c))
    if not math.isfinite(det) or abs(det - 1.0) > DET_FAIL + floor:
        raise InvalidInputError(f"determinant {det!r} is not 1 within {DET_FAIL}")
    if abs(det - 1.0) > max(DET_RENORM, floor):
        s = math.sqrt(det)
        a, b, c, d = a / s, b / s, c / s, d / s
    return (float(a), float(b), float(c), float(d))


def as_mat2(m) -> tuple[float, float, float, float]:
    """Coerce a 2x2 array-like (or flat 4-sequence) to a renormalized row-major tuple."""
    arr = np.asarray(m, dtype=float).reshape(-1)
    if arr.size != 4:
        raise InvalidInputError("expected a 2x2 matrix")
    return _renormalize(*arr)


def angle0(m: Sequence[float]) -> float:
    """Canonical lift value ``f_m(0)`` in ``[0, pi)``."""
    a, _, c, _ = m
    t = math.atan2(c, a) % math.pi
    if math.pi - t < _ANGLE_SNAP:
        t -= math.pi
    return t


def _mul(p: Sequence[float], q: Sequence[float]) -> tuple[float, float, float, float]:
    a, b, c, d = p
    e, f, g, h = q
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


@dataclass(frozen=True)
class CoverElement:
    m: tuple[float, float, float, float]
    k: int = 0

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.m, dtype=float).reshape(2, 2)

    def lift(self, x):
        """Evaluate the lifted circle map at ``x`` (scalar or array)."""
        return lift_eval(self, x)

    def __matmul__(self, other: "CoverElement") -> "CoverElement":
        return compose(self, other)


def lift_eval(p: CoverElement, x):
    """The lifted map ``f_m(x) + k*pi``; satisfies ``f(x + pi) = f(x) + pi``."""
    a, b, c, d = p.m
    x = np.asarray(x, dtype=float)
    j = np.floor(x / math.pi)
    x0 = x - j * math.pi
    base = angle0(p.m)
    # angle swept from m e_0 to m e_x0: the cross product is det(m) sin(x0) = sin(x0)
    cx, sx = np.cos(x0), np.sin(x0)
    dot = a * (a * cx + b * sx) + c * (c * cx + d * sx)
    fx0 = base + np.arctan2(sx, dot)
    out = fx0 + (j + p.k) * math.pi
    return float(out) if out.ndim == 0 else out


def element(m, k: int = 0) -> CoverElement:
    return CoverElement(as_mat2(m), int(k))


def identity() -> CoverElement:
    return CoverElement((1.0, 0.0, 0.0, 1.0), 0)


def central(n: int = 1) -> CoverElement:
    """``z**n`` where ``z = (I, 1)`` generates the center."""
    return CoverElement((1.0, 0.0, 0.0, 1.0), int(n))


def _winding_of_product(p: CoverElement, q: CoverElement, m: Sequence[float]) -> int:
    y = lift_eval(q, 0.0)
    fy = lift_eval(p, y)
    r = (fy - angle0(m)) / math.pi
    k = round(r)
    if abs(r - k) > 0.25:
        raise InvalidInputError(f"winding discrepancy {r} is not near an integer")
    return int(k)


def compose(p: CoverElement, q: CoverElement) -> CoverElement:
    """Group law: the lift of the product is ``lift(p) o lift(q)``."""
    m = _renormalize(*_mul(p.m, q.m))
    return CoverElement(m, _winding_of_product(p, q, m))


def compose_all(elements: Iterable[CoverElement]) -> CoverElement:
    out = identity()
    for e in elements:
        out = compose(out, e)
    return out


def inverse(p: CoverElement) -> CoverElement:
    a, b, c, d = p.m
    minv = (d, -b, -c, a)
    j = compose(p, CoverElement(minv, 0)).k
    return CoverElement(minv, -j)


def power(p: CoverElement, n: int) -> CoverElement:
    if n < 0:
        p, n = inverse(p), -n
    out = identity()
    for _ in range(n):
        out = compose(out, p)
    return out


def theta(p: CoverElement) -> tuple[float, float, float, float]:
    """Projection to PSL(2,R), returned as an SL(2,R) representative."""
    return p.m


def psl_close(m1: Sequence[float], m2: Sequence[float], tol: float = 1e-10) -> bool:
    a = np.asarray(m1, dtype=float)
    b = np.asarray(m2, dtype=float)
    return bool(min(np.max(np.abs(a - b)), np.max(np.abs(a + b))) <= tol)


def allclose(p: CoverElement, q: CoverElement, tol: float = 1e-10) -> bool:
    """Equality in the universal cover: same PSL class and same lift."""
    if not psl_close(p.m, q.m, tol):
        return False
    # the lifts agree at 0 when both describe the same cover element
    return abs(lift_eval(p, 0.0) - lift_eval(q, 0.0)) < 0.25


def one_param(kind: str, t: float) -> CoverElement:
    """Lifts of the one-parameter subgroups X^t, S^x, U^y.

    Each lift is the endpoint of the path from the identity, so
    ``one_param(kind, s) @ one_param(kind, t) == one_param(kind, s + t)``
    holds in the cover, windings included.
    """
    if not math.isfinite(t):
        raise InvalidInputError("parameter must be finite")
    if kind == "X":
        e = math.exp(t / 2)
        return CoverElement((e, 0.0, 0.0, 1.0 / e), 0)
    if kind == "S":
        return CoverElement((1.0, float(t), 0.0, 1.0), 0)
    if kind == "U":
        # the path endpoint has f(0) = atan(y), one sheet below f_m(0) when y < 0
        m = (1.0, 0.0, float(t), 1.0)
        return CoverElement(m, int(round((math.atan(t) - angle0(m)) / math.pi)))
    raise InvalidInputError(f"unknown one-parameter subgroup {kind!r}")


def rotation(phi: float) -> CoverElement:
    """Lift of the SO(2) matrix of angle ``phi``: rotates RP^1 by ``phi``.

    As an isometry of the hyperbolic plane (upper half plane, fixed point i)
    this is a rotation by ``2*phi``.
    """
    c, s = math.cos(phi), math.sin(phi)
    m = (c, -s, s, c)
    return CoverElement(m, int(round((phi - angle0(m)) / math.pi)))


def trace_abs(p: CoverElement) -> float:
    a, _, _, d = p.m
    return abs(a + d)


def classify(p: CoverElement) -> ElementClass:
    a, b, c, d = p.m
    dev = min(max(abs(a - 1), abs(b), abs(c), abs(d - 1)), max(abs(a + 1), abs(b), abs(c), abs(d + 1)))
    if dev <= CENTRAL_TOL:
        return ElementClass.CENTRAL
    gap = abs(a + d) - 2.0
    if gap > PARABOLIC_BAND:
        return ElementClass.HYPERBOLIC
    if gap < -PARABOLIC_BAND:
        return ElementClass.ELLIPTIC
    return ElementClass.PARABOLIC


def length_from_trace(tr) -> np.ndarray | float:
    """Translation length ``2*arccosh(|tr|/2)`` past the parabolic band, else 0."""
    t = np.abs(np.asarray(tr, dtype=float))
    hyp = t - 2.0 > PARABOLIC_BAND
    out = np.where(hyp, 2.0 * np.arccosh(np.where(hyp, t, 2.0) / 2.0), 0.0)
    return float(out) if out.ndim == 0 else out


def translation_length(p: CoverElement) -> float:
    if classify(p) is not ElementClass.HYPERBOLIC:
        return 0.0
    return float(length_from_trace(trace_abs(p)))


def op_norm(m) -> float:
    """Largest singular value of a unit-determinant 2x2 matrix."""
    if isinstance(m, CoverElement):
        m = m.m
    a, b, c, d = np.asarray(m, dtype=float).reshape(-1)
    fro2 = a * a + b * b + c * c + d * d
    det = a * d - b * c
    # s1 + s2 = sqrt(fro2 + 2 det), s1 - s2 = sqrt(fro2 - 2 det)
    return 0.5 * (math.sqrt(fro2 + 2 * det) + math.sqrt(max(fro2 - 2 * det, 0.0)))


def diagonalizer(p: CoverElement) -> tuple[np.ndarray, int]:
    """Return ``(E, sign)`` with det E = 1 and ``theta(p) = sign * E X^L E^-1``."""
    if classify(p) is not ElementClass.HYPERBOLIC:
        raise InvalidInputError("diagonalizer needs a hyperbolic element")
    m = p.matrix
    tr = m[0, 0] + m[1, 1]
    sign = 1 if tr > 0 else -1
    mu = sign * math.exp(translation_length(p) / 2)
    vecs = []
    for ev in (mu, 1.0 / mu):
        # null vector of (m - ev I), taking the better-conditioned row
        r = m - ev * np.eye(2)
        row = r[0] if np.hypot(*r[0]) >= np.hypot(*r[1]) else r[1]
        v = np.array([-row[1], row[0]])
        vecs.append(v / np.hypot(*v))
    e = np.column_stack(vecs)
    det = np.linalg.det(e)
    if det < 0:
        e[:, 1] *= -1
        det = -det
    return e / math.sqrt(det), sign


def commutator(p: CoverElement, q: CoverElement) -> CoverElement:
    """``[p, q] = p^-1 q^-1 p q``."""
    return compose_all((inverse(p), inverse(q), p, q))


def _raw_power(m: np.ndarray, n: int) -> np.ndarray:
    out = np.eye(2)
    for _ in range(n):
        out = out @ m
    return out


def commutator_length_sequence(p: CoverElement, q: CoverElement, n_max: int) -> list[tuple[int, float]]:
    """``L([p^n, q]) / (2n)`` for ``n = 1..n_max``, computed two independent ways.

    The direct route multiplies matrices; the closed route conjugates ``p`` to
    a diagonal matrix and evaluates the commutator entrywise.  Their traces
    must agree to 1e-9 relative, otherwise ``InvalidInputError`` is raised.
    """
    if classify(p) is not ElementClass.HYPERBOLIC:
        raise InvalidInputError("p must be hyperbolic")
    c1 = classify(commutator(p, q))
    if c1 in (ElementClass.CENTRAL, ElementClass.PARABOLIC):
        raise DegenerateCommutatorError(f"[p, q] is {c1.value}")
    L = translation_length(p)
    e, _ = diagonalizer(p)
    qc = np.linalg.solve(e, q.matrix @ e)
    P, Q = p.matrix, q.matrix
    Padj = np.array([[P[1, 1], -P[0, 1]], [-P[1, 0], P[0, 0]]])
    Qadj = np.array([[Q[1, 1], -Q[0, 1]], [-Q[1, 0], Q[0, 0]]])
    out = []
    for n in range(1, n_max + 1):
        direct = _raw_power(Padj, n) @ Qadj @ _raw_power(P, n) @ Q
        tr_direct = direct[0, 0] + direct[1, 1]
        closed = commutator_closed_form(qc, L, n)
        tr_closed = closed[0, 0] + closed[1, 1]
        if abs(tr_direct - tr_closed) > 1e-9 * max(abs(tr_closed), 1.0):
            raise InvalidInputError(
                f"direct and closed-form commutator traces disagree at n={n}: {tr_direct} vs {tr_closed}"
            )
        out.append((n, float(length_from_trace(tr_closed)) / (2 * n)))
    return out


def commutator_closed_form(q_conj, L: float, n: int) -> np.ndarray:
    """Matrix of ``A [p^n, q] A^-1`` when ``A p A^-1 = +-X^L`` and ``A q A^-1 = q_conj``."""
    (a, b), (c, d) = np.asarray(q_conj, dtype=float)
    en, emn = math.exp(n * L), math.exp(-n * L)
    return np.array([[a * d - emn * b * c, (1 - emn) * b * d], [(1 - en) * a * c, a * d - en * b * c]])


def random_element(rng: np.random.Generator, spread: float = 1.0, hyperbolic: bool = False) -> CoverElement:
    """Winding-0 element ``R(a) X^t R(b)`` with ``t`` uniform in ``[-3 spread, 3 spread]``.

    With ``hyperbolic=True`` draws are repeated until the trace clears 2.05.
    """
    while True:
        a, b = rng.uniform(0, math.pi, size=2)
        t = rng.uniform(-3 * spread, 3 * spread)
        m = as_mat2(rotation(a).matrix @ one_param("X", t).matrix @ rotation(b).matrix)
        if not hyperbolic or abs(m[0] + m[3]) > 2.05:
            return CoverElement(m, 0)
