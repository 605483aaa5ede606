"""Hyperbolic toral automorphisms, their periodic points and orbits.

Periodic points of period n solve ``(A^n - I) x = 0 mod Z^2``.  They form a
finite group with ``|det(A^n - I)| = |tr A^n - 2|`` elements.  Points are
stored exactly as integer numerators over the common denominator
``D = |det(A^n - I)|`` and reported as reduced fractions.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import InvalidInputError

IntMat = list[list[int]]


def _mat(A) -> IntMat:
    rows = [[int(x) for x in row] for row in A]
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise InvalidInputError("toral automorphism must be a 2x2 integer matrix")
    for row, orig in zip(rows, A):
        for x, y in zip(row, orig):
            if x != y:
                raise InvalidInputError("matrix entries must be integers")
    return rows


def mat_mul(A: IntMat, B: IntMat) -> IntMat:
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def mat_pow(A: IntMat, n: int) -> IntMat:
    """Integer matrix power with Python big ints (no overflow)."""
    out = [[int(i == j) for j in range(len(A))] for i in range(len(A))]
    base = [row[:] for row in A]
    while n:
        if n & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        n >>= 1
    return out


@dataclass(frozen=True)
class ToralAuto:
    A: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        m = _mat(self.A)
        det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        if det != 1:
            raise InvalidInputError(f"det A = {det}, expected 1")
        if abs(m[0][0] + m[1][1]) <= 2:
            raise InvalidInputError("|tr A| must exceed 2 for hyperbolicity")
        object.__setattr__(self, "A", (tuple(m[0]), tuple(m[1])))

    @property
    def matrix(self) -> IntMat:
        return [list(self.A[0]), list(self.A[1])]

    @property
    def trace(self) -> int:
        return self.A[0][0] + self.A[1][1]

    @property
    def lam(self) -> float:
        """Expanding eigenvalue ``lambda_1 > 1`` (in absolute value)."""
        t = abs(self.trace)
        return (t + math.sqrt(t * t - 4)) / 2

    @property
    def entropy(self) -> float:
        return math.log(self.lam)

    def eigdata(self) -> dict:
        w, v = np.linalg.eig(np.array(self.A, dtype=float))
        order = np.argsort(-np.abs(w))
        return {"eigenvalues": w[order].tolist(), "unstable": v[:, order[0]].tolist(), "stable": v[:, order[1]].tolist()}


def toral(A) -> ToralAuto:
    if isinstance(A, ToralAuto):
        return A
    if isinstance(A, str):
        vals = [int(x) for x in A.split(",")]
        if len(vals) != 4:
            raise InvalidInputError("expected four comma-separated integers")
        A = [vals[:2], vals[2:]]
    return ToralAuto(tuple(tuple(r) for r in A))


CAT = ToralAuto(((2, 1), (1, 1)))


# --- Smith normal form ------------------------------------------------------


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[IntMat, IntMat, IntMat]:
    """Return ``(U, S, V)`` with ``U M V = S`` diagonal, ``s_i | s_{i+1}``, ``s_i >= 0``.

    ``U`` and ``V`` are unimodular.  Works over Python ints for any shape.
    """
    S = [[int(x) for x in row] for row in M]
    m = len(S)
    n = len(S[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        S[dst] = [a - q * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in S:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
            if not nz:
                return U, S, V
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            p = S[t][t]
            done = True
            for i in range(t + 1, m):
                q = S[i][t] // p
                add_row(i, t, q)
                if S[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = S[t][j] // p
                add_col(j, t, q)
                if S[t][j]:
                    done = False
            if not done:
                continue
            # divisibility: fold any entry not divisible by the pivot into row t
            bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % p]
            if bad:
                i, _ = bad[0]
                S[t] = [a + b for a, b in zip(S[t], S[i])]
                U[t] = [a + b for a, b in zip(U[t], U[i])]
                continue
            break
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return U, S, V


# --- periodic points -----------------------------------------------------------


@dataclass
class PeriodicPoints:
    """``Fix(A^n)`` as integer numerators over a common denominator."""

    n: int
    den: int
    num: np.ndarray  # (count, 2) int64, entries in [0, den)

    def __len__(self) -> int:
        return len(self.num)

    def fractions(self) -> list[tuple[Fraction, Fraction]]:
        return [(Fraction(int(a), self.den), Fraction(int(b), self.den)) for a, b in self.num]

    @property
    def coords(self) -> np.ndarray:
        return self.num / self.den


def _fix_matrix(auto: ToralAuto, n: int) -> IntMat:
    P = mat_pow(auto.matrix, n)
    return [[P[0][0] - 1, P[0][1]], [P[1][0], P[1][1] - 1]]


def fix_count(A, n: int) -> int:
    P = mat_pow(toral(A).matrix, n)
    return abs(P[0][0] + P[1][1] - 2)


def fixed_points(A, n: int) -> PeriodicPoints:
    """All ``x`` in T^2 with ``A^n x = x``, via the Smith form of ``A^n - I``.

    With ``U M V = diag(s1, s2)`` the solutions are ``x = V (i/s1, j/s2)``.
    """
    auto = toral(A)
    if n < 1:
        raise InvalidInputError("period must be >= 1")
    M = _fix_matrix(auto, n)
    D = abs(M[0][0] * M[1][1] - M[0][1] * M[1][0])
    if D == 0:
        raise InvalidInputError("A^n - I is singular")
    if D > 50_000_000:
        raise InvalidInputError(f"{D} periodic points exceed the enumeration limit")
    _, S, V = smith_normal_form(M)
    s1, s2 = S[0][0], S[1][1]
    i = np.arange(s1, dtype=object)[:, None]
    j = np.arange(s2, dtype=object)[None, :]
    # numerators over D = s1*s2
    a = (i * s2) * np.ones_like(j)
    b = (j * s1) * np.ones_like(i)
    a, b = a.ravel(), b.ravel()
    x = (V[0][0] * a + V[0][1] * b) % D
    y = (V[1][0] * a + V[1][1] * b) % D
    num = np.stack([x.astype(np.int64), y.astype(np.int64)], axis=1)
    order = np.lexsort((num[:, 1], num[:, 0]))
    return PeriodicPoints(n, D, num[order])


def fixed_points_grid(A, n: int) -> PeriodicPoints:
    """Oracle: test every grid point ``(i, j)/D`` directly.  Cost ``D^2``."""
    auto = toral(A)
    M = _fix_matrix(auto, n)
    D = abs(M[0][0] * M[1][1] - M[0][1] * M[1][0])
    if D * D > 5_000_000:
        raise InvalidInputError("grid oracle limited to D^2 <= 5e6")
    i, j = np.meshgrid(np.arange(D), np.arange(D), indexing="ij")
    i, j = i.ravel(), j.ravel()
    ok = ((M[0][0] * i + M[0][1] * j) % D == 0) & ((M[1][0] * i + M[1][1] * j) % D == 0)
    num = np.stack([i[ok], j[ok]], axis=1).astype(np.int64)
    return PeriodicPoints(n, D, num)


def fixed_points_closure(A, n: int) -> PeriodicPoints:
    """Oracle: the subgroup of (Z/D)^2 generated by the columns of adj(A^n - I).

    ``M^-1 Z^2 = adj(M) Z^2 / det M``, so these columns generate the solution
    group.  Built by breadth-first closure; independent of the Smith form.
    """
    auto = toral(A)
    M = _fix_matrix(auto, n)
    D = abs(M[0][0] * M[1][1] - M[0][1] * M[1][0])
    adj = [[M[1][1], -M[0][1]], [-M[1][0], M[0][0]]]
    gens = [(adj[0][0] % D, adj[1][0] % D), (adj[0][1] % D, adj[1][1] % D)]
    seen = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        nxt = []
        for x, y in frontier:
            for gx, gy in gens:
                p = ((x + gx) % D, (y + gy) % D)
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        frontier = nxt
    num = np.array(sorted(seen), dtype=np.int64)
    return PeriodicPoints(n, D, num)


def apply_mod(auto: ToralAuto, num: np.ndarray, den: int) -> np.ndarray:
    """``A x mod 1`` on numerators over ``den``; exact in int64 for den < 2^31."""
    (a, b), (c, d) = auto.A
    x, y = num[:, 0], num[:, 1]
    return np.stack([(a * x + b * y) % den, (c * x + d * y) % den], axis=1)


# --- orbits --------------------------------------------------------------------


@dataclass
class Orbits:
    """Prime periodic orbits of exact period ``n``.

    ``points[i, k]`` is ``A^k`` applied to the anchor of orbit ``i``; the
    anchor is the lexicographically least point of the orbit.
    """

    n: int
    den: int
    points: np.ndarray  # (n_orbits, n, 2) numerators

    def __len__(self) -> int:
        return len(self.points)

    def anchors(self) -> list[tuple[Fraction, Fraction]]:
        return [(Fraction(int(a), self.den), Fraction(int(b), self.den)) for a, b in self.points[:, 0]]


def prime_orbits(A, n: int) -> Orbits:
    auto = toral(A)
    fp = fixed_points(auto, n)
    D = fp.den
    traj = np.empty((len(fp), n, 2), dtype=np.int64)
    cur = fp.num
    for k in range(n):
        traj[:, k] = cur
        cur = apply_mod(auto, cur, D)
    if not np.array_equal(cur, fp.num):
        raise AssertionError("A^n failed to fix an enumerated point")
    # exact period n: no earlier return
    prime = np.ones(len(fp), dtype=bool)
    for k in range(1, n):
        prime &= ~np.all(traj[:, k] == traj[:, 0], axis=1)
    traj = traj[prime]
    # anchor = lexicographic min; keep each orbit once (the row that starts at its anchor)
    keys = traj[:, :, 0] * D + traj[:, :, 1]
    is_anchor = keys[:, 0] == keys.min(axis=1)
    return Orbits(n, D, traj[is_anchor])


def orbits_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write("n,x_num,x_den,y_num,y_den,tau,Ju,Js,homology\n")
    for r in rows:
        x, y = r["x"]
        buf.write(
            f"{r['n']},{x.numerator},{x.denominator},{y.numerator},{y.denominator},"
            f"{r['tau']!r},{r['Ju']!r},{r['Js']!r},{r['homology']}\n"
        )
    return buf.getvalue()
