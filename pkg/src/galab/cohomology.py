"""Real cohomology classes on the lattice quotient and the truncated Delta sup.

A class is a vector ``v`` in R^{2g} pairing with a word through its
abelianization.  ``S_N(a)`` is the maximum of ``|a(gamma)| / L(gamma)`` over
hyperbolic classes of word length at most N.  It only depends on the shortest
class in each homology vector, so everything here runs off
:func:`galab.lattice.homology_minima`.

``S_N`` is a lower bound for the true supremum.  Membership of the open set
``{sup < 1}`` is therefore never certified; only non-membership is.
"""
from __future__ import annotations

import enum
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import cover
from .errors import InvalidInputError
from .lattice import (
    ConjClass,
    LatticeRep,
    Word,
    _reduced_word_arrays,
    abelianize,
    class_table,
    eval_word,
    homology_minima,
    word_str,
)


@dataclass(frozen=True)
class CohClass:
    v: tuple[float, ...]

    def __post_init__(self):
        vec = tuple(float(x) for x in self.v)
        if not all(math.isfinite(x) for x in vec):
            raise InvalidInputError("class vector must be finite")
        object.__setattr__(self, "v", vec)

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.v)

    @property
    def dim(self) -> int:
        return len(self.v)

    def __add__(self, other: "CohClass") -> "CohClass":
        _check_dim(self, other.dim)
        return CohClass(tuple(x + y for x, y in zip(self.v, other.v)))

    def __rmul__(self, t: float) -> "CohClass":
        return CohClass(tuple(t * x for x in self.v))


def basis(i: int, dim: int = 4) -> CohClass:
    """Dual basis class ``e_i`` (1-based), pairing to 1 with generator ``i``."""
    v = [0.0] * dim
    v[i - 1] = 1.0
    return CohClass(tuple(v))


def _check_dim(a: CohClass, dim: int) -> None:
    if a.dim != dim:
        raise InvalidInputError(f"class has dimension {a.dim}, expected {dim}")


def evaluate(a: CohClass, w: Sequence[int]) -> float:
    """Pairing ``<v, abelianize(w)>``; additive under concatenation."""
    if a.dim % 2:
        raise InvalidInputError("class dimension must be even")
    h = abelianize(w, a.dim // 2)
    return float(np.dot(a.vector, h))


# --- truncated supremum -------------------------------------------------------


@dataclass
class DeltaEstimate:
    class_vector: tuple[float, ...]
    maxlen: int
    sup_value: float
    witness: ConjClass
    history: list[tuple[int, float]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "class_vector": list(self.class_vector),
            "maxlen": self.maxlen,
            "sup": self.sup_value,
            "witness_word": word_str(self.witness.rep),
            "history": [[n, s] for n, s in self.history],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def _ratio_table(lat: LatticeRep, maxlen: int, workers: int | None = None):
    hm = homology_minima(lat, maxlen, workers=workers)
    best, src = hm.cumulative()
    return hm, best, src


def sup_many(lat: LatticeRep, vectors: np.ndarray, maxlen: int, workers: int | None = None) -> np.ndarray:
    """``S_N`` at ``N = maxlen`` for each row of ``vectors``."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.shape[1] != lat.rank:
        raise InvalidInputError(f"class vectors must have dimension {lat.rank}")
    hm, best, _ = _ratio_table(lat, maxlen, workers)
    if len(hm.homology) == 0:
        return np.zeros(len(vectors))
    inv_len = 1.0 / best[-1]
    return (np.abs(vectors @ hm.homology.T.astype(float)) * inv_len).max(axis=1)


def delta_sup(lat: LatticeRep, a: CohClass, maxlen: int, workers: int | None = None) -> DeltaEstimate:
    """Truncated sup with its witness class and the per-N history."""
    _check_dim(a, lat.rank)
    if maxlen < 1:
        raise InvalidInputError("maxlen must be >= 1")
    hm, best, src = _ratio_table(lat, maxlen, workers)
    num = np.abs(hm.homology.astype(float) @ a.vector)
    ratios = num[None, :] / best
    history = []
    for n in range(maxlen):
        history.append((n + 1, float(ratios[n].max())))
    j = int(np.argmax(ratios[-1]))
    n_src = int(src[-1, j])
    witness = ConjClass(hm.witness[n_src][j], float(best[-1, j]), tuple(int(x) for x in hm.homology[j]))
    return DeltaEstimate(a.v, maxlen, history[-1][1], witness, history)


class Membership(str, enum.Enum):
    CERTIFIED_OUT = "CertifiedOut"
    PLAUSIBLE = "Plausible"
    BORDERLINE = "Borderline"


def classify_sup(s: float, margin: float) -> Membership:
    if not 0.0 < margin < 0.5:
        raise InvalidInputError("margin must lie in (0, 0.5)")
    if s >= 1.0:
        return Membership.CERTIFIED_OUT
    if s < 1.0 - margin:
        return Membership.PLAUSIBLE
    return Membership.BORDERLINE


def in_delta(lat: LatticeRep, a: CohClass, maxlen: int, margin: float = 0.1) -> Membership:
    """One-sided membership test; Plausible is never a certificate."""
    if not 0.0 < margin < 0.5:
        raise InvalidInputError("margin must lie in (0, 0.5)")
    return classify_sup(delta_sup(lat, a, maxlen).sup_value, margin)


@dataclass
class Slice:
    s: np.ndarray  # (2g+1,) offsets along dir1
    t: np.ndarray
    values: np.ndarray  # values[i, j] = S_N at (s[i], t[j])
    margin: float

    def rows(self) -> list[tuple[float, float, float, str]]:
        out = []
        for i, s in enumerate(self.s):
            for j, t in enumerate(self.t):
                v = float(self.values[i, j])
                out.append((float(s), float(t), v, classify_sup(v, self.margin).value))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("s,t,S_N,status\n")
        for s, t, v, st in self.rows():
            buf.write(f"{s!r},{t!r},{v!r},{st}\n")
        return buf.getvalue()


def delta_slice(
    lat: LatticeRep,
    origin: CohClass,
    dir1: CohClass,
    dir2: CohClass,
    grid: int,
    extent: float,
    maxlen: int,
    margin: float = 0.1,
) -> Slice:
    """Sample ``S_N`` on the square ``origin + s*dir1 + t*dir2``, ``|s|,|t| <= extent``."""
    for c in (origin, dir1, dir2):
        _check_dim(c, lat.rank)
    if grid < 0 or extent <= 0:
        raise InvalidInputError("grid must be >= 0 and extent > 0")
    if np.linalg.matrix_rank(np.vstack([dir1.vector, dir2.vector]), tol=1e-12) < 2:
        raise InvalidInputError("slice directions must be linearly independent")
    offs = np.linspace(-extent, extent, 2 * grid + 1) if grid else np.zeros(1)
    S, T = np.meshgrid(offs, offs, indexing="ij")
    vecs = origin.vector + S.reshape(-1, 1) * dir1.vector + T.reshape(-1, 1) * dir2.vector
    vals = sup_many(lat, vecs, maxlen).reshape(S.shape)
    return Slice(offs, offs.copy(), vals, margin)


def midpoint_violations(mask: np.ndarray) -> int:
    """Unordered pairs of grid points inside ``mask`` whose midpoint lies outside.

    Only pairs with an integral midpoint are checked.
    """
    pts = np.argwhere(mask)
    if len(pts) < 2:
        return 0
    a = pts[:, None, :]
    b = pts[None, :, :]
    tot = a + b
    even = np.all(tot % 2 == 0, axis=2)
    mids = tot[even] // 2
    # ordered pairs: every unordered violating pair shows up twice
    return int((~mask[mids[:, 0], mids[:, 1]]).sum()) // 2


def inner_ball_radius(lat: LatticeRep, maxlen: int, margin: float) -> float:
    """Radius of a Euclidean ball around 0 on which ``S_N <= 1 - margin``.

    Cauchy-Schwarz gives ``S_N(a) <= |v| * max_h |h| / L_min(h)``.
    """
    hm, best, _ = _ratio_table(lat, maxlen)
    k = float((np.linalg.norm(hm.homology, axis=1) / best[-1]).max())
    return (1.0 - margin) / k


def inverse_symmetry_defect(lat: LatticeRep, maxlen: int) -> float:
    """Largest gap between the minimal lengths at ``h`` and ``-h``.

    Zero means the enumerated class set is closed under inversion, so the
    signed and absolute versions of the sup coincide.
    """
    hm, best, _ = _ratio_table(lat, maxlen)
    idx = {tuple(h): j for j, h in enumerate(hm.homology.tolist())}
    worst = 0.0
    for h, j in idx.items():
        k = idx.get(tuple(-x for x in h))
        if k is None:
            return math.inf
        fj, fk = np.isfinite(best[:, j]), np.isfinite(best[:, k])
        if np.any(fj != fk):
            return math.inf
        d = np.abs(best[fj, j] - best[fk, k])
        worst = max(worst, float(d.max(initial=0.0)))
    return worst


# --- deformed periods ---------------------------------------------------------


def period_shift(lat: LatticeRep, a: CohClass, cls: ConjClass) -> float:
    """Period of the orbit after the time change: ``L + a(gamma)``."""
    _check_dim(a, lat.rank)
    if not cls.length > 0:
        raise InvalidInputError("period shift needs a hyperbolic class")
    return cls.length + float(np.dot(a.vector, cls.homology))


def min_shifted_period(lat: LatticeRep, a: CohClass, maxlen: int) -> tuple[float, ConjClass]:
    """Smallest ``L + a(gamma)`` over enumerated hyperbolic classes."""
    _check_dim(a, lat.rank)
    hm, best, src = _ratio_table(lat, maxlen)
    tau = best[-1] + hm.homology.astype(float) @ a.vector
    j = int(np.argmin(tau))
    w = hm.witness[int(src[-1, j])][j]
    return float(tau[j]), ConjClass(w, float(best[-1, j]), tuple(int(x) for x in hm.homology[j]))


# --- freeness and proper discontinuity of the deformed action -----------------


def _op_norms(m: np.ndarray) -> np.ndarray:
    flat = m.reshape(-1, 4)
    fro2 = (flat**2).sum(axis=1)
    det = flat[:, 0] * flat[:, 3] - flat[:, 1] * flat[:, 2]
    return 0.5 * (np.sqrt(fro2 + 2 * det) + np.sqrt(np.maximum(fro2 - 2 * det, 0.0)))


def sample_compact(n: int, seed: int) -> np.ndarray:
    """Seeded points ``X^t U^y S^x`` with ``|t|, |x|, |y| <= 1``."""
    rng = np.random.default_rng(seed)
    t, y, x = rng.uniform(-1.0, 1.0, size=(3, n))
    out = np.empty((n, 2, 2))
    for i in range(n):
        g = cover.compose_all((cover.one_param("X", t[i]), cover.one_param("U", y[i]), cover.one_param("S", x[i])))
        out[i] = g.matrix
    return out


def _inv(m: np.ndarray) -> np.ndarray:
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    return out


def _x_flow(s: np.ndarray) -> np.ndarray:
    e = np.exp(np.asarray(s, dtype=float) / 2)
    out = np.zeros(e.shape + (2, 2))
    out[..., 0, 0] = e
    out[..., 1, 1] = 1.0 / e
    return out


def gamma_a_audit(lat: LatticeRep, a: CohClass, maxlen: int, n_samples: int = 16, seed: int = 0) -> dict:
    """Numerical evidence that ``(gamma, P) -> gamma P X^{a(gamma)}`` is free and proper.

    Distances on the group use ``d(P, Q) = log op_norm(P^-1 Q)``.
    """
    _check_dim(a, lat.rank)
    est = delta_sup(lat, a, maxlen)
    if est.sup_value >= 1.0:
        raise InvalidInputError("class is certified outside the Delta set; the audit does not apply")
    tab = class_table(lat, maxlen)
    hyp = np.flatnonzero(tab.hyperbolic)
    L = tab.length[hyp]
    av = tab.homology[hyp].astype(float) @ a.vector
    margins = L - np.abs(av)
    gens = []
    for i in range(lat.rank):
        lg = cover.translation_length(lat.gens[i])
        gens.append({"generator": i + 1, "length": lg, "margin": lg - abs(a.v[i])})

    V = sample_compact(n_samples, seed)
    Vinv = _inv(V)
    K0 = float(np.log(_op_norms(Vinv[:, None] @ V[None, :])).max()) if n_samples > 1 else 0.0

    # (ii) candidates for fixed points need L == |a(gamma)|
    tight = np.flatnonzero(np.abs(margins) <= 1e-9)
    fixed = 0
    for i in tight:
        g = tab.mats[hyp[i]]
        img = g[None] @ V @ _x_flow(av[i])[None]
        d = np.minimum(np.abs(img - V).reshape(len(V), -1).max(axis=1), np.abs(img + V).reshape(len(V), -1).max(axis=1))
        fixed += int((d < 1e-9).sum())

    # (iii) classes where the proof's displacement estimate does not apply
    viol = np.flatnonzero(2 * K0 + np.abs(av) >= L)
    # displacement over the violators plus all elements of word length <= 2
    ws, ms = _reduced_word_arrays(lat, 2)
    short_codes = np.concatenate([np.pad(w, ((0, 0), (0, 2 - w.shape[1])), constant_values=-1) for w in ws])
    r = lat.rank
    short_hom = np.stack([(short_codes == j).sum(1) - (short_codes == j + r).sum(1) for j in range(r)], axis=1)
    G = np.concatenate([tab.mats[hyp[viol]], np.concatenate(ms)])
    shifts = np.concatenate([av[viol], short_hom.astype(float) @ a.vector])
    imgs = G[:, None] @ V[None, :] @ _x_flow(shifts)[:, None]  # (ng, ns, 2, 2)
    rel = Vinv[None, None, :] @ imgs[:, :, None]  # (ng, ns, ns, 2, 2)
    min_disp = float(np.log(_op_norms(rel)).min())
    bound = 2 * K0 / (1.0 - est.sup_value)
    max_viol_len = float(L[viol].max()) if viol.size else 0.0
    letters = [word_str(tab.word(int(hyp[i]))) for i in viol]
    return {
        "class_vector": list(a.v),
        "maxlen": maxlen,
        "sup": est.sup_value,
        "epsilon": 1.0 - est.sup_value,
        "min_margin": float(margins.min()),
        "all_margins_positive": bool((margins > 0).all()),
        "generator_margins": gens,
        "fixed_point_candidates": int(tight.size),
        "fixed_points_found": fixed,
        "n_samples": n_samples,
        "seed": seed,
        "K0": K0,
        "violations": letters,
        "violation_length_bound": bound,
        "violations_within_bound": bool(max_viol_len <= bound),
        "min_displacement": min_disp,
    }


def parse_class(text: str, dim: int | None = None) -> CohClass:
    try:
        v = tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise InvalidInputError(f"bad class vector {text!r}") from exc
    a = CohClass(v)
    if dim is not None:
        _check_dim(a, dim)
    return a


def class_of_word(lat: LatticeRep, w: Sequence[int]) -> ConjClass:
    """Conjugacy class data (length, homology) of the element spelled by ``w``."""
    g = eval_word(lat, w)
    return ConjClass(tuple(w), cover.translation_length(g), tuple(int(x) for x in abelianize(w, lat.genus)))
