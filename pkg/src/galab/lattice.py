"""Cocompact surface lattices realized by generator matrices.

Words are plain tuples of signed generator indices ``±1..±2g``.  Conjugacy
classes are enumerated as cyclically reduced necklaces (lexicographically
least rotation) and then merged when two representatives evaluate to the
same group element.  Every hyperbolic class is a periodic orbit of the
homogeneous flow with period equal to its translation length.
"""
from __future__ import annotations

import functools
import io
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import cover
from .cover import CoverElement, ElementClass
from .errors import ConstructionFailedError, InvalidInputError, ResourceLimitError
from .parallel import pmap

Word = tuple[int, ...]

DEFAULT_MAX_NODES = 60_000_000
# classification codes used in ClassTable.kind
HYP, PARA, ELL, CENT = 0, 1, 2, 3
_KIND_NAMES = {HYP: "hyperbolic", PARA: "parabolic", ELL: "elliptic", CENT: "central"}


@dataclass(frozen=True)
class LatticeRep:
    genus: int
    gens: tuple[CoverElement, ...]
    relator: Word
    tol: float = 1e-9
    convention: str = ""

    @property
    def rank(self) -> int:
        return 2 * self.genus


@dataclass(frozen=True)
class ConjClass:
    rep: Word
    length: float
    homology: tuple[int, ...]

    @property
    def tau(self) -> float:
        return self.length

    @property
    def Ju(self) -> float:
        return self.length

    @property
    def Js(self) -> float:
        return -self.length


def word_str(w: Sequence[int]) -> str:
    return ".".join(str(int(x)) for x in w)


def parse_word(s: str) -> Word:
    s = s.strip()
    return tuple(int(x) for x in s.split(".")) if s else ()


def free_reduce(w: Sequence[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(int(x))
    return tuple(out)


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = list(free_reduce(w))
    while len(w) > 1 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def invert_word(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def canonical_rotation(w: Sequence[int], genus: int) -> Word:
    """Least rotation in the enumeration order (positive letters before inverses)."""
    w = tuple(w)
    if not w:
        return w
    key = [_code(x, genus) for x in w]
    rots = [tuple(key[i:] + key[:i]) for i in range(len(w))]
    i = min(range(len(w)), key=lambda j: rots[j])
    return w[i:] + w[:i]


def _code(letter: int, genus: int) -> int:
    return letter - 1 if letter > 0 else 2 * genus - letter - 1


def _letter_table(genus: int) -> np.ndarray:
    r = 2 * genus
    return np.array([i + 1 for i in range(r)] + [-(i + 1) for i in range(r)], dtype=np.int16)


def abelianize(w: Sequence[int], genus: int | None = None) -> np.ndarray:
    """Exponent-sum vector of a word in Z^{2g}."""
    r = 2 * genus if genus is not None else max((abs(x) for x in w), default=0)
    out = np.zeros(r, dtype=np.int64)
    for x in w:
        if abs(x) > r or x == 0:
            raise InvalidInputError(f"letter {x} outside generator range")
        out[abs(x) - 1] += 1 if x > 0 else -1
    return out


# --- construction -----------------------------------------------------------

OCTAGON_RELATORS: dict[str, Word] = {
    "alternating": (1, -2, 3, -4, -1, 2, -3, 4),
    "cyclic": (1, 2, 3, 4, -1, -2, -3, -4),
    "alternating-reversed": (4, -3, 2, -1, -4, 3, -2, 1),
}


def octagon_lattice(tol: float = 1e-9) -> LatticeRep:
    """Genus-2 group of the regular hyperbolic octagon.

    ``T_k = R_k B R_k^-1`` with ``B = X^{L_B}`` (axis through i, commuting
    with X^t) and ``R_k`` the rotation of the hyperbolic plane about i by
    ``k*pi/4``, i.e. the SO(2) matrix of angle ``k*pi/8``.  The side pairing
    lengths satisfy ``cosh(L_B/2) = 1 + sqrt(2)``.
    """
    LB = 2 * math.acosh(1 + math.sqrt(2))
    B = cover.one_param("X", LB)
    gens = []
    for k in range(4):
        r = cover.rotation(k * math.pi / 8)
        g = cover.compose_all((r, B, cover.inverse(r)))
        # winding-0 representative of the same PSL element
        gens.append(CoverElement(g.m, 0))
    gens = tuple(gens)
    for name, rel in OCTAGON_RELATORS.items():
        probe = LatticeRep(2, gens, rel, tol, name)
        if cover.classify(eval_word(probe, rel)) is ElementClass.CENTRAL:
            lat = LatticeRep(2, gens, rel, tol, f"octagon/{name}:" + word_str(rel))
            return lat
    raise ConstructionFailedError("no candidate relator closes to +-I")


def eval_word(lat: LatticeRep, w: Sequence[int]) -> CoverElement:
    out = cover.identity()
    invs = {}
    for x in w:
        g = lat.gens[abs(x) - 1]
        if x < 0:
            if x not in invs:
                invs[x] = cover.inverse(g)
            g = invs[x]
        out = cover.compose(out, g)
    return out


def relator_winding(lat: LatticeRep) -> int:
    return eval_word(lat, lat.relator).k


def check_lattice(lat: LatticeRep) -> dict:
    """Evaluate the LatticeRep invariants; returns a dict of named booleans."""
    rel = eval_word(lat, lat.relator)
    closes = cover.psl_close(rel.m, (1.0, 0.0, 0.0, 1.0), lat.tol)
    tab = _reduced_word_arrays(lat, 4)
    near = _near_identity(np.concatenate(tab[1]), 1e-6)
    return {
        "relator_closes": bool(closes),
        "euler_number": abs(rel.k) == 2 * lat.genus - 2,
        "discrete_to_length_4": not bool(near.any()),
    }


# --- enumeration engine -------------------------------------------------------


def _gen_arrays(lat: LatticeRep) -> tuple[np.ndarray, np.ndarray]:
    r = lat.rank
    mats = np.empty((2 * r, 2, 2))
    for i, g in enumerate(lat.gens):
        mats[i] = g.matrix
        a, b, c, d = g.m
        mats[i + r] = np.array([[d, -b], [-c, a]])
    inv = np.array([(i + r) % (2 * r) for i in range(2 * r)], dtype=np.int64)
    return mats, inv


def _near_identity(mats: np.ndarray, tol: float) -> np.ndarray:
    eye = np.eye(2)
    dp = np.abs(mats - eye).reshape(len(mats), -1).max(axis=1)
    dm = np.abs(mats + eye).reshape(len(mats), -1).max(axis=1)
    return np.minimum(dp, dm) <= tol


def _reduced_word_arrays(lat: LatticeRep, maxlen: int, max_nodes: int = DEFAULT_MAX_NODES):
    """All freely reduced words of length 1..maxlen, as (codes, mats) per length.

    Returned lists are indexed by length-1; words of each length are in
    lexicographic code order.
    """
    gm, inv = _gen_arrays(lat)
    K = len(gm)
    total = sum(K * (K - 1) ** (n - 1) for n in range(1, maxlen + 1))
    if total > max_nodes:
        raise ResourceLimitError(f"{total} reduced words exceed the node budget {max_nodes}")
    words = np.arange(K, dtype=np.int8)[:, None]
    mats = gm.copy()
    out_w, out_m = [words], [mats]
    for _ in range(1, maxlen):
        m = len(words)
        W = np.repeat(words, K, axis=0)
        B = np.tile(np.arange(K, dtype=np.int8), m)
        ok = B != inv[W[:, -1]]
        words = np.concatenate([W[ok], B[ok, None]], axis=1)
        mats = np.repeat(mats, K, axis=0)[ok] @ gm[B[ok]]
        out_w.append(words)
        out_m.append(mats)
    return out_w, out_m


DEFAULT_BLOCK = 200_000
# relative gap below which two translation lengths count as equal
LENGTH_TIE = 1e-12


def _necklace_blocks(gm, inv, first, maxlen, max_nodes, block=DEFAULT_BLOCK):
    """Yield ``(n, words, mats)`` for the necklaces starting with code ``first``.

    The prenecklace tree is walked breadth first and the frontier is split
    into row ranges once it exceeds ``block`` rows, so memory stays bounded.
    Blocks of equal length come out in lexicographic order.
    """
    K = len(gm)
    nodes = [1]

    def walk(words, period, mats, n):
        neck = (n % period == 0) & (words[:, -1] != inv[words[:, 0]])
        if neck.any():
            yield n, words[neck], mats[neck]
        if n == maxlen or len(words) == 0:
            return
        m = len(words)
        W = np.repeat(words, K, axis=0)
        B = np.tile(np.arange(K, dtype=np.int8), m)
        P = np.repeat(period, K)
        ref = W[np.arange(len(W)), n - P]
        ok = (B >= ref) & (B != inv[W[:, -1]])
        W, B, P, ref = W[ok], B[ok], P[ok], ref[ok]
        words = np.concatenate([W, B[:, None]], axis=1)
        period = np.where(B == ref, P, n + 1)
        mats = np.repeat(mats, K, axis=0)[ok] @ gm[B]
        del W, P, ref
        nodes[0] += len(words)
        if nodes[0] > max_nodes:
            raise ResourceLimitError(f"necklace enumeration exceeded the node budget {max_nodes}")
        for lo in range(0, max(len(words), 1), block):
            yield from walk(words[lo : lo + block], period[lo : lo + block], mats[lo : lo + block], n + 1)

    words = np.array([[first]], dtype=np.int8)
    yield from walk(words, np.array([1], dtype=np.int64), gm[first][None].copy(), 1)


def _necklace_chunk(args):
    gm, inv, first, maxlen, max_nodes = args
    ws: list[list] = [[] for _ in range(maxlen)]
    ms: list[list] = [[] for _ in range(maxlen)]
    for n, w, m in _necklace_blocks(gm, inv, first, maxlen, max_nodes):
        ws[n - 1].append(w)
        ms[n - 1].append(m)
    out = []
    for n in range(maxlen):
        if ws[n]:
            out.append((np.concatenate(ws[n]), np.concatenate(ms[n])))
        else:
            out.append((np.zeros((0, n + 1), dtype=np.int8), np.zeros((0, 2, 2))))
    return out


def _dedup_elements(mats: np.ndarray, logtr: np.ndarray, hom: np.ndarray) -> np.ndarray:
    """Mask keeping the first occurrence of each group element.

    Elements are hashed on (round(log|tr|, 1e-8), homology) and confirmed by
    relative matrix distance below 1e-6, up to sign.
    """
    n = len(mats)
    keep = np.ones(n, dtype=bool)
    if n < 2:
        return keep
    key_t = np.round(logtr * 1e8).astype(np.int64)
    keys = [np.arange(n)] + [hom[:, j] for j in range(hom.shape[1] - 1, -1, -1)] + [key_t]
    order = np.lexsort(keys)
    k_sorted = np.column_stack([key_t[order], hom[order]])
    new_group = np.ones(n, dtype=bool)
    new_group[1:] = np.any(k_sorted[1:] != k_sorted[:-1], axis=1)
    gid = np.cumsum(new_group) - 1
    pending = np.flatnonzero(np.bincount(gid)[gid] > 1)
    scale = np.maximum(1.0, np.abs(mats).reshape(n, -1).max(axis=1))
    flat = mats.reshape(n, -1)
    while pending.size:
        idx = order[pending]
        g = gid[pending]
        first_pos = np.unique(g, return_index=True)
        leader = np.empty(g.max() + 1, dtype=np.int64)
        leader[first_pos[0]] = idx[first_pos[1]]
        lead = leader[g]
        diff = np.minimum(np.abs(flat[idx] - flat[lead]).max(axis=1), np.abs(flat[idx] + flat[lead]).max(axis=1))
        same = (diff / scale[lead] < 1e-6) & (idx != lead)
        keep[idx[same]] = False
        rest = (~same) & (idx != lead)
        # unmatched members regroup among themselves
        pending = pending[rest]
        if pending.size:
            gid_rest = gid[pending]
            counts = np.bincount(gid_rest)
            pending = pending[counts[gid_rest] > 1]
    return keep


@dataclass
class ClassTable:
    """Array form of the enumerated conjugacy classes, in enumeration order."""

    genus: int
    maxlen: int
    codes: np.ndarray  # (n, maxlen) int8, -1 padded
    wordlen: np.ndarray
    mats: np.ndarray
    trace: np.ndarray
    length: np.ndarray
    homology: np.ndarray
    kind: np.ndarray
    stats: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.wordlen)

    def word(self, i: int) -> Word:
        letters = _letter_table(self.genus)
        return tuple(int(letters[c]) for c in self.codes[i, : self.wordlen[i]])

    @property
    def hyperbolic(self) -> np.ndarray:
        return self.kind == HYP

    def conj_class(self, i: int) -> ConjClass:
        return ConjClass(self.word(i), float(self.length[i]), tuple(int(x) for x in self.homology[i]))

    def upto(self, n: int) -> np.ndarray:
        return self.wordlen <= n


def _kinds(mats: np.ndarray, tr: np.ndarray) -> np.ndarray:
    kind = np.full(len(tr), HYP, dtype=np.int8)
    gap = np.abs(tr) - 2.0
    kind[gap < -cover.PARABOLIC_BAND] = ELL
    kind[np.abs(gap) <= cover.PARABOLIC_BAND] = PARA
    kind[_near_identity(mats, cover.CENTRAL_TOL)] = CENT
    return kind


@functools.lru_cache(maxsize=16)
def class_table(lat: LatticeRep, maxlen: int, max_nodes: int = DEFAULT_MAX_NODES, workers: int | None = None) -> ClassTable:
    """Enumerate conjugacy classes of word length <= maxlen.

    Cached per (lattice, maxlen).  Output is independent of ``workers``.
    """
    if maxlen < 1:
        raise InvalidInputError("maxlen must be >= 1")
    gm, inv = _gen_arrays(lat)
    K = len(gm)
    chunks = pmap(_necklace_chunk, [(gm, inv, f, maxlen, max_nodes) for f in range(K)], workers)
    ws, ms, lens = [], [], []
    for n in range(maxlen):
        for c in chunks:
            w, m = c[n]
            if len(w):
                pad = np.full((len(w), maxlen), -1, dtype=np.int8)
                pad[:, : n + 1] = w
                ws.append(pad)
                ms.append(m)
                lens.append(np.full(len(w), n + 1, dtype=np.int16))
    codes = np.concatenate(ws)
    mats = np.concatenate(ms)
    wordlen = np.concatenate(lens)
    r = lat.rank
    hom = np.zeros((len(codes), r), dtype=np.int64)
    for j in range(r):
        hom[:, j] = (codes == j).sum(axis=1) - (codes == j + r).sum(axis=1)
    tr = mats[:, 0, 0] + mats[:, 1, 1]
    n_necklaces = len(codes)
    keep = _dedup_elements(mats, np.log(np.maximum(np.abs(tr), 1e-300)), hom)
    codes, mats, wordlen, hom, tr = codes[keep], mats[keep], wordlen[keep], hom[keep], tr[keep]
    kind = _kinds(mats, tr)
    length = np.where(kind == HYP, cover.length_from_trace(tr), 0.0)
    stats = {"necklaces": int(n_necklaces), "classes": int(len(codes)), "merged": int(n_necklaces - len(codes))}
    return ClassTable(lat.genus, maxlen, codes, wordlen, mats, tr, length, hom, kind, stats)


@dataclass
class HomologyMinima:
    """Shortest hyperbolic class per homology vector, split by exact word length.

    ``min_length[n-1, j]`` is the least translation length among hyperbolic
    necklaces of word length ``n`` with homology ``homology[j]`` (``inf`` if
    none); ``witness[n-1][j]`` is a word attaining it.  Duplicate necklaces of
    one element do not change a minimum, so no element dedup is needed.
    """

    genus: int
    maxlen: int
    homology: np.ndarray
    min_length: np.ndarray
    witness: list[list[Word | None]]

    def cumulative(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-N minima over word length <= N, and the word length of the argmin."""
        best = self.min_length.copy()
        src = np.zeros(best.shape, dtype=np.int64)
        for n in range(1, self.maxlen):
            # rounding noise between conjugate words must not move the witness
            better = self.min_length[n] < best[n - 1] * (1.0 - LENGTH_TIE)
            best[n] = np.where(better, self.min_length[n], best[n - 1])
            src[n] = np.where(better, n, src[n - 1])
        return best, src


def _hom_key(hom: np.ndarray) -> np.ndarray:
    shifted = hom.astype(np.int64) + 64
    key = np.zeros(len(hom), dtype=np.int64)
    for j in range(hom.shape[1]):
        key = key * 128 + shifted[:, j]
    return key


def _minima_chunk(args):
    gm, inv, first, maxlen, max_nodes, r = args
    letters = _letter_table(r // 2)
    per_len: list[dict[int, tuple[float, Word]]] = [{} for _ in range(maxlen)]
    for n, w, m in _necklace_blocks(gm, inv, first, maxlen, max_nodes):
        tr = np.abs(m[:, 0, 0] + m[:, 1, 1])
        hyp = tr - 2.0 > cover.PARABOLIC_BAND
        if not hyp.any():
            continue
        w, tr = w[hyp], tr[hyp]
        hom = np.zeros((len(w), r), dtype=np.int64)
        for j in range(r):
            hom[:, j] = (w == j).sum(axis=1) - (w == j + r).sum(axis=1)
        key = _hom_key(hom)
        # smallest trace per key, earliest row on ties
        order = np.lexsort((np.arange(len(w)), tr, key))
        ks = key[order]
        firsts = order[np.r_[True, ks[1:] != ks[:-1]]]
        lengths = cover.length_from_trace(tr[firsts])
        bucket = per_len[n - 1]
        for i, L in zip(firsts, lengths):
            k = int(key[i])
            if k not in bucket or L < bucket[k][0]:
                bucket[k] = (float(L), tuple(int(x) for x in letters[w[i]]))
    return per_len


@functools.lru_cache(maxsize=16)
def homology_minima(lat: LatticeRep, maxlen: int, max_nodes: int = 4 * DEFAULT_MAX_NODES, workers: int | None = None) -> HomologyMinima:
    """Stream all necklaces up to ``maxlen`` keeping only per-homology minima.

    Memory is bounded by the frontier block size, which makes word length
    10 feasible on a laptop.  Output is independent of ``workers``.
    """
    if maxlen < 1:
        raise InvalidInputError("maxlen must be >= 1")
    gm, inv = _gen_arrays(lat)
    r = lat.rank
    chunks = pmap(_minima_chunk, [(gm, inv, f, maxlen, max_nodes, r) for f in range(len(gm))], workers)
    merged: list[dict[int, tuple[float, Word]]] = [{} for _ in range(maxlen)]
    for per_len in chunks:
        for n in range(maxlen):
            for k, (L, w) in per_len[n].items():
                cur = merged[n].get(k)
                if cur is None or L < cur[0]:
                    merged[n][k] = (L, w)
    keys = sorted({k for d in merged for k in d})
    homs = np.array([[((k >> (7 * (r - 1 - j))) & 127) - 64 for j in range(r)] for k in keys], dtype=np.int64)
    homs = homs.reshape(len(keys), r)
    col = {k: j for j, k in enumerate(keys)}
    mins = np.full((maxlen, len(keys)), np.inf)
    wit: list[list[Word | None]] = [[None] * len(keys) for _ in range(maxlen)]
    for n in range(maxlen):
        for k, (L, w) in merged[n].items():
            mins[n, col[k]] = L
            wit[n][col[k]] = w
    return HomologyMinima(lat.genus, maxlen, homs, mins, wit)


def enumerate_words(
    lat: LatticeRep,
    maxlen: int,
    mode: str = "all_reduced",
    max_nodes: int = DEFAULT_MAX_NODES,
) -> Iterator[Word] | Iterator[ConjClass]:
    """Stream words (``all_reduced``) or conjugacy classes (``conj_classes``).

    Order is deterministic: by length, then lexicographically with positive
    letters ``1..2g`` before their inverses.
    """
    if maxlen < 1:
        raise InvalidInputError("maxlen must be >= 1")
    if mode == "all_reduced":
        ws, _ = _reduced_word_arrays(lat, maxlen, max_nodes)
        letters = _letter_table(lat.genus)
        return (tuple(int(x) for x in letters[row]) for w in ws for row in w)
    if mode == "conj_classes":
        tab = class_table(lat, maxlen, max_nodes)
        return (tab.conj_class(i) for i in range(len(tab)))
    raise InvalidInputError(f"unknown mode {mode!r}")


def length_spectrum(lat: LatticeRep, maxlen: int, max_nodes: int = DEFAULT_MAX_NODES) -> list[ConjClass]:
    tab = class_table(lat, maxlen, max_nodes)
    idx = np.flatnonzero(tab.hyperbolic)
    # lengths equal up to rounding sort by word length, then enumeration order
    key = np.round(np.log(tab.length[idx]) / LENGTH_TIE)
    idx = idx[np.lexsort((idx, tab.wordlen[idx], key))]
    return [tab.conj_class(int(i)) for i in idx]


def spectrum_csv(classes: Sequence[ConjClass]) -> str:
    buf = io.StringIO()
    r = len(classes[0].homology) if classes else 4
    buf.write(",".join(["word", "length"] + [f"h{j + 1}" for j in range(r)] + ["tau", "Ju", "Js"]) + "\n")
    for c in classes:
        row = [word_str(c.rep), repr(c.length)] + [str(h) for h in c.homology]
        row += [repr(c.tau), repr(c.Ju), repr(c.Js)]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


# --- audit --------------------------------------------------------------------


@dataclass
class AuditItem:
    name: str
    value: object
    passed: bool


@dataclass
class LatticeAudit:
    maxlen: int
    items: list[AuditItem]

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items)

    def as_dict(self) -> dict:
        return {"maxlen": self.maxlen, "passed": self.passed, "items": [vars(i) for i in self.items]}


def audit_lattice(lat: LatticeRep, maxlen: int, displacement_maxlen: int = 6) -> LatticeAudit:
    tab = class_table(lat, maxlen)
    items = []
    n_para = int((tab.kind == PARA).sum())
    n_ell = int((tab.kind == ELL).sum())
    items.append(AuditItem("parabolic_classes", n_para, n_para == 0))
    items.append(AuditItem("elliptic_classes", n_ell, n_ell == 0))
    rel = eval_word(lat, lat.relator)
    rel_ok = cover.classify(rel) is ElementClass.CENTRAL and abs(rel.k) == 2 * lat.genus - 2
    items.append(AuditItem("relator_winding", int(rel.k), bool(rel_ok)))
    hyp = tab.homology[tab.hyperbolic].astype(float)
    rank = int(np.linalg.matrix_rank(hyp)) if len(hyp) else 0
    items.append(AuditItem("homology_rank", rank, rank == lat.rank))
    ws, ms = _reduced_word_arrays(lat, min(maxlen, displacement_maxlen))
    mats = np.concatenate(ms)
    eye = np.eye(2)
    disp = np.minimum(
        np.abs(mats - eye).reshape(len(mats), -1).max(axis=1),
        np.abs(mats + eye).reshape(len(mats), -1).max(axis=1),
    )
    trivial = disp <= 1e-6
    min_disp = float(disp[~trivial].min())
    items.append(AuditItem("min_displacement", min_disp, min_disp > 1e-6))
    items.append(AuditItem("words_evaluating_to_identity", int(trivial.sum()), True))
    items.append(AuditItem("centralizer_spot_check", _centralizer_spot_check(lat, min(maxlen, 3)), True))
    items[-1].passed = items[-1].value == 0
    return LatticeAudit(maxlen, items)


def _centralizer_spot_check(lat: LatticeRep, maxlen: int) -> int:
    """Count enumerated non-central elements commuting with both T_0 and T_1."""
    ws, ms = _reduced_word_arrays(lat, maxlen)
    mats = np.concatenate(ms)
    a, b = lat.gens[0].matrix, lat.gens[1].matrix
    hits = np.ones(len(mats), dtype=bool)
    for g in (a, b):
        lhs, rhs = mats @ g, g @ mats
        d = np.minimum(np.abs(lhs - rhs).reshape(len(mats), -1).max(axis=1), np.abs(lhs + rhs).reshape(len(mats), -1).max(axis=1))
        hits &= d < 1e-8
    hits &= ~_near_identity(mats, 1e-9)
    return int(hits.sum())
