import itertools
import math

import numpy as np
import pytest

from galab import cover, lattice
from galab.cover import ElementClass
from galab.errors import InvalidInputError, ResourceLimitError

LB = 2 * math.acosh(1 + math.sqrt(2))


@pytest.fixture(scope="module")
def lat():
    return lattice.octagon_lattice()


def brute_necklaces(genus: int, n: int) -> int:
    """Cyclically reduced words of length n counted up to rotation."""
    letters = [i for i in range(1, 2 * genus + 1)] + [-i for i in range(1, 2 * genus + 1)]
    seen = set()
    for w in itertools.product(letters, repeat=n):
        if any(w[i] == -w[(i + 1) % n] for i in range(n)) and n > 1:
            continue
        seen.add(min(w[i:] + w[:i] for i in range(n)))
    return len(seen)


def test_relator_and_generators(lat):
    rel = lattice.eval_word(lat, lat.relator)
    assert cover.psl_close(rel.m, (1.0, 0.0, 0.0, 1.0), 1e-9)
    assert abs(rel.k) == 2
    assert lat.convention.startswith("octagon/")
    for g in lat.gens:
        assert abs(cover.translation_length(g) - LB) <= 1e-12
        assert g.k == 0
    assert all(lattice.check_lattice(lat).values())


def test_axis_of_b_is_shared_with_x():
    b = cover.one_param("X", LB)
    x = cover.one_param("X", 0.37)
    assert np.abs(b.matrix @ x.matrix - x.matrix @ b.matrix).max() <= 1e-14


def test_word_counts(lat):
    assert len(list(lattice.enumerate_words(lat, 1))) == 8
    assert len(list(lattice.enumerate_words(lat, 2))) == 64
    words = list(lattice.enumerate_words(lat, 3))
    assert len(words) == 8 + 56 + 392
    assert all(w[i] != -w[i + 1] for w in words for i in range(len(w) - 1))


def test_conj_classes_merge_rotations(lat):
    reps = {c.rep for c in lattice.enumerate_words(lat, 2, mode="conj_classes")}
    assert ((1, 2) in reps) != ((2, 1) in reps)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_necklace_count_matches_brute_force(lat, n):
    tab = lattice.class_table(lat, n)
    prev = lattice.class_table(lat, n - 1).stats["necklaces"] if n > 1 else 0
    assert tab.stats["necklaces"] - prev == brute_necklaces(2, n)
    # merged necklaces describe the same element of the group
    assert tab.stats["classes"] + tab.stats["merged"] == tab.stats["necklaces"]


def test_merged_necklaces_differ_by_a_relator(lat):
    # a necklace and the one obtained by inserting a relator conjugate evaluate alike
    w = (1, 2, 3)
    rel = lat.relator
    longer = w + rel
    a, b = lattice.eval_word(lat, w), lattice.eval_word(lat, longer)
    assert cover.psl_close(a.m, b.m, 1e-9)


def test_abelianize_examples(lat):
    assert not np.any(lattice.abelianize(lat.relator, 2))
    assert list(lattice.abelianize((1, 2, -1), 2)) == [0, 1, 0, 0]
    u, v = (1, 3, -2), (4, 4, 1)
    comm = lattice.invert_word(u) + lattice.invert_word(v) + u + v
    assert not np.any(lattice.abelianize(comm, 2))
    assert np.array_equal(lattice.abelianize(u + v, 2), lattice.abelianize(u, 2) + lattice.abelianize(v, 2))


def test_eval_is_homomorphism(lat):
    rng = np.random.default_rng(1)
    for _ in range(1000):
        u = lattice.free_reduce(tuple(int(x) for x in rng.choice([1, 2, 3, 4, -1, -2, -3, -4], rng.integers(1, 6))))
        v = lattice.free_reduce(tuple(int(x) for x in rng.choice([1, 2, 3, 4, -1, -2, -3, -4], rng.integers(1, 6))))
        lhs = lattice.eval_word(lat, u + v)
        rhs = cover.compose(lattice.eval_word(lat, u), lattice.eval_word(lat, v))
        scale = max(1.0, cover.op_norm(rhs) ** 2)
        assert cover.allclose(lhs, rhs, 1e-10 * scale)


def test_spectrum_properties(lat):
    spec = lattice.length_spectrum(lat, 6)
    assert abs(spec[0].length - LB) <= 1e-9
    assert all(c.Ju == -c.Js == c.tau == c.length for c in spec)
    for c in spec[::97]:
        rot = c.rep[1:] + c.rep[:1]
        assert abs(cover.translation_length(lattice.eval_word(lat, rot)) - c.length) <= 1e-10 * max(1, c.length)
        assert np.array_equal(lattice.abelianize(rot, 2), np.array(c.homology))
    small = {lattice.canonical_rotation(c.rep, 2) for c in lattice.length_spectrum(lat, 4)}
    big = {lattice.canonical_rotation(c.rep, 2) for c in spec}
    assert small <= big


def test_spectrum_csv(lat):
    text = lattice.spectrum_csv(lattice.length_spectrum(lat, 2))
    head, first = text.splitlines()[:2]
    assert head == "word,length,h1,h2,h3,h4,tau,Ju,Js"
    assert lattice.parse_word(first.split(",")[0])


def test_audit_at_maxlen_6(lat):
    rep = lattice.audit_lattice(lat, 6)
    items = {i.name: i for i in rep.items}
    assert items["parabolic_classes"].value == 0
    assert items["homology_rank"].value == 4
    assert abs(items["relator_winding"].value) == 2
    assert rep.passed
    assert lattice.audit_lattice(lat, 1).passed


def test_power_diagonalization(lat):
    rng = np.random.default_rng(2)
    spec = lattice.length_spectrum(lat, 4)
    for i in rng.choice(len(spec), 20, replace=False):
        c = spec[int(i)]
        g = lattice.eval_word(lat, c.rep)
        e, sign = cover.diagonalizer(g)
        for n in range(1, 5):
            gn = cover.power(g, n).matrix
            d = np.linalg.solve(e, gn @ e)
            target = sign**n * np.diag([math.exp(n * c.length / 2), math.exp(-n * c.length / 2)])
            assert np.abs(d - target).max() <= 1e-6 * math.exp(n * c.length / 2)


def test_no_elliptic_or_central_spurious_classes(lat):
    tab = lattice.class_table(lat, 6)
    assert not np.any(tab.kind == lattice.ELL)
    assert not np.any(tab.kind == lattice.PARA)


def test_homology_minima_matches_class_table(lat):
    tab = lattice.class_table(lat, 6)
    hm = lattice.homology_minima(lat, 6)
    best, _ = hm.cumulative()
    lookup = {tuple(h): j for j, h in enumerate(hm.homology.tolist())}
    hyp = tab.hyperbolic
    for h in {tuple(x) for x in tab.homology[hyp].tolist()}:
        mask = hyp & np.all(tab.homology == np.array(h), axis=1)
        assert abs(tab.length[mask].min() - best[-1, lookup[h]]) <= 1e-12 * best[-1, lookup[h]]


def test_errors(lat):
    with pytest.raises(InvalidInputError):
        lattice.class_table(lat, 0)
    with pytest.raises(ResourceLimitError):
        lattice.class_table(lat, 6, 1000)
