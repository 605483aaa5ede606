import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from galab import cover
from galab.cover import ElementClass
from galab.errors import DegenerateCommutatorError, InvalidInputError

finite = st.floats(-4, 4, allow_nan=False)


def test_one_param_identity_and_trace():
    assert cover.allclose(cover.one_param("X", 0.0), cover.identity())
    assert math.isclose(cover.trace_abs(cover.one_param("X", 2.0)), math.e + 1 / math.e, rel_tol=1e-14)


def test_sl2_relation_example():
    t, y = 0.7, 1.3
    lhs = cover.compose(cover.one_param("U", y), cover.one_param("X", t))
    rhs = cover.compose(cover.one_param("X", t), cover.one_param("U", math.exp(t) * y))
    assert np.abs(lhs.matrix - rhs.matrix).max() <= 1e-12
    assert lhs.k == rhs.k


@given(finite, finite)
def test_one_param_relations(t, x):
    for kind, sx in (("S", math.exp(-t) * x), ("U", math.exp(t) * x)):
        lhs = cover.compose(cover.one_param(kind, x), cover.one_param("X", t))
        rhs = cover.compose(cover.one_param("X", t), cover.one_param(kind, sx))
        assert cover.allclose(lhs, rhs, 1e-12 * max(1.0, abs(x) * math.exp(abs(t))))


@given(finite, finite)
def test_one_param_is_homomorphism(s, t):
    for kind in "XSU":
        a = cover.compose(cover.one_param(kind, s), cover.one_param(kind, t))
        assert cover.allclose(a, cover.one_param(kind, s + t), 1e-9)


def test_center_and_rotations():
    z = cover.central(1)
    assert cover.compose(z, cover.inverse(z)) == cover.identity()
    r = cover.rotation(math.pi / 3)
    six = cover.compose_all([r] * 6)
    assert cover.classify(six) is ElementClass.CENTRAL
    # six rotations of the line by pi/3 translate it by 2 pi, i.e. z^2
    assert cover.allclose(six, cover.central(2))
    assert cover.allclose(cover.compose_all([r] * 3), z)


def test_classification_examples():
    assert cover.classify(cover.one_param("X", 1.0)) is ElementClass.HYPERBOLIC
    assert cover.classify(cover.rotation(math.pi / 6)) is ElementClass.ELLIPTIC
    assert cover.classify(cover.one_param("S", 1.0)) is ElementClass.PARABOLIC
    assert cover.classify(cover.central(3)) is ElementClass.CENTRAL


@pytest.mark.parametrize("t", [-3.0, 0.5, 2.0])
def test_length_of_x(t):
    assert abs(cover.translation_length(cover.one_param("X", t)) - abs(t)) <= 1e-12
    assert abs(2 * math.log(cover.op_norm(cover.one_param("X", abs(t)))) - abs(t)) <= 1e-12


def test_length_from_trace_example():
    assert abs(cover.length_from_trace(4.8284271247) - 3.0571418) < 1e-7
    assert cover.length_from_trace(1.5) == 0.0
    assert cover.translation_length(cover.one_param("S", 2.0)) == 0.0


def test_trace_round_trip_and_norm_bound():
    rng = np.random.default_rng(3)
    for _ in range(300):
        p = cover.random_element(rng, hyperbolic=True)
        L = cover.translation_length(p)
        assert abs(cover.trace_abs(p) - 2 * math.cosh(L / 2)) <= 1e-10 * max(1.0, cover.trace_abs(p))
        assert L <= 2 * math.log(cover.op_norm(p)) + 1e-12
        g = cover.random_element(rng)
        conj = cover.compose_all([g, p, cover.inverse(g)])
        assert abs(cover.translation_length(conj) - L) <= 1e-8 * max(1.0, L)


def test_homomorphism_and_winding_cocycle():
    rng = np.random.default_rng(4)
    for _ in range(1000):
        p = cover.compose(cover.random_element(rng), cover.rotation(rng.uniform(-7, 7)))
        q = cover.compose(cover.random_element(rng), cover.rotation(rng.uniform(-7, 7)))
        pq = cover.compose(p, q)
        assert cover.psl_close(pq.m, cover.as_mat2(p.matrix @ q.matrix), 1e-9)
        assert pq.k - p.k - q.k in (-1, 0, 1)
        a, b, c, d = pq.m
        assert abs(a * d - b * c - 1) <= 1e-12


def test_associativity_and_central_commutation():
    rng = np.random.default_rng(5)
    z = cover.central(1)
    for _ in range(200):
        p, q, r = (cover.compose(cover.random_element(rng), cover.rotation(rng.uniform(-4, 4))) for _ in range(3))
        assert cover.allclose(cover.compose(cover.compose(p, q), r), cover.compose(p, cover.compose(q, r)), 1e-9)
        assert cover.compose(z, p) == cover.compose(p, z)


def test_lift_is_monotone_and_equivariant():
    rng = np.random.default_rng(6)
    x = np.linspace(-5, 5, 401)
    for _ in range(50):
        p = cover.compose(cover.random_element(rng), cover.rotation(rng.uniform(-5, 5)))
        f = cover.lift_eval(p, x)
        assert np.all(np.diff(f) > 0)
        assert np.allclose(cover.lift_eval(p, x + math.pi), f + math.pi, atol=1e-12)


def test_commutator_example():
    p = cover.one_param("X", 1.0)
    q = cover.element((1.0, 1.0, 1.0, 2.0))
    seq = dict(cover.commutator_length_sequence(p, q, 40))
    tr5 = abs(4 - (math.exp(5) + math.exp(-5)))
    assert abs(seq[5] - 2 * math.acosh(tr5 / 2) / 10) < 1e-12
    assert abs(seq[5] - 0.9945) < 5e-4
    assert abs(seq[40] - 1.0) <= 0.2 / 40
    seq2 = dict(cover.commutator_length_sequence(cover.one_param("X", 2.0), q, 40))
    assert abs(seq2[40] - 2.0) <= 0.4 / 40


def test_commutator_errors():
    p = cover.one_param("X", 1.0)
    with pytest.raises(DegenerateCommutatorError):
        cover.commutator_length_sequence(p, cover.one_param("X", 0.3), 5)
    with pytest.raises(InvalidInputError):
        cover.commutator_length_sequence(cover.rotation(0.3), p, 5)


def test_bad_determinant_rejected():
    with pytest.raises(InvalidInputError):
        cover.element((2.0, 0.0, 0.0, 2.0))


def test_commutator_error_constant():
    # n (ratio(n) - L) -> log|b c| with b, c off-diagonal entries of Q in P's eigenbasis
    rng = np.random.default_rng(9)
    for _ in range(10):
        p = cover.random_element(rng, hyperbolic=True)
        q = cover.random_element(rng)
        e, _ = cover.diagonalizer(p)
        qc = np.linalg.solve(e, q.matrix @ e)
        n, r = cover.commutator_length_sequence(p, q, 40)[-1]
        assert abs(n * (r - cover.translation_length(p)) - math.log(abs(qc[0, 1] * qc[1, 0]))) <= 1e-6
