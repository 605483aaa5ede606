import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from galab.errors import InvalidInputError
from galab.symbolic_flow import toral as T
from galab.symbolic_flow.toral import CAT, smith_normal_form

small = st.integers(-6, 6)


def trace_n(A, n):
    P = T.mat_pow(T.toral(A).matrix, n)
    return P[0][0] + P[1][1]


@given(st.lists(st.lists(st.integers(-50, 50), min_size=3, max_size=3), min_size=3, max_size=3))
def test_smith_normal_form(M):
    U, S, V = smith_normal_form(M)
    U, S, V, A = (np.array(x, dtype=object) for x in (U, S, V, M))
    assert (U.dot(A).dot(V) == S).all()
    assert abs(round(float(np.linalg.det(U.astype(float))))) == 1
    assert abs(round(float(np.linalg.det(V.astype(float))))) == 1
    d = [S[i, i] for i in range(3)]
    assert all(S[i, j] == 0 for i in range(3) for j in range(3) if i != j)
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (a == 0 and b == 0) or (a != 0 and b % a == 0)


def test_smith_big_integers():
    M = [[10**30 + 7, 3], [2, 10**20]]
    U, S, V = smith_normal_form(M)
    prod = [[sum(U[i][k] * sum(M[k][l] * V[l][j] for l in range(2)) for k in range(2)) for j in range(2)] for i in range(2)]
    assert prod == [list(r) for r in S]
    assert S[0][0] * S[1][1] == abs(M[0][0] * M[1][1] - M[0][1] * M[1][0])


def test_examples():
    assert len(T.fixed_points(CAT, 1)) == 1
    assert T.fixed_points(CAT, 1).fractions() == [(Fraction(0), Fraction(0))]
    assert len(T.fixed_points(CAT, 2)) == 5 and trace_n(CAT, 2) == 7
    assert len(T.fixed_points(CAT, 3)) == 16 and trace_n(CAT, 3) == 18


@pytest.mark.parametrize("n", range(1, 13))
def test_fix_counts_and_oracles(n):
    fp = T.fixed_points(CAT, n)
    assert len(fp) == abs(trace_n(CAT, n) - 2) == T.fix_count(CAT, n)
    pts = set(fp.fractions())
    assert len(pts) == len(fp)
    # exact periodicity in rationals
    A = T.mat_pow(CAT.matrix, n)
    for x, y in list(pts)[:200]:
        ax, ay = A[0][0] * x + A[0][1] * y, A[1][0] * x + A[1][1] * y
        assert (ax - x).denominator == 1 and (ay - y).denominator == 1
    closure = T.fixed_points_closure(CAT, n)
    assert set(closure.fractions()) == pts
    if n <= 7:
        assert set(T.fixed_points_grid(CAT, n).fractions()) == pts


@given(small, small, small)
def test_other_automorphisms(a, b, c):
    assume(a != 0)
    # complete [[a, b], [c, d]] to determinant 1 when possible
    num = 1 + b * c
    assume(num % a == 0)
    d = num // a
    assume(abs(a + d) > 2)
    for n in (1, 2, 3):
        assert len(T.fixed_points(((a, b), (c, d)), n)) == abs(trace_n(((a, b), (c, d)), n) - 2)


def test_validation():
    with pytest.raises(InvalidInputError):
        T.toral(((1, 1), (0, 1)))
    with pytest.raises(InvalidInputError):
        T.toral(((2, 0), (0, 1)))
    assert T.toral("2,1,1,1") == CAT
    assert math.isclose(CAT.entropy, math.log((3 + math.sqrt(5)) / 2), rel_tol=1e-15)


def test_prime_orbits_partition_fixed_points():
    for n in range(1, 9):
        total = sum(len(T.prime_orbits(CAT, k)) * k for k in range(1, n + 1) if n % k == 0)
        assert total == len(T.fixed_points(CAT, n))


def test_orbits_csv_header():
    text = T.orbits_csv([])
    assert text.splitlines()[0] == "n,x_num,x_den,y_num,y_den,tau,Ju,Js,homology"
