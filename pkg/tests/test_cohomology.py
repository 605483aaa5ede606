import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from galab import cohomology as coh
from galab import lattice
from galab.errors import InvalidInputError

LB = 2 * math.acosh(1 + math.sqrt(2))
# frozen from an exhaustive word-length-10 enumeration
S10_E1 = 0.40842124622363946
S10_WITNESS = "2.-1.-4.-1"
S_E1_HISTORY = [0.32710291267988206, 0.3271029126798821, 0.3431667316786123] + [S10_E1] * 7

vec = st.lists(st.floats(-3, 3, allow_nan=False), min_size=4, max_size=4)


@pytest.fixture(scope="module")
def lat():
    return lattice.octagon_lattice()


def test_evaluate_examples(lat):
    a = coh.CohClass((0.3, -1.2, 2.0, 0.7))
    assert coh.evaluate(a, lat.relator) == 0.0
    assert coh.evaluate(coh.basis(1), (1,)) == 1.0
    u, v = (1, 2), (3, -4, 3)
    comm = lattice.invert_word(u) + lattice.invert_word(v) + u + v
    assert coh.evaluate(a, comm) == 0.0
    assert math.isclose(coh.evaluate(a, u + v), coh.evaluate(a, u) + coh.evaluate(a, v))
    with pytest.raises(InvalidInputError):
        coh.evaluate(coh.CohClass((1.0, 2.0, 3.0)), (1,))


def test_zero_class(lat):
    est = coh.delta_sup(lat, coh.CohClass((0.0,) * 4), 6)
    assert est.sup_value == 0.0
    assert all(s == 0.0 for _, s in est.history)
    assert coh.in_delta(lat, coh.CohClass((0.0,) * 4), 6) is coh.Membership.PLAUSIBLE


def test_generator_ratio_certifies_out(lat):
    a = (LB * 1.01) * coh.basis(1)
    est = coh.delta_sup(lat, a, 1)
    assert abs(est.sup_value - 1.01) <= 1e-12
    assert coh.in_delta(lat, a, 1) is coh.Membership.CERTIFIED_OUT


def test_margin_validation(lat):
    for bad in (0.0, 0.5, -0.1):
        with pytest.raises(InvalidInputError):
            coh.in_delta(lat, coh.basis(1), 2, bad)


@given(vec, vec, st.floats(-5, 5, allow_nan=False))
def test_seminorm_laws(lat, u, v, t):
    a, b = np.array(u), np.array(v)
    s = lambda x: coh.sup_many(lat, x, 8)[0]  # noqa: E731
    sa, sb = s(a), s(b)
    assert s(a + b) <= sa + sb + 1e-12 * (1 + sa + sb)
    assert abs(s(t * a) - abs(t) * sa) <= 1e-12 * max(1.0, abs(t) * sa)


def test_monotone_in_n(lat):
    rng = np.random.default_rng(0)
    vs = rng.normal(size=(200, 4))
    prev = np.zeros(len(vs))
    for n in range(1, 9):
        cur = coh.sup_many(lat, vs, n)
        assert np.all(cur >= prev)
        prev = cur


def test_history_and_witness(lat):
    est = coh.delta_sup(lat, coh.basis(1), 8)
    hist = [s for _, s in est.history]
    assert hist == sorted(hist)
    assert est.sup_value == hist[-1]
    w = est.witness
    assert abs(abs(coh.evaluate(coh.basis(1), w.rep)) / w.length - est.sup_value) <= 1e-12
    d = est.as_dict()
    assert set(d) == {"class_vector", "maxlen", "sup", "witness_word", "history"}


def test_slice_symmetry_and_convexity(lat):
    sl = coh.delta_slice(lat, coh.CohClass((0.0,) * 4), coh.basis(1), coh.basis(2), 20, 5.0, 8)
    assert sl.values.shape == (41, 41)
    assert sl.values[20, 20] == 0.0
    assert np.array_equal(sl.values, sl.values[::-1, ::-1])
    inside = sl.values < 1.0
    assert 0 < inside.sum() < inside.size
    assert coh.midpoint_violations(inside) == 0
    rows = sl.to_csv().splitlines()
    assert rows[0] == "s,t,S_N,status" and len(rows) == 41 * 41 + 1


def test_midpoint_violation_detector():
    mask = np.zeros((5, 5), dtype=bool)
    mask[0, 0] = mask[4, 4] = True
    assert coh.midpoint_violations(mask) == 1
    for i in range(5):
        mask[i, i] = True
    assert coh.midpoint_violations(mask) == 0


def test_slice_rejects_parallel_directions(lat):
    with pytest.raises(InvalidInputError):
        coh.delta_slice(lat, coh.basis(1), coh.basis(2), 2.0 * coh.basis(2), 2, 1.0, 2)


def test_inner_ball(lat):
    r = coh.inner_ball_radius(lat, 8, 0.1)
    rng = np.random.default_rng(1)
    d = rng.normal(size=(500, 4))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    assert np.all(coh.sup_many(lat, r * d, 8) <= 0.9 + 1e-12)
    # the generator-only radius 0.9 * L_B is too large in some directions
    bad = 0.9 * LB * np.array([-2.0, 1.0, 0.0, -1.0]) / math.sqrt(6)
    assert coh.sup_many(lat, bad, 8)[0] > 1.0


def test_inverse_closure(lat):
    assert coh.inverse_symmetry_defect(lat, 8) <= 1e-12


def test_period_shift(lat):
    t0 = coh.class_of_word(lat, (1,))
    assert abs(coh.period_shift(lat, coh.basis(1), t0) - (LB + 1)) <= 1e-12
    assert coh.period_shift(lat, coh.CohClass((0.0,) * 4), t0) == t0.length
    rng = np.random.default_rng(2)
    for _ in range(20):
        v = rng.normal(size=4)
        s = coh.sup_many(lat, v, 8)[0]
        a = coh.CohClass(tuple(0.8 * v / s))
        tau, _ = coh.min_shifted_period(lat, a, 8)
        assert tau > 0


def test_gamma_a_audit(lat):
    rep = coh.gamma_a_audit(lat, coh.CohClass((0.0,) * 4), 4, 16, 0)
    assert rep["min_displacement"] > 0
    assert rep["all_margins_positive"]
    rep = coh.gamma_a_audit(lat, 0.5 * coh.basis(1), 5, 16, 0)
    g1 = next(m for m in rep["generator_margins"] if m["generator"] == 1)
    assert abs(g1["margin"] - (LB - 0.5)) <= 1e-12
    assert rep["violations_within_bound"]
    assert rep["fixed_points_found"] == 0
    again = coh.gamma_a_audit(lat, 0.5 * coh.basis(1), 5, 16, 0)
    assert again == rep


def test_gamma_a_audit_rejects_certified_out(lat):
    with pytest.raises(InvalidInputError):
        coh.gamma_a_audit(lat, 4.0 * coh.basis(1), 2, 4, 0)


def test_parse_class():
    assert coh.parse_class("1,2,3,4", 4).v == (1.0, 2.0, 3.0, 4.0)
    with pytest.raises(InvalidInputError):
        coh.parse_class("1,2", 4)
    with pytest.raises(InvalidInputError):
        coh.parse_class("a,b,c,d", 4)


def test_golden_s8_prefix(lat):
    est = coh.delta_sup(lat, coh.basis(1), 8)
    assert [s for _, s in est.history] == pytest.approx(S_E1_HISTORY[:8], abs=1e-14)


@pytest.mark.slow
def test_golden_s10(lat):
    est = coh.delta_sup(lat, coh.basis(1), 10)
    assert abs(est.sup_value - S10_E1) <= 1e-14
    assert lattice.word_str(est.witness.rep) == S10_WITNESS
    assert [s for _, s in est.history] == pytest.approx(S_E1_HISTORY, abs=1e-14)
    assert coh.in_delta(lat, 0.1 * coh.basis(1), 10, 0.2) is coh.Membership.PLAUSIBLE
