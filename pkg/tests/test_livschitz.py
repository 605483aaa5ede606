import numpy as np
import pytest

from galab.errors import HypothesisViolatedError, InvalidInputError, NonConvergenceError
from galab.symbolic_flow import livschitz as L
from galab.symbolic_flow import trig
from galab.symbolic_flow.toral import CAT

BETA0 = trig.TrigPoly(0.0, (((1, 0), 1.0, 0.0),))  # cos(2 pi x1)


def test_planted_coboundary_recovered():
    f = trig.coboundary(BETA0, CAT)
    r = L.livschitz_solve(CAT, f, 10, planted=BETA0)
    assert r.max_orbit_sum <= 1e-9
    assert r.recovery_spread <= 1e-9
    assert 0 < r.holder_exponent
    assert r.n_orbits > 2000


def test_constant_perturbation_rejected():
    f = trig.coboundary(BETA0, CAT) + 0.01
    with pytest.raises(HypothesisViolatedError):
        L.livschitz_solve(CAT, f, 10)


def test_anchor_choices_differ_by_orbit_constant():
    f = trig.coboundary(BETA0, CAT)
    lo = L.livschitz_solve(CAT, f, 8, anchor="min")
    hi = L.livschitz_solve(CAT, f, 8, anchor="max")
    a, b = lo.point_values(), hi.point_values()
    assert a.keys() == b.keys()
    for n, beta in lo.beta.items():
        pts, _ = lo.orbits[n]
        diffs = np.array([[a[(n, x, y)] - b[(n, x, y)] for x, y in orbit.tolist()] for orbit in pts])
        assert np.abs(diffs - diffs[:, :1]).max() <= 1e-12


def test_solver_validation():
    with pytest.raises(InvalidInputError):
        L.livschitz_solve(CAT, trig.constant(0.0), 0)
    with pytest.raises(InvalidInputError):
        L.livschitz_solve(CAT, trig.constant(0.0), 3, anchor="middle")


@pytest.fixture(scope="module")
def flow():
    return trig.SuspensionFlow(CAT, trig.roof(1.0, (((1, 0), 0.2, 0.0),)))


def test_walk_cocycle_property(flow):
    coc = L.planted_rate(flow, 0.7, trig.TrigPoly(0.0, (((0, 1), 0.1, 0.0),)))
    rng = np.random.default_rng(0)
    x = rng.random((50, 2))
    u = rng.random(50) * flow.roof(x)
    s, t = 0.6, 1.3
    w = L.walk(coc, x, u, s + t)
    a_st = w.alpha_at(np.full((50, 1), s + t))[:, 0]
    a_s = w.alpha_at(np.full((50, 1), s))[:, 0]
    xs, us = w.point_at(np.full(50, s))
    a_t = L.walk(coc, xs, us, t).alpha_at(np.full((50, 1), t))[:, 0]
    assert np.abs(a_st - a_s - a_t).max() <= 1e-12


def test_orbit_rates_of_planted_cocycle(flow):
    coc = L.planted_rate(flow, 0.7, trig.TrigPoly(0.0, (((0, 1), 0.1, 0.0),)))
    rates = L.orbit_rates(coc, 6)
    assert np.abs(rates - 0.7).max() <= 1e-12


def test_smoother_planted(flow):
    coc = L.planted_rate(flow, 0.7, trig.TrigPoly(0.0, (((0, 1), 0.1, 0.0),)))
    r = L.averaging_smoother(coc, 0.63, n_samples=1000, seed=0)
    d = r.as_dict()
    assert d["inequality_holds"]
    assert d["identity_residual"] <= 1e-4
    assert d["quadrature_check"] <= 1e-4
    assert r.T in (1.0, 2.0, 4.0, 8.0, 16.0)


def test_smoother_constant_rate_is_equality(flow):
    coc = L.constant_rate(flow, 0.7)
    r = L.averaging_smoother(coc, 0.7, n_samples=200, seed=1)
    assert np.ptp(r.beta_grid) <= 1e-9
    assert abs(r.inequality_min) <= 1e-9
    assert r.identity_residual <= 1e-9


def test_smoother_rejects_rate_below_target(flow):
    coc = L.constant_rate(flow, 0.5)
    with pytest.raises(HypothesisViolatedError):
        L.averaging_smoother(coc, 0.6, n_samples=10)


def test_choose_t_gives_up(flow):
    coc = L.planted_rate(flow, 0.7, trig.TrigPoly(0.0, (((0, 1), 3.0, 0.0),)))
    with pytest.raises(NonConvergenceError):
        L.choose_T(coc, 0.7 - 1e-13, grid=16, t_max=4.0)


def test_smoother_is_seeded(flow):
    coc = L.planted_rate(flow, 0.7, trig.TrigPoly(0.0, (((0, 1), 0.1, 0.0),)))
    a = L.averaging_smoother(coc, 0.63, n_samples=100, seed=5).as_dict()
    b = L.averaging_smoother(coc, 0.63, n_samples=100, seed=5).as_dict()
    assert a == b
