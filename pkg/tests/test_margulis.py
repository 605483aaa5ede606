import numpy as np
import pytest

from galab import margulis as M
from galab.errors import InvalidInputError


@pytest.fixture(scope="module")
def setup():
    g = M.ExpandingMap(2, 0.3)
    return g, M.mme_cdf(g, 20)


def test_map_validation():
    with pytest.raises(InvalidInputError):
        M.ExpandingMap(1, 0.0)
    with pytest.raises(InvalidInputError):
        M.ExpandingMap(2, 0.95)


def test_preimages():
    g = M.ExpandingMap(3, 0.7)
    y = np.linspace(0, 1, 17, endpoint=False)
    x = g.preimages(y)
    assert x.shape == (3, 17)
    assert np.abs(g.lift(x) - (y[None, :] + np.arange(3)[:, None])).max() <= 1e-14


def test_identity_cdf_for_linear_map():
    F = M.mme_cdf(M.ExpandingMap(2, 0.0), 12)
    y = np.linspace(0, 1, 1001)
    assert np.abs(F(y) - y).max() <= 1e-15
    assert F(1.0) == 1.0 and F(0.0) == 0.0


def test_cdf_against_conjugacy_oracle(setup):
    g, F = setup
    x = np.linspace(0, 1, 2001)
    assert np.abs(F(x) - M.conjugacy_limit(g, x)).max() <= 1e-6


def test_scaling_law(setup):
    g, F = setup
    assert M.scaling_residual(g, F) <= 1e-4


def test_depth_agreement():
    assert M.depth_agreement(M.ExpandingMap(2, 0.3), 16) <= 1e-5


def test_round_trip(setup):
    _, F = setup
    u = np.linspace(0, 1, 777)
    assert np.abs(F(F.inverse(u)) - u).max() <= 1.0 / F.resolution


def test_linearize(setup):
    g, F = setup
    lin = M.linearize(g, F)
    assert lin.resolution == 2**20
    assert lin.max_deviation <= 1e-3
    F2 = M.mme_cdf(lin.hat, 20)
    y = np.linspace(0, 1, 4097)
    assert np.abs(F2(y) - y).max() <= 1e-6


def test_linearize_linear_map():
    g = M.ExpandingMap(2, 0.0)
    lin = M.linearize(g, M.mme_cdf(g, 14))
    assert lin.max_deviation <= 1e-9


def test_rn_check(setup):
    g, F = setup
    rep = M.holonomy_rn_check(g, F, c=1.0, samples=100, seed=0)
    assert rep["eta_zero_ratio"] == pytest.approx(1.0, abs=1e-12)
    assert rep["max_residual"] <= 1e-3 and rep["passed"]
    rep2 = M.holonomy_rn_check(g, F, c=0.5, samples=100, seed=3)
    assert rep2["passed"]


def test_rn_full_return(setup):
    g, F = setup
    # flowing for exactly one roof applies g once: mass grows by d, weight drops by e^{-lambda c}
    a, b = 0.2, 0.21
    assert (F(g.lift(b)) - F(g.lift(a))) / (F(b) - F(a)) == pytest.approx(2.0, rel=1e-4)


def test_regularity():
    F0 = M.mme_cdf(M.ExpandingMap(2, 0.0), 18)
    assert abs(M.regularity_diagnostic(F0)["exponent"] - 1.0) <= 0.02
    e20 = M.regularity_diagnostic(M.mme_cdf(M.ExpandingMap(2, 0.3), 20))["exponent"]
    e18 = M.regularity_diagnostic(M.mme_cdf(M.ExpandingMap(2, 0.3), 18))["exponent"]
    assert 0 < e20 <= 1 and abs(e20 - e18) <= 0.05


def test_csv_export(setup):
    _, F = setup
    rows = F.to_csv(4).splitlines()
    assert rows[0] == "y,F" and len(rows) == 18
    with pytest.raises(InvalidInputError):
        F.to_csv(21)


def test_non_monotone_rejected():
    with pytest.raises(InvalidInputError):
        M.LeafMeasureCDF(np.array([0.0, 0.6, 0.5, 1.0]), np.array([0.0, 0.3, 0.6, 1.0]), 1)
