import math

import numpy as np
import pytest

from galab.errors import InvalidInputError
from galab.symbolic_flow import bookkeeping as B
from galab.symbolic_flow import trig
from galab.symbolic_flow.toral import CAT

LOG_LAM = math.log((3 + math.sqrt(5)) / 2)


@pytest.fixture(scope="module")
def unit_flow():
    return trig.SuspensionFlow(CAT, trig.roof(1.0))


def test_delta_bar_unit_roof(unit_flow):
    rep = B.delta_bar_chain(unit_flow, 0.0)
    assert abs(rep["entropy"] - LOG_LAM) <= 1e-6
    assert abs(rep["delta"] - (1 - 1 / rep["entropy"])) <= 1e-15
    assert rep["delta_lt_1"]
    assert rep["period_relation_exact"] and rep["period_relation_residual"] == 0.0
    assert rep["rescaling_ok"]
    assert {r["c"] for r in rep["rescaling"]} >= {0.5, 2.0}
    for r in rep["rescaling"]:
        assert r["error"] <= 1e-6


def test_delta_bar_shifted_roof(unit_flow):
    rep = B.delta_bar_chain(unit_flow, 0.2)
    assert abs(rep["entropy"] - LOG_LAM / 1.2) <= 1e-6
    assert rep["period_relation_residual"] == 0.0
    row = rep["orbits"][0]
    assert math.isclose(row["tau_rho"] * (1 - rep["delta"]), row["tau"] + 0.2 * row["n"], rel_tol=1e-15)


def test_delta_bar_rejects_nonpositive_roof(unit_flow):
    with pytest.raises(InvalidInputError):
        B.delta_bar_chain(unit_flow, -1.0)


def test_lambda_star_closed_form():
    assert abs(B.lambda_star(0.3, 0.2, -1.0) - 0.5 / 0.7) <= 1e-15
    with pytest.raises(InvalidInputError):
        B.lambda_star(1.0, 0.2, -1.0)


def test_solvable_audit():
    flow = trig.SuspensionFlow(CAT, trig.roof(1.0, (((1, 0), 0.2, 0.0),)))
    rep = B.solvable_volume_audit(flow, 0.5)
    assert rep["closed_form_ok"]
    for c in rep["planted"]:
        assert c["error"] <= 1e-12 and c["residual"] <= 1e-12
    assert rep["strictly_increasing"]
    assert all(abs(v - 1.0) <= 1e-12 for v in rep["volume_at_zero"].values())
    assert rep["root_is_zero"]
    lam = np.array(rep["lambda_grid"])
    i = int(np.argmin(np.abs(lam - 0.1)))
    assert rep["volume"]["2.0"][i] > 1.0


def test_solvable_audit_validation():
    flow = trig.SuspensionFlow(CAT, trig.roof(1.0))
    with pytest.raises(InvalidInputError):
        B.solvable_volume_audit(flow, -0.5)
    with pytest.raises(InvalidInputError):
        B.solvable_volume_audit(flow, 0.5, (0.1, 1.0))


def test_orbit_rows(unit_flow):
    rows = B.orbit_rows(unit_flow, 4)
    assert all(r["tau"] == r["n"] for r in rows)
    assert all(r["Ju"] == -r["Js"] for r in rows)
