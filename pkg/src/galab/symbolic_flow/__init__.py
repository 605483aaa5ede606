"""Suspension flows over hyperbolic toral automorphisms.

The constructor ``toral`` lives in the ``toral`` submodule and is not
re-exported, so ``symbolic_flow.toral`` always names the module.
"""
from .bookkeeping import delta_bar_chain, lambda_star, orbit_rows, solvable_volume_audit
from .livschitz import (
    CocycleSpec,
    averaging_smoother,
    constant_rate,
    livschitz_solve,
    planted_rate,
)
from .pressure import (
    aitken,
    birkhoff_sums,
    doubling_separated_count,
    entropy_suspension,
    pressure_base,
    srb_identity_check,
)
from .toral import (
    CAT,
    ToralAuto,
    fix_count,
    fixed_points,
    fixed_points_closure,
    fixed_points_grid,
    orbits_csv,
    prime_orbits,
    smith_normal_form,
)
from .trig import RoofFunction, SuspensionFlow, TrigPoly, coboundary, roof
