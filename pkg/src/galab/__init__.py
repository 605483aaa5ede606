"""Numerical laboratory for locally free affine-group actions on lattice quotients.

Subpackages cover the universal cover of PSL(2, R), surface lattices and
their length spectra, the truncated Delta seminorm on cohomology, suspension
flows over toral automorphisms and measures of maximal entropy for expanding
circle maps.
"""
__version__ = "0.1.0"

from .errors import (
    ConstructionFailedError,
    DegenerateCommutatorError,
    GalabError,
    HypothesisViolatedError,
    InvalidInputError,
    NonConvergenceError,
    ResourceLimitError,
)
