class GalabError(Exception):
    """Base class for all errors raised by galab."""


class InvalidInputError(GalabError, ValueError):
    pass


class DegenerateCommutatorError(GalabError):
    pass


class ConstructionFailedError(GalabError):
    pass


class ResourceLimitError(GalabError):
    """A configured budget (node count, orbit count, time) was exhausted."""


class HypothesisViolatedError(GalabError):
    """Input fails a theorem hypothesis that the operation relies on."""


class NonConvergenceError(GalabError):
    pass
