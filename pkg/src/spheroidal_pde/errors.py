"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class SpheroidalError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SpheroidalError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class NoConvergence(SpheroidalError, ArithmeticError):
    """A series did not reach the requested tolerance within ``k_max`` terms.

    The best available estimate is attached as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class SingularStep(SpheroidalError, ArithmeticError):
    """A recursion step would divide by a (numerically) singular matrix."""


class DegenerateData(SpheroidalError, ValueError):
    """Input data carry no usable information (e.g. an identically zero error)."""


class MaxIterations(SpheroidalError, ArithmeticError):
    """An iterative solver ran out of iterations; ``best`` holds the last iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class Blowup(SpheroidalError, ArithmeticError):
    """An ODE trajectory left the region of bounded magnitude."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class NoCrossing(SpheroidalError):
    """Lambda(t) did not change sign on the searched interval."""

    def __init__(self, t_max):
        super().__init__(f"Lambda(t) has no sign change in [-{t_max}, {t_max}]")
        self.t_max = t_max


class NoRootInWindow(SpheroidalError):
    """A scan window contains no sign change of the target function."""


class BranchLoss(SpheroidalError):
    """Continuation of an eigenvalue branch to a neighbouring point failed."""


class TruncationUnstable(SpheroidalError):
    """Matrix eigenvalues changed too much when the truncation order changed."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
