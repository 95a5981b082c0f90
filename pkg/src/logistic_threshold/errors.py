"""Exception hierarchy shared across the solvers."""


class SolverError(Exception):
    """Base class for numerical failures (maps to CLI exit code 1)."""


class NoPositiveEigenvalue(SolverError):
    """The weight has no positive direction on the grid (V <= 0 at every node)."""


class NonConverged(SolverError):
    """Iteration limit reached before the stopping test was met.

    The best iterate is kept on ``best`` so callers can inspect it.
    """

    def __init__(self, message, best=None, iterations=None):
        super().__init__(message)
        self.best = best
        self.iterations = iterations


class HypothesisViolation(SolverError):
    """A structural hypothesis on V or f does not hold (e.g. no supersolution bound)."""


class MonotonicityViolation(SolverError):
    """A monotone iteration produced iterates out of order."""


class SolverFault(SolverError):
    """Results that contradict each other, usually from loose tolerances."""
