"""Exception hierarchy shared across the toolkit."""


class WaveHeatError(Exception):
    """Base class for all toolkit errors."""


class OverflowEvaluationError(WaveHeatError):
    """Unscaled value not representable in double precision."""


class DegenerateInputError(WaveHeatError):
    """Input outside the domain of the operation (zero frequency, branch cut)."""


class PoleError(WaveHeatError):
    """Evaluation point too close to a pole of a meromorphic factor."""


class DomainError(WaveHeatError):
    """Argument outside the hypothesis range of the estimate."""


class NoConvergenceError(WaveHeatError):
    """Iteration budget exhausted without meeting the tolerance."""


class ContourTooCloseError(WaveHeatError):
    """A zero of the integrand lies too close to the integration contour."""


class CutIntersectionError(WaveHeatError):
    """Contour crosses the branch cut on the negative real axis."""


class SingularSystemError(WaveHeatError):
    """Scaled determinant below the representability guard."""


class ResolutionError(WaveHeatError):
    """Grid too coarse for the requested frequency."""


class InfeasibleProfileError(WaveHeatError):
    """Requested data profile cannot satisfy the domain constraints."""


class SolveFailureError(WaveHeatError):
    """Linear-solve or factorization breakdown."""


class VariantError(WaveHeatError):
    """Operation not defined for the requested boundary variant."""


class WindowError(WaveHeatError):
    """Fit window too short, too sparse, or at the round-off floor."""


class InsufficientDataError(WaveHeatError):
    """Not enough records to form the requested report."""
