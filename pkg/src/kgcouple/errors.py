"""Exception types shared across the package."""


class KgError(Exception):
    """Base class for all errors raised by kgcouple."""


class InvalidBracket(KgError):
    """Root bracket endpoints do not enclose a sign change."""


class NoConvergence(KgError):
    """Iterative refinement exhausted its iteration cap."""


class QuadratureFailure(KgError):
    """Adaptive quadrature did not reach the requested accuracy."""

    def __init__(self, message, partial=None, error=None):
        super().__init__(message)
        self.partial = partial
        self.error = error


class IntegrationDiverged(KgError):
    """Trajectory overflowed before reaching the end of the mesh."""

    def __init__(self, message, last_position=None, trajectory=None):
        super().__init__(message)
        self.last_position = last_position
        self.trajectory = trajectory


class SingularEvaluation(KgError):
    """A potential singular at the origin was evaluated at x = 0."""


class NonDifferentiablePoint(KgError):
    """Derivative requested at a discontinuity or table knot."""


class NotCoulombLike(KgError):
    """Shape does not admit the -w(r)/r factorization."""


class ClassViolation(KgError):
    """Shape is not admitted in the potential class required by an operation."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SupercriticalCoupling(KgError):
    """Coupling too strong for a regular power-law start at the origin."""


class NoBoundState(KgError):
    """No coupling below the scan cap binds a state at this energy."""


class StateIdentificationFailure(KgError):
    """A refined coupling root has the wrong node count."""


class GroundStateRequired(KgError):
    """Operation is only defined for nodeless ground-state solutions."""


class ConditionInapplicable(KgError):
    """Comparison condition cannot be evaluated for this pair."""


class BoundBuilderError(KgError):
    """Equal-area bound construction requires a bounded shape."""


class InvalidQuery(KgError):
    """Spectral query violates |E| < m or combines incompatible fields."""
