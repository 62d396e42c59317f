"""Exception types raised across the package."""


class DistaError(Exception):
    pass


class ParameterError(DistaError, ValueError):
    """A parameter lies outside its admissible range."""


class ShapeError(DistaError, ValueError):
    """Array dimensions are inconsistent."""


class EstimationError(DistaError, RuntimeError):
    """An iterative estimate failed to converge; ``estimate`` holds the last value."""

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class StepsizeError(DistaError, ValueError):
    """Raised when tau_v * ||A_v||_2**2 >= 1 for some node."""

    def __init__(self, violations):
        self.violations = list(violations)
        nodes = ", ".join(str(v.node) for v in self.violations)
        super().__init__(f"stepsize condition violated at node(s) {nodes}")


class DivergenceError(DistaError, RuntimeError):
    """The objective trace grew where the theory guarantees descent."""
