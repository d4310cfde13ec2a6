"""Exception types raised by the library."""


class GridError(ValueError):
    """Invalid grid construction parameters (cell counts, bounds)."""


class MappingError(ValueError):
    """Invalid mapping parameters (radii ordering, perturbation amplitude)."""


class SingularMappingError(RuntimeError):
    """Jacobian determinant nonpositive at a sampled point."""

    def __init__(self, location: str, point, value: float):
        self.location = location
        self.point = tuple(float(c) for c in point)
        self.value = float(value)
        super().__init__(
            f"singular mapping: J = {value:.6e} <= 0 at logical point "
            f"{self.point} ({location})"
        )


class WeightSolveError(RuntimeError):
    """Quadrature-weight solve failed its residual or positivity check."""


class SolverError(RuntimeError):
    """Linear solve did not meet the residual contract."""

    def __init__(self, message: str, residual: float):
        self.residual = float(residual)
        super().__init__(f"{message} (achieved relative residual {residual:.3e})")


class StabilityError(RuntimeError):
    """Time integration produced nonfinite values."""

    def __init__(self, step: int, t: float):
        self.step = step
        self.t = t
        super().__init__(f"nonfinite state after step {step} (t = {t:.6g})")
