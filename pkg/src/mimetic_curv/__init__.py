"""High-order mimetic operators on staggered curvilinear grids."""

from .curvilinear import CurvilinearOperators, build_curvilinear, build_jacobian_ops
from .grid import (
    Mapping,
    Metrics,
    StaggeredGrid,
    compute_metrics,
    make_grid,
    make_mapping,
)
from .operators import DiagonalWeight, Space, SparseOperator
from .ops1d import (
    boundary_1d,
    divergence_1d,
    gradient_1d,
    interpolators_1d,
    weights_1d,
)
from .opsnd import FieldLayout, MimeticOperators, build_operators
from .poisson import (
    PoissonProblem,
    assemble,
    error_norms,
    observed_order,
    solve,
    solve_problem,
)
from .wave import AcousticSimulation, WaveConfig, WaveState, rk4_step, run_simulation

__version__ = "0.1.0"

__all__ = [
    "AcousticSimulation",
    "CurvilinearOperators",
    "DiagonalWeight",
    "FieldLayout",
    "Mapping",
    "Metrics",
    "MimeticOperators",
    "PoissonProblem",
    "Space",
    "SparseOperator",
    "StaggeredGrid",
    "WaveConfig",
    "WaveState",
    "assemble",
    "boundary_1d",
    "build_curvilinear",
    "build_jacobian_ops",
    "build_operators",
    "compute_metrics",
    "divergence_1d",
    "error_norms",
    "gradient_1d",
    "interpolators_1d",
    "make_grid",
    "make_mapping",
    "observed_order",
    "rk4_step",
    "run_simulation",
    "solve",
    "solve_problem",
    "weights_1d",
    "__version__",
]
