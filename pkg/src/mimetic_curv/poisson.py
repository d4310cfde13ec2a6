"""Steady Dirichlet problems  -div(K grad u) = f  on mapped staggered grids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .curvilinear import CurvilinearOperators, build_curvilinear
from .errors import SolverError
from .grid import Mapping, StaggeredGrid
from .opsnd import FieldLayout


@dataclass
class PoissonProblem:
    """Problem data: geometry, diffusion tensor, and field evaluators.

    forcing/dirichlet/exact take physical points of shape (N, dim).
    """

    grid: StaggeredGrid
    mapping: Mapping
    order: int
    forcing: Callable[[np.ndarray], np.ndarray]
    dirichlet: Callable[[np.ndarray], np.ndarray]
    exact: Optional[Callable[[np.ndarray], np.ndarray]] = None
    tensor: Optional[np.ndarray] = None


@dataclass
class AssembledPoisson:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    curv: CurvilinearOperators
    boundary_mask: np.ndarray
    problem: PoissonProblem = field(repr=False, default=None)


def assemble(problem: PoissonProblem, curv: CurvilinearOperators | None = None) -> AssembledPoisson:
    """A = -L on interior scalar rows; boundary rows replaced by identity."""
    if curv is None:
        curv = build_curvilinear(problem.order, problem.grid, problem.mapping)
    layout = curv.layout
    lap = curv.laplacian(problem.tensor)
    bmask = layout.scalar_boundary_mask()
    keep = sp.diags((~bmask).astype(float))
    pin = sp.diags(bmask.astype(float))
    A = (keep @ (-lap.matrix) + pin).tocsr()
    phys = curv.mapping(problem.grid.points("scalar"))
    b = np.where(bmask, problem.dirichlet(phys), problem.forcing(phys))
    return AssembledPoisson(matrix=A, rhs=b, curv=curv, boundary_mask=bmask, problem=problem)


def solve(
    A: sp.csr_matrix,
    b: np.ndarray,
    method: str = "direct",
    rtol: float = 1e-11,
) -> np.ndarray:
    """Solve A u = b to the residual contract ||Au - b|| <= rtol ||b||.

    Direct sparse LU with iterative refinement by default; "bicgstab"
    (ILU-preconditioned) and "cgnr" (conjugate gradient on the normal
    equations) are the iterative fallbacks.
    """
    b = np.asarray(b, dtype=float)
    scale = np.linalg.norm(b)
    if scale == 0.0:
        return np.zeros_like(b)
    if method == "direct":
        lu = spla.splu(A.tocsc())
        u = lu.solve(b)
        for _ in range(5):
            r = b - A @ u
            if np.linalg.norm(r) <= rtol * scale:
                break
            u = u + lu.solve(r)
    elif method == "bicgstab":
        # row scaling first: boundary identity rows and O(1/h^2) interior
        # rows otherwise drive the incomplete factorization singular
        dinv = 1.0 / np.abs(A.diagonal())
        As = (sp.diags(dinv) @ A).tocsc()
        bs = dinv * b
        ilu = spla.spilu(As, drop_tol=1e-4, fill_factor=10)
        M = spla.LinearOperator(A.shape, ilu.solve)
        u, _ = spla.bicgstab(As.tocsr(), bs, rtol=1e-13, atol=0.0, M=M, maxiter=2000)
        for _ in range(3):
            r = b - A @ u
            if np.linalg.norm(r) <= rtol * scale:
                break
            du, _ = spla.bicgstab(As.tocsr(), dinv * r, rtol=1e-6, atol=0.0, M=M, maxiter=200)
            u = u + du
    elif method == "cgnr":
        AT = A.T.tocsr()
        normal = spla.LinearOperator(
            (A.shape[1], A.shape[1]), lambda x: AT @ (A @ x)
        )
        u, _ = spla.cg(normal, AT @ b, rtol=1e-14, atol=0.0, maxiter=20000)
    else:
        raise ValueError(f"unknown solver method {method!r}")
    res = np.linalg.norm(A @ u - b) / scale
    if not np.isfinite(res) or res > rtol:
        raise SolverError(f"{method} solve missed the residual contract", res)
    return u


def error_norms(
    computed: np.ndarray,
    exact_values: np.ndarray,
    layout: FieldLayout,
    cell_measure: float,
):
    """(l2, max) over interior scalar points.

    l2 uses the logical measure, sqrt(sum(e^2) * measure); max is the
    plain maximum over cell centers.
    """
    idx = layout.interior_scalar_indices()
    e = np.asarray(computed)[idx] - np.asarray(exact_values)[idx]
    l2 = math.sqrt(float(np.sum(e * e)) * cell_measure)
    return l2, float(np.abs(e).max())


def l2_norm_logical(errors: np.ndarray, cell_measure: float) -> float:
    """Logical-measure l2 of a flattened error field (any staggered set)."""
    e = np.asarray(errors)
    return math.sqrt(float(np.sum(e * e)) * cell_measure)


def observed_order(errors, cells):
    """Empirical convergence rates  log(e_prev/e_next) / log(m_next/m_prev)."""
    errors = [float(e) for e in errors]
    cells = [int(c) for c in cells]
    if len(errors) != len(cells) or len(errors) < 2:
        raise ValueError("need matching error/cell lists with >= 2 entries")
    if any(e <= 0 for e in errors):
        raise ValueError("errors must be positive to measure an order")
    if any(c2 <= c1 for c1, c2 in zip(cells, cells[1:])):
        raise ValueError("cell counts must be strictly increasing")
    return [
        math.log(e1 / e2) / math.log(c2 / c1)
        for (e1, e2), (c1, c2) in zip(zip(errors, errors[1:]), zip(cells, cells[1:]))
    ]


@dataclass
class PoissonResult:
    cells: int
    l2: float
    max: float
    solution: np.ndarray


def solve_problem(problem: PoissonProblem, method: str = "direct") -> PoissonResult:
    """Assemble, solve, and (when an exact solution is given) measure errors."""
    asm = assemble(problem)
    u = solve(asm.matrix, asm.rhs, method=method)
    l2 = mx = float("nan")
    if problem.exact is not None:
        phys = asm.curv.mapping(problem.grid.points("scalar"))
        l2, mx = error_norms(
            u, problem.exact(phys), asm.curv.layout, asm.curv.base.cell_measure
        )
    return PoissonResult(cells=problem.grid.cells[0], l2=l2, max=mx, solution=u)
