"""Kronecker assembly of 2D/3D mimetic operators from their 1D factors.

Fields are flattened x-fastest (then y, then z).  The scalar space is the
tensor product of the per-axis scalar point sets, size prod(m_a + 2).  Face
set a has m_a + 1 face points along axis a and center points along the
transverse axes; the stacked face vector concatenates the face sets in axis
order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from . import ops1d
from .grid import StaggeredGrid
from .operators import DiagonalWeight, Space, SparseOperator

# B entries farther than this many points from every boundary are zero after
# pruning; order-4 weights carry a geometric tail (ratio ~ 1/26) that falls
# below the 1e-12 prune threshold about 9 points in.
SUPPORT_MARGIN = {2: 3, 4: 12}


def _kron_chain(per_axis) -> sp.csr_matrix:
    """kron(A_last, ..., A_first): acts as A_first on the fastest index."""
    return reduce(lambda acc, a: sp.kron(a, acc, format="csr"), per_axis)


def _center_selector(m: int) -> sp.csr_matrix:
    """m x (m+2) selector of the center rows of a scalar axis."""
    return sp.eye(m + 2, format="csr")[1:-1]


@dataclass(frozen=True)
class FieldLayout:
    """Index bookkeeping for x-fastest flattened staggered fields."""

    dim: int
    cells: tuple

    @property
    def scalar_shape(self) -> tuple:
        return tuple(m + 2 for m in self.cells)

    @property
    def scalar_size(self) -> int:
        return math.prod(self.scalar_shape)

    def face_shape(self, axis: int) -> tuple:
        return tuple(
            m + 1 if a == axis else m for a, m in enumerate(self.cells)
        )

    def face_size(self, axis: int) -> int:
        return math.prod(self.face_shape(axis))

    @property
    def faces_total(self) -> int:
        return sum(self.face_size(a) for a in range(self.dim))

    def face_offset(self, axis: int) -> int:
        return sum(self.face_size(a) for a in range(axis))

    def face_block(self, stacked: np.ndarray, axis: int) -> np.ndarray:
        o = self.face_offset(axis)
        return stacked[o:o + self.face_size(axis)]

    def scalar_flat_index(self, multi) -> int:
        idx, stride = 0, 1
        for a in range(self.dim):
            idx += multi[a] * stride
            stride *= self.scalar_shape[a]
        return idx

    def scalar_multi_index(self, flat: int) -> tuple:
        out = []
        for a in range(self.dim):
            n = self.scalar_shape[a]
            out.append(flat % n)
            flat //= n
        return tuple(out)

    def scalar_boundary_mask(self) -> np.ndarray:
        """True at scalar points lying on any logical boundary."""
        mask = np.zeros(self.scalar_shape, dtype=bool, order="F")
        for a in range(self.dim):
            sl = [slice(None)] * self.dim
            sl[a] = 0
            mask[tuple(sl)] = True
            sl[a] = -1
            mask[tuple(sl)] = True
        return mask.reshape(-1, order="F")

    def interior_scalar_indices(self) -> np.ndarray:
        """Flat scalar indices of the cell centers, x-fastest cell order."""
        axes = [np.arange(1, m + 1) for m in self.cells]
        grids = np.meshgrid(*axes, indexing="ij")
        flat = np.zeros_like(grids[0])
        stride = 1
        for a in range(self.dim):
            flat = flat + grids[a] * stride
            stride *= self.scalar_shape[a]
        return flat.reshape(-1, order="F")

    def embed_centers(self, values: np.ndarray, fill: float = 0.0) -> np.ndarray:
        """Scatter a center-cell field into the scalar space."""
        out = np.full(self.scalar_size, fill, dtype=float)
        out[self.interior_scalar_indices()] = values
        return out

    def face_normal_boundary_mask(self, axis: int) -> np.ndarray:
        """True at faces of set `axis` lying on the two axis boundaries."""
        m = self.cells[axis]
        mask = np.zeros(self.face_shape(axis), dtype=bool, order="F")
        sl = [slice(None)] * self.dim
        sl[axis] = 0
        mask[tuple(sl)] = True
        sl[axis] = -1
        mask[tuple(sl)] = True
        return mask.reshape(-1, order="F")

    def stacked_normal_boundary_mask(self) -> np.ndarray:
        return np.concatenate(
            [self.face_normal_boundary_mask(a) for a in range(self.dim)]
        )


def scalar_space(layout: FieldLayout) -> Space:
    return Space("scalar", layout.scalar_size)


def faces_space(layout: FieldLayout) -> Space:
    return Space("faces", layout.faces_total)


@dataclass
class MimeticOperators:
    """Logical-coordinate mimetic operator set on one grid."""

    order: int
    grid: StaggeredGrid
    layout: FieldLayout
    div: SparseOperator        # stacked faces -> scalar
    grad: SparseOperator       # scalar -> stacked faces
    lap: SparseOperator        # scalar -> scalar, div @ grad
    weight_scalar: DiagonalWeight
    weight_faces: DiagonalWeight
    boundary: SparseOperator   # measure * (Q div + grad^T P), corner blocks
    axis_face_weights: list    # per-axis 1D face weight vectors p_a
    axis_scalar_weights: list  # per-axis 1D scalar weight vectors q_a

    @property
    def cell_measure(self) -> float:
        return self.grid.cell_measure

    def face_interp_from_scalar(self, axis: int) -> sp.csr_matrix:
        """Order-k interpolation of the scalar field onto face set `axis`."""
        mats = []
        for a in range(self.grid.dim):
            m = self.grid.cells[a]
            if a == axis:
                mats.append(
                    ops1d.interpolation_matrix(
                        self.grid.scalar_axis(a), self.grid.face_axis(a), self.order
                    )
                )
            else:
                mats.append(_center_selector(m))
        return _kron_chain(mats)

    def face_to_face_interp(self, from_axis: int, to_axis: int) -> sp.csr_matrix:
        """Order-k interpolation from face set `from_axis` to `to_axis`."""
        if from_axis == to_axis:
            return sp.eye(self.layout.face_size(to_axis), format="csr")
        mats = []
        for a in range(self.grid.dim):
            m = self.grid.cells[a]
            if a == from_axis:
                mats.append(
                    ops1d.interpolation_matrix(
                        self.grid.face_axis(a), self.grid.center_axis(a), self.order
                    )
                )
            elif a == to_axis:
                mats.append(
                    ops1d.interpolation_matrix(
                        self.grid.center_axis(a), self.grid.face_axis(a), self.order
                    )
                )
            else:
                mats.append(sp.eye(m, format="csr"))
        return _kron_chain(mats)


def _axis_weight_vectors(k: int, grid: StaggeredGrid):
    ps, qs = [], []
    for a in range(grid.dim):
        P, Q = ops1d.weights_1d(k, grid.cells[a])
        ps.append(P.values)
        qs.append(Q.values)
    return ps, qs


def build_operators(k: int, grid: StaggeredGrid) -> MimeticOperators:
    """Assemble divergence, gradient, Laplacian, weights, and boundary op."""
    dim = grid.dim
    layout = FieldLayout(dim, grid.cells)
    Ds = [ops1d.divergence_1d(k, grid.cells[a], grid.spacing[a]).matrix for a in range(dim)]
    Gs = [ops1d.gradient_1d(k, grid.cells[a], grid.spacing[a]).matrix for a in range(dim)]
    sel = [_center_selector(m) for m in grid.cells]

    div_blocks, grad_blocks = [], []
    for a in range(dim):
        div_blocks.append(
            _kron_chain([Ds[ax] if ax == a else sel[ax].T for ax in range(dim)])
        )
        grad_blocks.append(
            _kron_chain([Gs[ax] if ax == a else sel[ax] for ax in range(dim)])
        )
    s_space, f_space = scalar_space(layout), faces_space(layout)
    div = SparseOperator(sp.hstack(div_blocks, format="csr"), f_space, s_space)
    grad = SparseOperator(sp.vstack(grad_blocks, format="csr"), s_space, f_space)
    lap = SparseOperator((div.matrix @ grad.matrix).tocsr(), s_space, s_space)

    ps, qs = _axis_weight_vectors(k, grid)
    q_nd = reduce(lambda acc, v: np.kron(v, acc), qs)
    p_blocks = []
    for a in range(dim):
        vecs = [ps[ax] if ax == a else qs[ax][1:-1] for ax in range(dim)]
        p_blocks.append(reduce(lambda acc, v: np.kron(v, acc), vecs))
    p_nd = np.concatenate(p_blocks)
    weight_scalar = DiagonalWeight(q_nd, s_space)
    weight_faces = DiagonalWeight(p_nd, f_space)

    measure = grid.cell_measure
    B = measure * (
        sp.diags(q_nd) @ div.matrix + grad.matrix.T @ sp.diags(p_nd)
    )
    B = B.tocsr()
    tol = 1e-12 * max(1.0, np.abs(B.data).max() if B.nnz else 1.0)
    B.data[np.abs(B.data) < tol] = 0.0
    B.eliminate_zeros()
    boundary = SparseOperator(B, f_space, s_space)

    return MimeticOperators(
        order=k,
        grid=grid,
        layout=layout,
        div=div,
        grad=grad,
        lap=lap,
        weight_scalar=weight_scalar,
        weight_faces=weight_faces,
        boundary=boundary,
        axis_face_weights=ps,
        axis_scalar_weights=qs,
    )


def boundary_support_ok(ops: MimeticOperators) -> bool:
    """Check B has no entries on rows far from every logical boundary."""
    margin = SUPPORT_MARGIN[ops.order]
    B = ops.boundary.matrix.tocoo()
    if B.nnz == 0:
        return True
    layout = ops.layout
    multi = np.array([layout.scalar_multi_index(r) for r in B.row])
    dist = np.minimum(multi, np.array(layout.scalar_shape) - 1 - multi).min(axis=1)
    return bool(np.all(dist <= margin))
