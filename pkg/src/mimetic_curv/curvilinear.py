"""Mimetic operators composed with coordinate-mapping metric terms.

With A[p][q] = dx_p/dxi_q the sampled Jacobian matrix, J = det A, and
C = J A^{-T} its cofactor matrix, the physical operators on the logical grid
are

    divergence:  (1/J) * D_logical applied to the contravariant fluxes
                 w_q = sum_p C[p][q] v_p      (components interpolated to
                 face set q where needed),
    gradient:    (grad f)_p = (1/J) sum_q C[p][q] (G_q f),   cross terms
                 interpolated from face set q to face set p,
    tensor flux: w_q = sum_s [(C^T K C)/J]_{q s} (G_s u)   for the
                 anisotropic Laplacian  (1/J) D (J A^{-1} K A^{-T}) G.

The transformed quadrature weights are Q_cc = J * Q on scalars and
P_cc = J * P per face set; the boundary operator is the unchanged logical B
contracted against the contravariant boundary flux.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .grid import CENTERS, Mapping, Metrics, StaggeredGrid, compute_metrics, face_location
from .operators import DiagonalWeight, SparseOperator
from .opsnd import MimeticOperators, build_operators


@dataclass(frozen=True)
class JacobianOps:
    """Diagonal/metric data the curvilinear compositions are built from."""

    inv_jac_scalar: np.ndarray   # 1/J at centers, 1 on boundary scalar rows
    jac_center: np.ndarray       # J at the interior cells
    jac_face: tuple              # per-axis J at face set a
    cofactor_face: tuple         # per-axis C[p][q] arrays at face set a


def build_jacobian_ops(metrics: Metrics, ops: MimeticOperators) -> JacobianOps:
    layout = ops.layout
    jc = metrics.at(CENTERS).jac
    inv_jac = layout.embed_centers(1.0 / jc, fill=1.0)
    jac_face = []
    cof_face = []
    for a in range(layout.dim):
        s = metrics.at(face_location(a))
        jac_face.append(s.jac)
        cof_face.append(s.cofactor)
    return JacobianOps(
        inv_jac_scalar=inv_jac,
        jac_center=jc,
        jac_face=tuple(jac_face),
        cofactor_face=tuple(cof_face),
    )


@dataclass
class CurvilinearOperators:
    """Physical-coordinate operator set on a mapped staggered grid."""

    base: MimeticOperators
    mapping: Mapping
    metrics: Metrics
    jac: JacobianOps
    flux_transform: sp.csr_matrix  # physical components -> contravariant fluxes
    div_curv: SparseOperator
    grad_curv: SparseOperator
    weight_scalar_curv: DiagonalWeight  # Q_cc
    weight_faces_curv: DiagonalWeight   # P_cc

    @property
    def grid(self) -> StaggeredGrid:
        return self.base.grid

    @property
    def layout(self):
        return self.base.layout

    @property
    def order(self) -> int:
        return self.base.order

    @property
    def boundary(self) -> SparseOperator:
        """The boundary operator is the unchanged logical one."""
        return self.base.boundary

    def closed_wall_div(self) -> SparseOperator:
        """Divergence with the contravariant flux zeroed at boundary faces."""
        mask = (~self.layout.stacked_normal_boundary_mask()).astype(float)
        mat = (
            sp.diags(self.jac.inv_jac_scalar)
            @ self.base.div.matrix
            @ sp.diags(mask)
            @ self.flux_transform
        )
        return SparseOperator(mat.tocsr(), self.base.div.domain, self.base.div.codomain)

    def laplacian(self, tensor=None) -> SparseOperator:
        """Flux-form operator (1/J) D (J A^-1 K A^-T) G for constant SPD K."""
        dim = self.grid.dim
        if tensor is None:
            tensor = np.eye(dim)
        K = np.asarray(tensor, dtype=float)
        if K.shape != (dim, dim):
            raise ValueError(f"tensor must be {dim}x{dim}, got {K.shape}")
        if not np.allclose(K, K.T):
            raise ValueError("tensor must be symmetric")
        if np.any(np.linalg.eigvalsh(K) <= 0):
            raise ValueError("tensor must be positive definite")
        blocks = [[None] * dim for _ in range(dim)]
        for q in range(dim):
            cof = self.jac.cofactor_face[q]
            jac = self.jac.jac_face[q]
            # w[q][s] = (C^T K C)_{q s} / J at face set q
            w = np.einsum("npq,pr,nrs->nqs", cof, K, cof) / jac[:, None, None]
            for s in range(dim):
                coeff = w[:, q, s]
                if q == s:
                    blocks[q][s] = sp.diags(coeff)
                elif np.max(np.abs(coeff)) != 0.0:
                    blocks[q][s] = sp.diags(coeff) @ self.base.face_to_face_interp(s, q)
        W = sp.bmat(blocks, format="csr")
        mat = sp.diags(self.jac.inv_jac_scalar) @ self.base.div.matrix @ W @ self.base.grad.matrix
        return SparseOperator(mat.tocsr(), self.base.lap.domain, self.base.lap.codomain)


def _flux_transform(base: MimeticOperators, jac: JacobianOps) -> sp.csr_matrix:
    dim = base.grid.dim
    blocks = [[None] * dim for _ in range(dim)]
    for q in range(dim):
        cof = jac.cofactor_face[q]
        for p in range(dim):
            coeff = cof[:, p, q]
            if p == q:
                blocks[q][p] = sp.diags(coeff)
            else:
                if np.max(np.abs(coeff)) == 0.0:
                    continue
                blocks[q][p] = sp.diags(coeff) @ base.face_to_face_interp(p, q)
    return sp.bmat(blocks, format="csr")


def _curvilinear_gradient(base: MimeticOperators, jac: JacobianOps) -> sp.csr_matrix:
    dim = base.grid.dim
    nL = base.layout
    grad_axis = [nL.face_size(a) for a in range(dim)]
    row_blocks = []
    for p in range(dim):
        cof = jac.cofactor_face[p]
        jf = jac.jac_face[p]
        acc = None
        for q in range(dim):
            coeff = cof[:, p, q] / jf
            gq = base.grad.matrix[
                base.layout.face_offset(q):base.layout.face_offset(q) + grad_axis[q]
            ]
            if p == q:
                term = sp.diags(coeff) @ gq
            else:
                if np.max(np.abs(coeff)) == 0.0:
                    continue
                term = sp.diags(coeff) @ base.face_to_face_interp(q, p) @ gq
            acc = term if acc is None else acc + term
        row_blocks.append(acc)
    return sp.vstack(row_blocks, format="csr")


def build_curvilinear(
    k: int,
    grid: StaggeredGrid,
    mapping: Mapping,
    metrics: Metrics | None = None,
    analytic: bool | None = None,
) -> CurvilinearOperators:
    """Assemble the physical-coordinate operator set for a mapped grid."""
    base = build_operators(k, grid)
    if metrics is None:
        metrics = compute_metrics(mapping, grid, order=k, analytic=analytic)
    jac = build_jacobian_ops(metrics, base)
    T = _flux_transform(base, jac)
    div_mat = (sp.diags(jac.inv_jac_scalar) @ base.div.matrix @ T).tocsr()
    grad_mat = _curvilinear_gradient(base, jac)
    div_curv = SparseOperator(div_mat, base.div.domain, base.div.codomain)
    grad_curv = SparseOperator(grad_mat, base.grad.domain, base.grad.codomain)
    jac_scalar = base.layout.embed_centers(jac.jac_center, fill=1.0)
    q_cc = DiagonalWeight(
        base.weight_scalar.values * jac_scalar, base.weight_scalar.space
    )
    p_cc = DiagonalWeight(
        base.weight_faces.values * np.concatenate(jac.jac_face),
        base.weight_faces.space,
    )
    return CurvilinearOperators(
        base=base,
        mapping=mapping,
        metrics=metrics,
        jac=jac,
        flux_transform=T,
        div_curv=div_curv,
        grad_curv=grad_curv,
        weight_scalar_curv=q_cc,
        weight_faces_curv=p_cc,
    )
