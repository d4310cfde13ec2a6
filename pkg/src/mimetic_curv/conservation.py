"""Discrete conservation diagnostics.

All inner products carry the logical cell measure (prod of spacings), so the
discrete integration-by-parts identity reads

    <D v, f>_Q + <v, G f>_P = <B v, f>

with a plain Euclidean contraction on the right.  In physical coordinates the
weights become Q_cc = J Q, P_cc = J P and the boundary term contracts the
contravariant flux T v through the unchanged logical B.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .curvilinear import CurvilinearOperators
from .operators import DiagonalWeight
from .opsnd import MimeticOperators, _kron_chain


def weighted_inner(w: DiagonalWeight, a, b, measure: float) -> float:
    return w.inner(a, b, measure)


def gauss_residual(ops: MimeticOperators, v: np.ndarray, f: np.ndarray) -> float:
    """Residual of the discrete divergence-theorem identity (logical).

    Zero to rounding by construction of B.
    """
    meas = ops.cell_measure
    lhs = ops.weight_scalar.inner(ops.div @ v, f, meas)
    lhs += ops.weight_faces.inner(v, ops.grad @ f, meas)
    return lhs - float(np.dot(f, ops.boundary @ v))


def gauss_residual_curvilinear(
    curv: CurvilinearOperators, v: np.ndarray, f: np.ndarray
) -> float:
    """Residual of the physical-coordinate divergence-theorem identity.

    The boundary term applies the logical B to the contravariant flux.
    Machine-zero for the identity mapping; O(dx^k) for smooth fields on
    curved mappings (cross-term interpolation commutators).
    """
    meas = curv.base.cell_measure
    lhs = curv.weight_scalar_curv.inner(curv.div_curv @ v, f, meas)
    lhs += curv.weight_faces_curv.inner(v, curv.grad_curv @ f, meas)
    flux = curv.flux_transform @ v
    return lhs - float(np.dot(f, curv.boundary @ flux))


# ---------------------------------------------------------------------------
# energy / mass functionals
# ---------------------------------------------------------------------------

def _face_square_average(curv: CurvilinearOperators, axis: int) -> sp.csr_matrix:
    """Average the two bounding axis-faces of each cell (value space)."""
    grid = curv.grid
    mats = []
    for a in range(grid.dim):
        m = grid.cells[a]
        if a == axis:
            avg = sp.diags([np.full(m, 0.5), np.full(m, 0.5)], [0, 1],
                           shape=(m, m + 1))
            mats.append(avg.tocsr())
        else:
            mats.append(sp.eye(m, format="csr"))
    return _kron_chain(mats)


def _interior_weights(curv: CurvilinearOperators) -> np.ndarray:
    """q * J on the interior cells (the curvilinear scalar weights)."""
    idx = curv.layout.interior_scalar_indices()
    return curv.weight_scalar_curv.values[idx]


def energy(curv: CurvilinearOperators, p: np.ndarray, V: np.ndarray) -> float:
    """Total weighted energy  sum_cells qJ (p^2 + |V|^2 / 2) * measure.

    The kinetic part accumulates each component's squared face values onto
    cells by averaging the two bounding faces, which keeps E >= 0 with
    E = 0 iff the state vanishes.
    """
    idx = curv.layout.interior_scalar_indices()
    w = _interior_weights(curv)
    kin = np.zeros(idx.size)
    for a in range(curv.grid.dim):
        block = curv.layout.face_block(V, a)
        kin += _face_square_average(curv, a) @ (block * block)
    total = np.dot(w, p[idx] ** 2 + 0.5 * kin)
    return float(curv.base.cell_measure * total)


def mass(curv: CurvilinearOperators, p: np.ndarray) -> float:
    """Weighted mass  sum_cells qJ p * measure (physical volume integral)."""
    idx = curv.layout.interior_scalar_indices()
    return float(curv.base.cell_measure * np.dot(_interior_weights(curv), p[idx]))


def mass_logical(curv: CurvilinearOperators, p: np.ndarray) -> float:
    """Logical-measure mass sum (no Jacobian factor)."""
    idx = curv.layout.interior_scalar_indices()
    q = curv.base.weight_scalar.values[idx]
    return float(curv.base.cell_measure * np.dot(q, p[idx]))


def _masked_flux(curv: CurvilinearOperators, w: np.ndarray, closed_wall: bool):
    flux = curv.flux_transform @ w
    if closed_wall:
        flux = flux * (~curv.layout.stacked_normal_boundary_mask())
    return flux


def energy_rate(
    curv: CurvilinearOperators,
    p: np.ndarray,
    V: np.ndarray,
    closed_wall: bool = True,
) -> float:
    """Flux-form energy rate  -measure * sum_i M_i (Dtilde (p V))_i.

    p is interpolated to each face set at the operator order; the exactness
    condition makes this the boundary power flux, hence exactly zero (to
    rounding) under closed walls for any state.
    """
    pv = np.concatenate(
        [
            (curv.base.face_interp_from_scalar(a) @ p) * curv.layout.face_block(V, a)
            for a in range(curv.grid.dim)
        ]
    )
    flux = _masked_flux(curv, pv, closed_wall)
    div = curv.base.div @ flux  # logical divergence of the flux
    q = curv.base.weight_scalar.values
    return float(-curv.base.cell_measure * np.dot(q, div))


def mass_rate(
    curv: CurvilinearOperators,
    V: np.ndarray,
    bulk_modulus: float = 0.5,
    closed_wall: bool = True,
) -> float:
    """Rate of the weighted mass under pdot = -bulk * (1/J) D (T V)."""
    flux = _masked_flux(curv, V, closed_wall)
    div = curv.base.div @ flux
    q = curv.base.weight_scalar.values
    return float(-bulk_modulus * curv.base.cell_measure * np.dot(q, div))


@dataclass(frozen=True)
class ConservationReport:
    """One diagnostics sample of a running simulation."""

    t: float
    energy: float
    energy_rate: float
    mass: float
    gauss_residual: float

    CSV_HEADER = "t,energy,energy_rate,mass,gauss_residual"

    def csv_row(self) -> str:
        return (
            f"{self.t:.6E},{self.energy:.10E},{self.energy_rate:.6E},"
            f"{self.mass:.10E},{self.gauss_residual:.6E}"
        )


def report(
    curv: CurvilinearOperators,
    p: np.ndarray,
    V: np.ndarray,
    t: float,
    closed_wall: bool,
    bulk_modulus: float = 0.5,
) -> ConservationReport:
    return ConservationReport(
        t=t,
        energy=energy(curv, p, V),
        energy_rate=energy_rate(curv, p, V, closed_wall),
        mass=mass(curv, p),
        gauss_residual=gauss_residual_curvilinear(curv, V, p),
    )
