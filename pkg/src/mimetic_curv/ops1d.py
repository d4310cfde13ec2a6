"""One-dimensional high-order mimetic operators on a staggered axis.

Divergence D maps the m+1 face values to the m+2 scalar points (boundary rows
are identically zero); gradient G maps the m+2 scalar points to the m+1
faces.  Both use parameter-free minimal-bandwidth stencils: a staggered
4-point (or 2-point) interior row plus dedicated boundary rows, with the
bottom boundary block the negated reversal of the top one (persymmetry).

The diagonal quadrature weights P (faces) and Q (scalars) are the unique
positive solutions of the exactness conditions

    dx * sum_i q_i (D v)_i = v_m - v_0        for every face vector v,
    dx * sum_j p_j (G f)_j = f_{m+1} - f_0    for every scalar vector f,

obtained by solving D^T q = b and G^T p = c (b, c = -1/+1 at the ends).  The
boundary operator B := dx * (Q D + G^T P) then closes the discrete
integration-by-parts identity

    <D v, f>_Q + <v, G f>_P = <B v, f>

to machine precision by construction, with the quadrature inner products
carrying the dx measure.  B is supported on a small corner block.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .errors import WeightSolveError
from .grid import center_axis_points, face_axis_points, scalar_axis_points
from .operators import DiagonalWeight, Space, SparseOperator

SUPPORTED_ORDERS = (2, 4)

# boundary rows as exact rationals; interior row is the staggered stencil
_DIV_TOP = {
    2: [],
    4: [[Fraction(-11, 12), Fraction(17, 24), Fraction(3, 8),
         Fraction(-5, 24), Fraction(1, 24)]],
}
_DIV_INTERIOR = {
    2: [Fraction(-1), Fraction(1)],
    4: [Fraction(1, 24), Fraction(-9, 8), Fraction(9, 8), Fraction(-1, 24)],
}
_GRAD_TOP = {
    2: [[Fraction(-8, 3), Fraction(3), Fraction(-1, 3)]],
    4: [[Fraction(-352, 105), Fraction(35, 8), Fraction(-35, 24),
         Fraction(21, 40), Fraction(-5, 56)],
        [Fraction(16, 105), Fraction(-31, 24), Fraction(29, 24),
         Fraction(-3, 40), Fraction(1, 168)]],
}

_B_PRUNE_TOL = 1e-12


def min_cells(k: int) -> int:
    """Smallest cell count keeping the two boundary blocks disjoint."""
    return 2 * k


def _check_order_cells(k: int, m: int):
    if k not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported order {k}; choose from {SUPPORTED_ORDERS}")
    if m < min_cells(k):
        raise ValueError(f"order {k} needs at least {min_cells(k)} cells, got {m}")


def scalar_space(m: int) -> Space:
    return Space("scalar", m + 2)


def face_space(m: int) -> Space:
    return Space("face", m + 1)


def divergence_1d(k: int, m: int, dx: float) -> SparseOperator:
    """Face -> scalar mimetic divergence, shape (m+2) x (m+1)."""
    _check_order_cells(k, m)
    if dx <= 0:
        raise ValueError(f"dx must be positive, got {dx}")
    rows, cols, vals = [], [], []
    top = _DIV_TOP[k]
    interior = _DIV_INTERIOR[k]
    half = len(interior) // 2
    for c in range(m):  # cell c -> scalar row c+1
        r = c + 1
        if c < len(top):
            stencil, start = top[c], 0
        elif c >= m - len(top):
            rev = top[m - 1 - c]
            stencil = [-x for x in rev[::-1]]
            start = m + 1 - len(stencil)
        else:
            stencil, start = interior, c - half + 1
        for j, val in enumerate(stencil):
            rows.append(r)
            cols.append(start + j)
            vals.append(float(val) / dx)
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(m + 2, m + 1))
    return SparseOperator(mat, face_space(m), scalar_space(m))


def gradient_1d(k: int, m: int, dx: float) -> SparseOperator:
    """Scalar -> face mimetic gradient, shape (m+1) x (m+2)."""
    _check_order_cells(k, m)
    if dx <= 0:
        raise ValueError(f"dx must be positive, got {dx}")
    rows, cols, vals = [], [], []
    top = _GRAD_TOP[k]
    interior = _DIV_INTERIOR[k]  # same staggered interior stencil
    nb = len(top)
    for r in range(m + 1):
        if r < nb:
            stencil, start = top[r], 0
        elif r > m - nb:
            rev = top[m - r]
            stencil = [-x for x in rev[::-1]]
            start = m + 2 - len(stencil)
        else:
            # face r, centered on scalar points r-1 .. r+2 (or r, r+1 for k=2)
            stencil = interior
            start = r - len(interior) // 2 + 1
        for j, val in enumerate(stencil):
            rows.append(r)
            cols.append(start + j)
            vals.append(float(val) / dx)
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(m + 1, m + 2))
    return SparseOperator(mat, scalar_space(m), face_space(m))


def weights_1d(k: int, m: int, tol: float = 1e-12):
    """Quadrature weights (P on faces, Q on scalars) from the exactness solves.

    Returns (P, Q).  Raises WeightSolveError if a residual exceeds tol or any
    weight is nonpositive.
    """
    _check_order_cells(k, m)
    D = divergence_1d(k, m, 1.0).toarray()
    G = gradient_1d(k, m, 1.0).toarray()
    b = np.zeros(m + 1)
    b[0], b[-1] = -1.0, 1.0
    c = np.zeros(m + 2)
    c[0], c[-1] = -1.0, 1.0
    # boundary scalar rows of D are zero; solve for the m interior entries
    q_int, *_ = np.linalg.lstsq(D[1:-1].T, b, rcond=None)
    p, *_ = np.linalg.lstsq(G.T, c, rcond=None)
    # the solutions decay geometrically to 1 away from the boundary; snap the
    # rounding fuzz so deep-interior entries are exactly 1 (the snap is below
    # the residual tolerance)
    q_int[np.abs(q_int - 1.0) < 1e-13] = 1.0
    p[np.abs(p - 1.0) < 1e-13] = 1.0
    res_q = np.abs(D[1:-1].T @ q_int - b).max()
    res_p = np.abs(G.T @ p - c).max()
    if res_q > tol or res_p > tol:
        raise WeightSolveError(
            f"exactness residuals {res_q:.2e} (Q), {res_p:.2e} (P) exceed {tol:.1e}"
        )
    q = np.concatenate([[1.0], q_int, [1.0]])
    if q.min() <= 0 or p.min() <= 0:
        raise WeightSolveError(
            f"nonpositive weight (min q = {q.min():.3e}, min p = {p.min():.3e})"
        )
    return (
        DiagonalWeight(p, face_space(m)),
        DiagonalWeight(q, scalar_space(m)),
    )


def boundary_1d(
    D: SparseOperator,
    G: SparseOperator,
    P: DiagonalWeight,
    Q: DiagonalWeight,
    dx: float,
) -> SparseOperator:
    """Boundary operator B = dx * (Q D + G^T P), pruned of roundoff entries.

    Supported on a corner block of about (k+1) x (k+2) at each end; satisfies
    B 1_face = (-1, 0, ..., 0, 1)^T and 1^T B = (-1, 0, ..., 0, 1) exactly.
    """
    B = dx * (Q.diag() @ D.matrix + G.matrix.T @ P.diag())
    B = B.tocsr()
    B.data[np.abs(B.data) < _B_PRUNE_TOL] = 0.0
    B.eliminate_zeros()
    return SparseOperator(B, D.domain, D.codomain)


# ---------------------------------------------------------------------------
# local polynomial interpolation / differentiation rows
# ---------------------------------------------------------------------------

def _window(src: np.ndarray, target: float, width: int) -> np.ndarray:
    """Indices of the `width` source points nearest the target (contiguous)."""
    idx = np.argsort(np.abs(src - target), kind="stable")[:width]
    return np.sort(idx)


def interpolation_matrix(src: np.ndarray, dst: np.ndarray, k: int) -> sp.csr_matrix:
    """Rows interpolate from src points to dst points, exact for degree k-1."""
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    width = min(k, src.size)
    rows, cols, vals = [], [], []
    for r, t in enumerate(dst):
        idx = _window(src, t, width)
        # Vandermonde in shifted coordinates; first unit vector gives the
        # value-at-t functional
        V = np.vander(src[idx] - t, width, increasing=True)
        e = np.zeros(width)
        e[0] = 1.0
        w = np.linalg.solve(V.T, e)
        rows.extend([r] * width)
        cols.extend(idx)
        vals.extend(w)
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(dst.size, src.size))
    mat.data[np.abs(mat.data) < 1e-14] = 0.0
    mat.eliminate_zeros()
    return mat


def derivative_rows(src: np.ndarray, dst: np.ndarray, npts: int) -> sp.csr_matrix:
    """First-derivative rows at dst from npts nearest src points."""
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    width = min(npts, src.size)
    rows, cols, vals = [], [], []
    for r, t in enumerate(dst):
        idx = _window(src, t, width)
        V = np.vander(src[idx] - t, width, increasing=True)
        e = np.zeros(width)
        e[1] = 1.0  # derivative-at-t functional
        w = np.linalg.solve(V.T, e)
        rows.extend([r] * width)
        cols.extend(idx)
        vals.extend(w)
    return sp.csr_matrix((vals, (rows, cols)), shape=(dst.size, src.size))


def interpolators_1d(k: int, m: int):
    """Center<->face interpolators (I_c2f scalar->face, I_f2c face->scalar)."""
    _check_order_cells(k, m)
    spts = scalar_axis_points(m)
    fpts = face_axis_points(m)
    c2f = SparseOperator(
        interpolation_matrix(spts, fpts, k), scalar_space(m), face_space(m)
    )
    f2c = SparseOperator(
        interpolation_matrix(fpts, spts, k), face_space(m), scalar_space(m)
    )
    return c2f, f2c


def derivative_to_faces(k: int, m: int, dx: float) -> sp.csr_matrix:
    """d/dxi of scalar-point data evaluated at faces (= the mimetic G)."""
    return gradient_1d(k, m, dx).matrix


def derivative_to_centers(k: int, m: int, dx: float) -> sp.csr_matrix:
    """d/dxi of scalar-point data evaluated at the m centers, order k.

    Built as the mimetic gradient followed by order-k interpolation of the
    face field back to centers.
    """
    G = gradient_1d(k, m, dx).matrix
    interp = interpolation_matrix(face_axis_points(m), center_axis_points(m), k)
    return (interp @ G).tocsr()
