"""Staggered logical grids, coordinate mappings, and sampled metric terms.

The logical domain is always the unit square/cube.  Scalar unknowns live at
cell centers plus the two boundary points of each axis (m+2 points per axis);
vector components live at the m+1 face points of their axis, at center
positions along the transverse axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridError, MappingError, SingularMappingError

# locations where metric terms are sampled
CENTERS = "centers"


def face_location(axis: int) -> str:
    return f"face_{axis}"


def scalar_axis_points(m: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Boundary point, m cell centers, boundary point (m+2 values)."""
    h = (hi - lo) / m
    return np.concatenate([[lo], lo + (np.arange(m) + 0.5) * h, [hi]])


def face_axis_points(m: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    return lo + np.arange(m + 1) * (hi - lo) / m


def center_axis_points(m: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    return lo + (np.arange(m) + 0.5) * (hi - lo) / m


def tensor_points(*axes: np.ndarray) -> np.ndarray:
    """Tensor-product points flattened x-fastest, shape (N, dim)."""
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1, order="F") for g in grids], axis=-1)


@dataclass(frozen=True)
class StaggeredGrid:
    """Uniform staggered grid on a logical box."""

    dim: int
    cells: tuple
    bounds: tuple  # per-axis (lo, hi)

    @property
    def spacing(self) -> tuple:
        return tuple((hi - lo) / m for m, (lo, hi) in zip(self.cells, self.bounds))

    @property
    def cell_measure(self) -> float:
        return math.prod(self.spacing)

    def scalar_axis(self, axis: int) -> np.ndarray:
        lo, hi = self.bounds[axis]
        return scalar_axis_points(self.cells[axis], lo, hi)

    def face_axis(self, axis: int) -> np.ndarray:
        lo, hi = self.bounds[axis]
        return face_axis_points(self.cells[axis], lo, hi)

    def center_axis(self, axis: int) -> np.ndarray:
        lo, hi = self.bounds[axis]
        return center_axis_points(self.cells[axis], lo, hi)

    def location_axes(self, location: str):
        """Per-axis 1D point arrays for a sample location."""
        if location == CENTERS:
            return [self.center_axis(a) for a in range(self.dim)]
        if location == "scalar":
            return [self.scalar_axis(a) for a in range(self.dim)]
        for a in range(self.dim):
            if location == face_location(a):
                return [
                    self.face_axis(ax) if ax == a else self.center_axis(ax)
                    for ax in range(self.dim)
                ]
        raise ValueError(f"unknown location {location!r}")

    def points(self, location: str) -> np.ndarray:
        """Flattened (N, dim) logical points of a sample location."""
        return tensor_points(*self.location_axes(location))


def make_grid(dim: int, cells, bounds=None) -> StaggeredGrid:
    """Build a staggered grid; bounds default to the unit box."""
    if dim not in (1, 2, 3):
        raise GridError(f"dim must be 1, 2 or 3, got {dim}")
    cells = tuple(int(c) for c in (cells if np.iterable(cells) else [cells]))
    if len(cells) != dim:
        raise GridError(f"expected {dim} cell counts, got {len(cells)}")
    if any(c < 1 for c in cells):
        raise GridError(f"cell counts must be positive, got {cells}")
    if bounds is None:
        bounds = [(0.0, 1.0)] * dim
    bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
    if len(bounds) != dim:
        raise GridError(f"expected {dim} bounds, got {len(bounds)}")
    if any(hi <= lo for lo, hi in bounds):
        raise GridError(f"degenerate interval in bounds {bounds}")
    return StaggeredGrid(dim, cells, bounds)


# ---------------------------------------------------------------------------
# mappings: logical unit box -> physical region
# ---------------------------------------------------------------------------

class Mapping:
    """Base class for logical-to-physical coordinate maps."""

    kind = "base"
    dim = 2
    has_analytic_jacobian = True

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, pts: np.ndarray) -> np.ndarray:
        """Partial derivatives, shape (N, dim, dim): [n, p, q] = dx_p/dxi_q."""
        raise NotImplementedError


class IdentityMapping(Mapping):
    kind = "identity"

    def __init__(self, dim: int = 2):
        self.dim = dim

    def __call__(self, pts):
        return np.array(pts, dtype=float, copy=True)

    def jacobian(self, pts):
        n = np.asarray(pts).shape[0]
        return np.broadcast_to(np.eye(self.dim), (n, self.dim, self.dim)).copy()


class SemiAnnulusMapping(Mapping):
    """Half annulus a <= r <= b, 0 <= theta <= pi, theta = pi * xi2."""

    kind = "semi_annulus"
    dim = 2

    def __init__(self, a: float, b: float):
        if not 0 < a < b:
            raise MappingError(f"need 0 < a < b, got a={a}, b={b}")
        self.a = float(a)
        self.b = float(b)

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        r = self.a + (self.b - self.a) * pts[..., 0]
        th = np.pi * pts[..., 1]
        return np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)

    def jacobian(self, pts):
        pts = np.asarray(pts, dtype=float)
        r = self.a + (self.b - self.a) * pts[..., 0]
        th = np.pi * pts[..., 1]
        dr = self.b - self.a
        out = np.empty(pts.shape[:-1] + (2, 2))
        out[..., 0, 0] = dr * np.cos(th)          # x_xi
        out[..., 0, 1] = -np.pi * r * np.sin(th)  # x_eta
        out[..., 1, 0] = dr * np.sin(th)          # y_xi
        out[..., 1, 1] = np.pi * r * np.cos(th)   # y_eta
        return out


class Sinusoidal2DMapping(Mapping):
    """Unit square with both coordinates perturbed by
    eps * sin(2 pi xi) * sin(2 pi eta).

    J = 1 + 2 pi eps sin(2 pi (xi + eta)), so injectivity requires
    |eps| < 1 / (2 pi).
    """

    kind = "sinusoidal2d"
    dim = 2
    EPS_BOUND = 1.0 / (2.0 * np.pi)

    def __init__(self, eps: float = 0.06):
        if abs(eps) >= self.EPS_BOUND:
            raise MappingError(
                f"|eps| = {abs(eps)} >= {self.EPS_BOUND:.6f} folds the grid"
            )
        self.eps = float(eps)

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        g = self.eps * np.sin(2 * np.pi * pts[..., 0]) * np.sin(2 * np.pi * pts[..., 1])
        return np.stack([pts[..., 0] + g, pts[..., 1] + g], axis=-1)

    def jacobian(self, pts):
        pts = np.asarray(pts, dtype=float)
        two_pi = 2 * np.pi
        g_xi = self.eps * two_pi * np.cos(two_pi * pts[..., 0]) * np.sin(two_pi * pts[..., 1])
        g_eta = self.eps * two_pi * np.sin(two_pi * pts[..., 0]) * np.cos(two_pi * pts[..., 1])
        out = np.empty(pts.shape[:-1] + (2, 2))
        out[..., 0, 0] = 1.0 + g_xi
        out[..., 0, 1] = g_eta
        out[..., 1, 0] = g_xi
        out[..., 1, 1] = 1.0 + g_eta
        return out


class Sinusoidal3DMapping(Mapping):
    """Unit cube with every coordinate perturbed by
    eps * sin(2 pi xi) sin(2 pi eta) sin(2 pi zeta).
    """

    kind = "sinusoidal3d"
    dim = 3
    # max of |g_xi + g_eta + g_zeta| / (2 pi eps) is 2/sqrt(3)
    EPS_BOUND = math.sqrt(3.0) / (4.0 * np.pi)

    def __init__(self, eps: float = 0.06):
        if abs(eps) >= self.EPS_BOUND:
            raise MappingError(
                f"|eps| = {abs(eps)} >= {self.EPS_BOUND:.6f} folds the grid"
            )
        self.eps = float(eps)

    def _sines(self, pts):
        s = [np.sin(2 * np.pi * pts[..., a]) for a in range(3)]
        c = [np.cos(2 * np.pi * pts[..., a]) for a in range(3)]
        return s, c

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        s, _ = self._sines(pts)
        g = self.eps * s[0] * s[1] * s[2]
        return np.stack([pts[..., a] + g for a in range(3)], axis=-1)

    def jacobian(self, pts):
        pts = np.asarray(pts, dtype=float)
        s, c = self._sines(pts)
        two_pi_eps = 2 * np.pi * self.eps
        grad = [
            two_pi_eps * c[0] * s[1] * s[2],
            two_pi_eps * s[0] * c[1] * s[2],
            two_pi_eps * s[0] * s[1] * c[2],
        ]
        n = pts.shape[0]
        out = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
        for q in range(3):
            for p in range(3):
                out[:, p, q] += grad[q]
        return out


_MAPPING_KINDS = {
    "identity": IdentityMapping,
    "semi_annulus": SemiAnnulusMapping,
    "sinusoidal2d": Sinusoidal2DMapping,
    "sinusoidal3d": Sinusoidal3DMapping,
}


def make_mapping(kind: str, **params) -> Mapping:
    try:
        cls = _MAPPING_KINDS[kind]
    except KeyError:
        raise MappingError(f"unknown mapping kind {kind!r}") from None
    return cls(**params)


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricSample:
    """Metric terms at one sample location, flattened x-fastest.

    partials[n, p, q] = dx_p / dxi_q; jac[n] = det(partials[n]).
    cofactor[n, p, q] = jac * inv(partials)[q, p]; row q of the transpose
    gives the coefficients of the contravariant flux through xi_q faces.
    """

    partials: np.ndarray
    jac: np.ndarray

    @property
    def cofactor(self) -> np.ndarray:
        inv_t = np.linalg.inv(self.partials).transpose(0, 2, 1)
        return self.jac[:, None, None] * inv_t


@dataclass(frozen=True)
class Metrics:
    grid: StaggeredGrid
    mapping: Mapping
    samples: dict = field(default_factory=dict)  # location -> MetricSample

    def at(self, location: str) -> MetricSample:
        return self.samples[location]


def _check_jacobian(location: str, pts: np.ndarray, jac: np.ndarray):
    if jac.min() <= 0.0:
        i = int(np.argmin(jac))
        raise SingularMappingError(location, pts[i], jac[i])


def compute_metrics(
    mapping: Mapping,
    grid: StaggeredGrid,
    order: int = 4,
    analytic: bool | None = None,
) -> Metrics:
    """Sample metric partials and J at centers and every face set.

    With analytic=False the partials are computed by applying the 1D mimetic
    gradient of the requested order to coordinate samples (same-order numeric
    differentiation); otherwise the mapping's analytic Jacobian is used.
    """
    if mapping.dim != grid.dim:
        raise MappingError(f"mapping dim {mapping.dim} != grid dim {grid.dim}")
    if analytic is None:
        analytic = mapping.has_analytic_jacobian
    locations = [CENTERS] + [face_location(a) for a in range(grid.dim)]
    samples = {}
    for loc in locations:
        pts = grid.points(loc)
        if analytic:
            partials = mapping.jacobian(pts)
        else:
            partials = _numeric_partials(mapping, grid, loc, order)
        jac = np.linalg.det(partials)
        _check_jacobian(loc, pts, jac)
        samples[loc] = MetricSample(partials=partials, jac=jac)
    return Metrics(grid=grid, mapping=mapping, samples=samples)


def _apply_along_axis(mat, flat: np.ndarray, shape: tuple, axis: int) -> np.ndarray:
    """Apply a 1D operator along one axis of an x-fastest flattened field."""
    arr = flat.reshape(shape, order="F")
    arr = np.moveaxis(arr, axis, 0)
    lead = arr.shape[0]
    out = mat @ arr.reshape(lead, -1)
    out = out.reshape((mat.shape[0],) + arr.shape[1:])
    out = np.moveaxis(out, 0, axis)
    return out.reshape(-1, order="F")


def _numeric_partials(mapping, grid, location: str, order: int) -> np.ndarray:
    from .ops1d import derivative_to_centers, derivative_to_faces

    dim = grid.dim
    axes = grid.location_axes(location)
    shape = tuple(len(a) for a in axes)
    n = int(np.prod(shape))
    partials = np.empty((n, dim, dim))
    for q in range(dim):
        # coordinates sampled with axis q at scalar points
        sample_axes = list(axes)
        sample_axes[q] = grid.scalar_axis(q)
        pts = tensor_points(*sample_axes)
        phys = mapping(pts)
        m_q = grid.cells[q]
        dxi_q = grid.spacing[q]
        on_faces = location == face_location(q)
        dmat = (
            derivative_to_faces(order, m_q, dxi_q)
            if on_faces
            else derivative_to_centers(order, m_q, dxi_q)
        )
        src_shape = tuple(
            len(sa) for sa in sample_axes
        )
        for p in range(dim):
            partials[:, p, q] = _apply_along_axis(dmat, phys[:, p], src_shape, q)
    return partials
