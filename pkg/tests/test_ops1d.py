from fractions import Fraction as F

import numpy as np
import pytest

from mimetic_curv import (
    boundary_1d,
    divergence_1d,
    gradient_1d,
    interpolators_1d,
    weights_1d,
)
from mimetic_curv.grid import face_axis_points, scalar_axis_points
from mimetic_curv.ops1d import min_cells


def build(k, m, dx=1.0):
    D = divergence_1d(k, m, dx)
    G = gradient_1d(k, m, dx)
    P, Q = weights_1d(k, m)
    B = boundary_1d(D, G, P, Q, dx)
    return D, G, P, Q, B


def test_order4_divergence_entries_exact():
    dx = 0.25
    D = divergence_1d(4, 12, dx).toarray()
    assert D[1, 0] == float(F(-11, 12)) / dx
    assert D[2, 1] == float(F(-9, 8)) / dx
    assert np.array_equal(D[0], np.zeros(13))
    assert np.array_equal(D[13], np.zeros(13))


def test_order4_gradient_entries_exact():
    dx = 0.5
    G = gradient_1d(4, 12, dx).toarray()
    assert G[0, 0] == float(F(-352, 105)) / dx
    assert G[1, 0] == float(F(16, 105)) / dx
    assert G[2, 1] == float(F(1, 24)) / dx


def test_order2_rows():
    D = divergence_1d(2, 6, 1.0).toarray()
    G = gradient_1d(2, 6, 1.0).toarray()
    assert np.allclose(D[1, :2], [-1.0, 1.0])
    assert np.allclose(G[0, :3], [float(F(-8, 3)), 3.0, float(F(-1, 3))])
    assert np.allclose(G[3, 3:5], [-1.0, 1.0])


@pytest.mark.parametrize("k", [2, 4])
def test_persymmetry(k):
    m = 11
    D = divergence_1d(k, m, 1.0).toarray()
    G = gradient_1d(k, m, 1.0).toarray()
    assert np.array_equal(D, -D[::-1, ::-1])
    assert np.array_equal(G, -G[::-1, ::-1])


@pytest.mark.parametrize("k", [2, 4])
def test_nullspace(k):
    m, dx = 17, 1.0 / 17
    D = divergence_1d(k, m, dx)
    G = gradient_1d(k, m, dx)
    assert np.abs(D @ np.ones(m + 1)).max() <= 5e-14 / dx
    assert np.abs(G @ np.ones(m + 2)).max() <= 5e-14 / dx


@pytest.mark.parametrize("k", [2, 4])
def test_polynomial_exactness(k):
    m = 13
    dx = 1.0 / m
    s = scalar_axis_points(m)
    f = face_axis_points(m)
    D = divergence_1d(k, m, dx)
    G = gradient_1d(k, m, dx)
    for j in range(k + 1):
        dv = D @ (f ** j)
        want = j * s ** (j - 1) if j else np.zeros_like(s)
        assert np.abs(dv[1:-1] - want[1:-1]).max() <= 1e-11
        gv = G @ (s ** j)
        wantg = j * f ** (j - 1) if j else np.zeros_like(f)
        assert np.abs(gv - wantg).max() <= 1e-11


def test_quartic_derivative_exact_on_interior():
    m, dx = 16, 1.0 / 16
    s = scalar_axis_points(m)
    f = face_axis_points(m)
    dv = divergence_1d(4, m, dx) @ (f ** 4)
    want = 4.0 * s ** 3
    rel = np.abs(dv[1:-1] - want[1:-1]) / np.maximum(np.abs(want[1:-1]), 1.0)
    assert rel.max() <= 1e-12


def test_order2_boundary_row_exact_for_quadratic():
    # f(x) = x^2 sampled at {0, 1/2, 3/2}: the one-sided row gives f'(0) = 0
    G = gradient_1d(2, 6, 1.0).toarray()
    vals = np.array([0.0, 0.25, 2.25])
    assert abs(G[0, :3] @ vals) <= 1e-13


@pytest.mark.parametrize("k,m", [(2, 3), (4, 7)])
def test_min_cells_enforced(k, m):
    assert m < min_cells(k)
    with pytest.raises(ValueError):
        divergence_1d(k, m, 1.0)


def test_unsupported_order_rejected():
    with pytest.raises(ValueError):
        gradient_1d(3, 16, 1.0)
    with pytest.raises(ValueError):
        divergence_1d(6, 16, 0.5)
    with pytest.raises(ValueError):
        divergence_1d(2, 8, -1.0)


def test_order2_weights_reproduce_known_pattern():
    P, Q = weights_1d(2, 9)
    assert np.allclose(Q.values, np.ones(11))
    assert np.allclose(P.values[:3], [3.0 / 8.0, 9.0 / 8.0, 1.0])
    assert np.allclose(P.values[-2:], [9.0 / 8.0, 3.0 / 8.0])


@pytest.mark.parametrize("k", [2, 4])
def test_weights_positive_and_tail_to_one(k):
    P, Q = weights_1d(k, 64)
    assert P.values.min() > 0 and Q.values.min() > 0
    # far from the boundary the weights are 1 to float precision
    assert np.abs(P.values[28:36] - 1.0).max() == 0.0
    assert np.abs(Q.values[28:36] - 1.0).max() == 0.0


@pytest.mark.parametrize("k", [2, 4])
def test_exactness_condition(k):
    m, dx = 14, 1.0 / 14
    D, G, P, Q, B = build(k, m, dx)
    rng = np.random.default_rng(3)
    for _ in range(10):
        v = rng.standard_normal(m + 1)
        lhs = Q.inner(D @ v, np.ones(m + 2), dx)
        assert abs(lhs - (v[-1] - v[0])) <= 1e-13 * max(1.0, np.abs(v).max())
        f = rng.standard_normal(m + 2)
        lhs = P.inner(G @ f, np.ones(m + 1), dx)
        assert abs(lhs - (f[-1] - f[0])) <= 1e-13 * max(1.0, np.abs(f).max())


@pytest.mark.parametrize("k", [2, 4])
def test_gauss_identity_1d(k):
    m, dx = 12, 0.125
    D, G, P, Q, B = build(k, m, dx)
    rng = np.random.default_rng(11)
    for _ in range(50):
        v = rng.standard_normal(m + 1)
        f = rng.standard_normal(m + 2)
        r = Q.inner(D @ v, f, dx) + P.inner(v, G @ f, dx) - f @ (B @ v)
        assert abs(r) <= 1e-12 * np.linalg.norm(v) * np.linalg.norm(f)


@pytest.mark.parametrize("k", [2, 4])
def test_boundary_operator_structure(k):
    m = 24
    D, G, P, Q, B = build(k, m, 1.0 / m)
    Bd = B.toarray()
    # row sums and column sums are the exact corner differences
    assert np.allclose(Bd @ np.ones(m + 1),
                       np.concatenate([[-1.0], np.zeros(m), [1.0]]), atol=1e-12)
    assert np.allclose(np.ones(m + 2) @ Bd,
                       np.concatenate([[-1.0], np.zeros(m - 1), [1.0]]), atol=1e-12)
    # support confined to the boundary blocks
    margin = {2: 3, 4: 12}[k]
    nz_rows, nz_cols = np.nonzero(Bd)
    assert np.all((nz_rows <= margin) | (nz_rows >= m + 1 - margin))
    assert np.all((nz_cols <= margin) | (nz_cols >= m - margin))
    # faces vanishing near both ends are annihilated
    v = np.zeros(m + 1)
    v[margin + 1:m - margin] = np.random.default_rng(5).standard_normal(
        m - 2 * margin - 1
    )
    assert np.abs(Bd @ v).max() == 0.0


def test_order2_boundary_corner_values():
    _, _, _, _, B = build(2, 10, 0.1)
    Bd = B.toarray()
    assert abs(Bd[0, 0] + 1.0) <= 1e-14
    assert abs(Bd[-1, -1] - 1.0) <= 1e-14


@pytest.mark.parametrize("k", [2, 4])
def test_boundary_contraction_for_smooth_fields(k):
    # <Bv, f> approximates the corner difference at order k for smooth fields
    gaps = []
    for m in (16, 32, 64):
        D, G, P, Q, B = build(k, m, 1.0 / m)
        s = scalar_axis_points(m)
        fa = face_axis_points(m)
        f = np.exp(s)
        v = np.sin(2.0 * fa) + 0.3
        exact = f[-1] * v[-1] - f[0] * v[0]
        gaps.append(abs(f @ (B @ v) - exact))
    assert gaps[0] / gaps[-1] >= 2 ** (2 * (k - 0.5))


@pytest.mark.parametrize("k", [2, 4])
def test_interpolators_reproduce_polynomials(k):
    m = 15
    c2f, f2c = interpolators_1d(k, m)
    s = scalar_axis_points(m)
    fa = face_axis_points(m)
    assert np.abs(c2f @ np.ones(m + 2) - 1.0).max() <= 1e-13
    assert np.abs(f2c @ np.ones(m + 1) - 1.0).max() <= 1e-13
    for j in range(k):
        assert np.abs(c2f @ (s ** j) - fa ** j).max() <= 1e-12
        assert np.abs(f2c @ (fa ** j) - s ** j).max() <= 1e-12


def test_order4_interpolator_cubic():
    m = 16
    c2f, _ = interpolators_1d(4, m)
    s = scalar_axis_points(m)
    fa = face_axis_points(m)
    assert np.abs(c2f @ (s ** 3) - fa ** 3).max() <= 1e-12


def test_order2_interior_interpolator_is_midpoint_average():
    m = 8
    c2f, _ = interpolators_1d(2, m)
    row = c2f.toarray()[4]
    expected = np.zeros(m + 2)
    expected[4:6] = 0.5
    assert np.allclose(row, expected, atol=1e-14)


@pytest.mark.parametrize("k", [2, 4])
def test_gradient_convergence_on_exponential(k):
    errors = []
    cells = [16, 32, 64, 128]
    for m in cells:
        dx = 1.0 / m
        G = gradient_1d(k, m, dx)
        s = scalar_axis_points(m)
        fa = face_axis_points(m)
        errors.append(np.abs(G @ np.exp(s) - np.exp(fa)).max())
    for (e1, e2), (m1, m2) in zip(zip(errors, errors[1:]), zip(cells, cells[1:])):
        order = np.log(e1 / e2) / np.log(m2 / m1)
        assert order >= k - 0.1
