import math

import numpy as np
import pytest

from mimetic_curv import compute_metrics, make_grid, make_mapping
from mimetic_curv.errors import GridError, MappingError, SingularMappingError
from mimetic_curv.grid import CENTERS, Mapping, face_location
from mimetic_curv.opsnd import FieldLayout


def test_1d_point_sets_match_staggered_layout():
    g = make_grid(1, [5])
    assert np.allclose(g.face_axis(0), [0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    assert np.allclose(g.scalar_axis(0), [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0])


def test_2d_staggered_counts():
    layout = FieldLayout(2, (5, 3))
    assert layout.face_size(0) == 6 * 3  # u faces
    assert layout.face_size(1) == 5 * 4  # v faces
    assert layout.scalar_size == 7 * 5


@pytest.mark.parametrize("cells", [0, -2])
def test_bad_cell_count_rejected(cells):
    with pytest.raises(GridError):
        make_grid(1, [cells])


def test_degenerate_interval_rejected():
    with pytest.raises(GridError):
        make_grid(1, [4], bounds=[(1.0, 1.0)])


def test_semi_annulus_corner_point():
    mp = make_mapping("semi_annulus", a=2 * math.pi, b=3 * math.pi)
    xy = mp(np.array([[0.0, 0.0]]))
    assert np.allclose(xy, [[2 * math.pi, 0.0]], atol=1e-14)


def test_identity_mapping_fixes_points():
    mp = make_mapping("identity")
    pts = np.random.default_rng(0).uniform(size=(7, 2))
    assert np.array_equal(mp(pts), pts)


def test_sinusoidal_sample_value():
    mp = make_mapping("sinusoidal2d", eps=0.06)
    xy = mp(np.array([[0.25, 0.25]]))
    assert abs(xy[0, 0] - 0.31) < 1e-14
    assert abs(xy[0, 1] - 0.31) < 1e-14


def test_mapping_parameter_validation():
    with pytest.raises(MappingError):
        make_mapping("semi_annulus", a=2.0, b=1.0)
    with pytest.raises(MappingError):
        make_mapping("sinusoidal2d", eps=0.2)
    with pytest.raises(MappingError):
        make_mapping("sinusoidal3d", eps=0.15)
    with pytest.raises(MappingError):
        make_mapping("no_such_kind")


def test_identity_metrics_are_exact():
    g = make_grid(2, (6, 9))
    met = compute_metrics(make_mapping("identity"), g, order=2)
    for loc in (CENTERS, face_location(0), face_location(1)):
        s = met.at(loc)
        assert np.array_equal(s.jac, np.ones_like(s.jac))
        assert np.array_equal(s.partials[:, 0, 1], np.zeros_like(s.jac))
        assert np.array_equal(s.partials[:, 1, 0], np.zeros_like(s.jac))


def test_semi_annulus_jacobian_matches_hand_formula():
    a, b = 2 * math.pi, 3 * math.pi
    g = make_grid(2, (8, 8))
    met = compute_metrics(make_mapping("semi_annulus", a=a, b=b), g)
    pts = g.points(CENTERS)
    expected = math.pi * (b - a) * (a + (b - a) * pts[:, 0])
    assert np.allclose(met.at(CENTERS).jac, expected, rtol=1e-13)


def test_folded_mapping_raises_singular_error():
    mp = make_mapping("sinusoidal2d", eps=0.15)
    mp.eps = 0.3  # bypass the constructor bound to force a fold
    with pytest.raises(SingularMappingError) as err:
        compute_metrics(mp, make_grid(2, (12, 12)))
    assert "J =" in str(err.value)


def test_semi_annulus_boundary_points_on_circles():
    a, b = 1.5, 4.0
    g = make_grid(2, (10, 10))
    mp = make_mapping("semi_annulus", a=a, b=b)
    pts = g.points("scalar")
    xy = mp(pts)
    r = np.hypot(xy[:, 0], xy[:, 1])
    inner = pts[:, 0] == 0.0
    outer = pts[:, 0] == 1.0
    assert np.abs(r[inner] - a).max() <= 1e-13 * a
    assert np.abs(r[outer] - b).max() <= 1e-13 * b


@pytest.mark.parametrize("kind,params", [
    ("semi_annulus", dict(a=2.0, b=4.0)),
    ("sinusoidal2d", dict(eps=0.06)),
])
@pytest.mark.parametrize("k", [2, 4])
def test_numeric_metrics_converge_to_analytic(kind, params, k):
    mp = make_mapping(kind, **params)
    discrepancy = []
    for m in (16, 32, 64):
        g = make_grid(2, (m, m))
        exact = compute_metrics(mp, g, order=k)
        numeric = compute_metrics(mp, g, order=k, analytic=False)
        worst = 0.0
        for loc in (CENTERS, face_location(0), face_location(1)):
            d = np.abs(numeric.at(loc).partials - exact.at(loc).partials).max()
            worst = max(worst, d)
        discrepancy.append(worst)
    for d1, d2 in zip(discrepancy, discrepancy[1:]):
        assert d1 / d2 >= 2 ** (k - 0.5)


def test_min_jacobian_positive_across_mappings():
    for kind, params, dim in (
        ("identity", {}, 2),
        ("semi_annulus", dict(a=2.0, b=4.0), 2),
        ("sinusoidal2d", dict(eps=0.06), 2),
        ("sinusoidal3d", dict(eps=0.06), 3),
    ):
        for m in (4, 8, 16):
            g = make_grid(dim, (m,) * dim)
            met = compute_metrics(make_mapping(kind, **params), g)
            for loc in [CENTERS] + [face_location(a) for a in range(dim)]:
                assert met.at(loc).jac.min() > 0


def test_metrics_dim_mismatch_rejected():
    with pytest.raises(MappingError):
        compute_metrics(make_mapping("sinusoidal3d", eps=0.05), make_grid(2, (8, 8)))


def test_custom_mapping_singular_at_face():
    class Collapse(Mapping):
        kind = "collapse"
        dim = 2

        def __call__(self, pts):
            out = np.array(pts, dtype=float)
            out[..., 0] = out[..., 0] ** 2
            return out

        def jacobian(self, pts):
            n = np.asarray(pts).shape[0]
            jac = np.broadcast_to(np.eye(2), (n, 2, 2)).copy()
            jac[:, 0, 0] = 2.0 * np.asarray(pts)[:, 0]  # zero at xi = 0
            return jac

    with pytest.raises(SingularMappingError):
        compute_metrics(Collapse(), make_grid(2, (6, 6)))
