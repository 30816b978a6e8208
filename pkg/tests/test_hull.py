import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from fdivrange.hull import clip_to_box, convex_hull, hull_distance, lower_upper_chains


def cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def test_matches_scipy_on_random_clouds():
    rng = np.random.default_rng(3)
    for n in [3, 10, 100, 5000]:
        pts = rng.normal(size=(n, 2))
        ours = set(convex_hull(pts).tolist())
        ref = set(ConvexHull(pts).vertices.tolist())
        assert ours == ref


def test_counterclockwise_from_lexicographic_minimum():
    pts = np.array([[1, 1], [0, 0], [1, 0], [0, 1], [0.5, 0.5]])
    h = convex_hull(pts)
    assert h.tolist() == [1, 2, 0, 3]
    V = pts[h]
    for i in range(len(V)):
        assert cross(V[i], V[(i + 1) % len(V)], V[(i + 2) % len(V)]) > 0


def test_degenerate_inputs():
    assert convex_hull(np.array([[1.0, 1.0], [1.0, 1.0]])).tolist() == [0]
    line = np.array([[0, 0], [1, 1], [2, 2], [0.5, 0.5]], dtype=float)
    assert sorted(convex_hull(line).tolist()) == [0, 2]
    with pytest.raises(ValueError):
        convex_hull(np.zeros((0, 2)))


def test_near_collinear_points_dropped():
    pts = np.array([[0, 0], [1, 1e-14], [2, 0], [1, 1]], dtype=float)
    assert 1 not in convex_hull(pts, tol=1e-12).tolist()


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=3, max_size=80))
def test_hull_contains_every_input(points):
    pts = np.array(points, dtype=float)
    h = pts[convex_hull(pts)]
    d = hull_distance(h, pts)
    assert np.all(d <= 1e-9 * (1 + np.abs(pts).max()))


def test_distance_matches_brute_force():
    rng = np.random.default_rng(5)
    pts = rng.uniform(-1, 1, size=(50, 2))
    V = pts[convex_hull(pts)]
    Z = rng.uniform(-3, 3, size=(400, 2))
    got = hull_distance(V, Z)
    # brute force: inside by half-plane tests, else min over edges
    for z, g in zip(Z, got):
        inside = all(cross(V[i], V[(i + 1) % len(V)], z) >= 0 for i in range(len(V)))
        if inside:
            assert g == 0.0
        else:
            best = np.inf
            for i in range(len(V)):
                a, b = V[i], V[(i + 1) % len(V)]
                s = np.clip(np.dot(z - a, b - a) / np.dot(b - a, b - a), 0, 1)
                best = min(best, np.linalg.norm(z - a - s * (b - a)))
            assert g == pytest.approx(best, rel=1e-12, abs=1e-15)


def test_distance_to_point_and_segment():
    assert hull_distance(np.array([[0.0, 0.0]]), np.array([[3.0, 4.0]]))[0] == 5.0
    seg = np.array([[0.0, 0.0], [2.0, 0.0]])
    np.testing.assert_allclose(hull_distance(seg, np.array([[1.0, 1.0], [3.0, 0.0], [1.0, 0.0]])), [1, 1, 0])


def test_chains_of_square():
    V = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    lo, hi = lower_upper_chains(V)
    assert lo.tolist() == [[0, 0], [1, 0]]
    assert hi.tolist() == [[0, 1], [1, 1]]


def test_clip_triangle_to_box():
    tri = np.array([[0, 0], [10, 0], [0, 10]], dtype=float)
    verts, src = clip_to_box(tri, 4.0, 3.0)
    expected = {(0.0, 0.0), (4.0, 0.0), (4.0, 3.0), (0.0, 3.0)}
    assert {tuple(v) for v in verts.tolist()} == expected
    assert src.tolist().count(-1) == 3
    # still counterclockwise
    for i in range(len(verts)):
        assert cross(verts[i], verts[(i + 1) % len(verts)], verts[(i + 2) % len(verts)]) >= 0


def test_clip_keeps_polygon_inside_box():
    V = np.array([[0, 0], [1, 0], [1, 1]], dtype=float)
    verts, src = clip_to_box(V, 5, 5)
    assert verts.tolist() == V.tolist() and src.tolist() == [0, 1, 2]


def test_clip_segment():
    verts, src = clip_to_box(np.array([[0, 0], [1e10, 1e10]], dtype=float), 1.0, 1.0)
    assert len(verts) == 2
    np.testing.assert_allclose(verts, [[0, 0], [1, 1]])


def brute_distance(V, Z):
    a, b = V, np.roll(V, -1, axis=0)
    e = b - a
    w = Z[:, None, :] - a[None]
    s = np.clip(np.einsum("nmj,mj->nm", w, e) / np.einsum("mj,mj->m", e, e), 0, 1)
    return np.hypot(*(w - s[..., None] * e).transpose(2, 0, 1)).min(axis=1)


@pytest.mark.parametrize("shape", ["circle", "thin", "parabola"])
def test_distance_on_large_polygons_matches_brute_force(shape):
    rng = np.random.default_rng(11)
    t = np.sort(rng.uniform(0, 2 * np.pi, 3000))
    if shape == "circle":
        pts = np.column_stack([np.cos(t), np.sin(t)])
    elif shape == "thin":
        pts = np.column_stack([np.cos(t), 1e-3 * np.sin(t)])
    else:
        x = rng.uniform(0, 1, 3000)
        pts = np.vstack([np.column_stack([x, x * x]), [[0, 1], [1, 1]]])
    V = pts[convex_hull(pts)]
    Z = rng.uniform(-2, 2, size=(2000, 2)) * np.array([1.0, 1e-3 if shape == "thin" else 1.0])
    # plus points just outside the boundary
    k = rng.integers(0, len(V), 500)
    near = V[k] + 1e-10 * rng.normal(size=(500, 2))
    Z = np.vstack([Z, near])
    got = hull_distance(V, Z)
    want = brute_distance(V, Z)
    inside = got == 0
    np.testing.assert_allclose(got[~inside], want[~inside], rtol=1e-9, atol=1e-15)
    # zero distance only inside (or on) every edge line, up to rounding
    a, b = V, np.roll(V, -1, axis=0)
    Zi = Z[inside]
    cross_ = (b[:, 0] - a[:, 0]) * (Zi[:, None, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (Zi[:, None, 0] - a[:, 0])
    assert cross_.min() >= -1e-15


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e-30, 1e-30), st.floats(-10, 10)), min_size=2, max_size=30),
       st.floats(0, 1))
def test_near_vertical_runs_keep_extremes(points, slope):
    # almost collinear along a steep line: the hull must still reach both ends
    pts = np.array([(x + slope * 1e-13 * y, y) for x, y in points], dtype=float)
    h = pts[convex_hull(pts)]
    assert hull_distance(h, pts).max() <= 1e-9


@pytest.mark.parametrize(
    "points",
    [
        # the lexicographic minimum sits within tolerance of a chord
        [(0.0, -1.0), (1.0, 0.0), (2.0, 0.0), (-1.0360074510670128e-101, 0.0), (-6.962092571635969e-129, 9.927591316646743e-85)],
        # the turn underflows to exactly zero
        [(0.0, 0.0), (0.0, 0.25), (-5e-324, 1.0)],
        # two neighbouring points each lie within tolerance of a chord through the other
        [(0.0, 0.0), (1.0, -1.0), (9.990664929456941e-115, -5.314742319570496e-92), (-1.0, 0.0)],
    ],
)
def test_tiny_offsets_keep_every_input_covered(points):
    pts = np.array(points, dtype=float)
    h = convex_hull(pts)
    assert len(set(h.tolist())) == len(h)
    assert np.all(hull_distance(pts[h], pts) <= 1e-9)
