import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilbert_lab import (
    ConvexSubset,
    Ellipsoid,
    Polytope,
    Simplex,
    check_asymptotic_faces,
    check_hull_hausdorff_bound,
    check_segment_hausdorff_bound,
    distance_to_subset,
    face_distance,
    geodesic_point,
    hausdorff_distance,
    hilbert_distance,
    simplex_distance_closed_form,
)
from hilbert_lab.checks import random_hull_fixture, random_segment_quadruples
from hilbert_lab.errors import FaceMismatch, NotInRelativeInterior, NotInterior
from hilbert_lab.groups import boost_matrix
from hilbert_lab.metric import check_segment_hausdorff_bounds
from hilbert_lab.projective import HomogeneousPoint as H

LOG3 = 0.5 * np.log(3.0)


def pt(x, y):
    return H([1.0, x, y])


# independent oracles


def ball_oracle(x, y):
    """Klein-model closed form: cosh d = (1 - <x,y>) / sqrt((1-|x|^2)(1-|y|^2))."""
    x, y = np.asarray(x), np.asarray(y)
    c = (1 - x @ y) / np.sqrt((1 - x @ x) * (1 - y @ y))
    return float(np.arccosh(max(c, 1.0)))


def polygon_facets(V):
    """Edge functionals (a, b, c) with a + b x + c y >= 0 inside, from polygon vertices."""
    V = np.asarray(V, dtype=float)
    c = V.mean(axis=0)
    V = V[np.argsort(np.arctan2(V[:, 1] - c[1], V[:, 0] - c[0]))]
    out = []
    for p, q in zip(V, np.roll(V, -1, axis=0)):
        n = np.array([p[1] - q[1], q[0] - p[0]])
        f = np.array([-n @ p, *n])
        out.append(f if f @ [1, *c] > 0 else -f)
    return np.array(out)


def polygon_oracle(F, x, y):
    fx, fy = F @ [1, *x], F @ [1, *y]
    r = np.log(fx) - np.log(fy)
    return float(0.5 * (r.max() - r.min()))


SQUARE_F = polygon_facets([[1, 1], [-1, 1], [-1, -1], [1, -1]])


# examples


def test_ball_distance_example(ball):
    assert hilbert_distance(ball, pt(0, 0), pt(0.5, 0)) == pytest.approx(0.5493061443340549, abs=1e-12)


def test_self_distance_zero(ball, square, triangle):
    assert hilbert_distance(ball, pt(0.2, 0.3), pt(0.2, 0.3)) == 0.0
    assert hilbert_distance(square, pt(0.2, 0.3), pt(0.2, 0.3)) == 0.0
    assert hilbert_distance(triangle, H([1, 2, 3]), H([1, 2, 3])) == 0.0


def test_simplex_distance_example(triangle):
    e2 = np.exp(2.0)
    assert hilbert_distance(triangle, H([1, 1, 1]), H([e2, 1, 1])) == pytest.approx(1.0, abs=1e-10)


def test_distance_needs_interior(ball):
    with pytest.raises(NotInterior):
        hilbert_distance(ball, pt(1, 0), pt(0, 0))


def test_klein_radial_distances(ball):
    for t in np.arange(1, 10) / 10:
        assert hilbert_distance(ball, pt(0, 0), pt(t, 0)) == pytest.approx(0.5 * np.log((1 + t) / (1 - t)), abs=1e-9)


def test_geodesic_endpoints(ball):
    x, y = pt(-0.3, 0.1), pt(0.6, -0.2)
    assert geodesic_point(ball, x, y, 0).isclose(x)
    assert geodesic_point(ball, x, y, 1).isclose(y)


def test_geodesic_ball_midpoint(ball):
    t = 0.8
    z = geodesic_point(ball, pt(0, 0), pt(t, 0), 0.5)
    u = np.tanh(0.5 * np.arctanh(t))
    assert z.isclose(pt(u, 0))


@pytest.mark.parametrize("name", ["ball", "square", "triangle"])
def test_geodesic_fractions(name, request):
    dom = request.getfixturevalue(name)
    rng = np.random.default_rng(3)
    x, y = dom.sample_interior(2, rng)
    d = hilbert_distance(dom, x, y)
    for s in (0.25, 0.5, 0.75):
        z = geodesic_point(dom, x, y, s)
        assert hilbert_distance(dom, x, z) / d == pytest.approx(s, abs=1e-8)
        assert hilbert_distance(dom, x, z) + hilbert_distance(dom, z, y) == pytest.approx(d, abs=1e-9)


def test_distance_to_subset_examples(ball, square):
    X = ConvexSubset(ball, [pt(-1, 0), pt(1, 0)])
    assert distance_to_subset(ball, pt(0.3, 0), X) == pytest.approx(0.0, abs=1e-6)
    assert distance_to_subset(ball, pt(0, 0.5), X) == pytest.approx(LOG3, abs=1e-6)
    Y = ConvexSubset(square, [pt(0, -1), pt(0, 1)])
    assert distance_to_subset(square, pt(0.5, 0), Y) == pytest.approx(LOG3, abs=1e-6)


def test_distance_to_subset_matches_brute_force(square):
    # grid oracle over the segment
    X = ConvexSubset(square, [pt(-0.4, -1), pt(0.7, 1)])
    p = (0.6, -0.5)
    grid = [polygon_oracle(SQUARE_F, p, (-0.4 + 1.1 * s, -1 + 2 * s)) for s in np.linspace(1e-4, 1 - 1e-4, 4001)]
    assert distance_to_subset(square, pt(*p), X) == pytest.approx(min(grid), abs=1e-5)


def test_hausdorff_examples(ball):
    A = [pt(0, 0), pt(0.3, 0.2)]
    assert hausdorff_distance(ball, A, A) == 0.0
    assert hausdorff_distance(ball, [pt(0, 0)], [pt(0.5, 0)]) == pytest.approx(np.log(3) / 2, abs=1e-12)


def test_simplex_closed_form_examples():
    S2, S3 = Simplex.standard(2), Simplex.standard(3)
    e = np.e
    assert simplex_distance_closed_form(S2, [1, 2, 3], [1, 2, 3]) == 0.0
    assert simplex_distance_closed_form(S2, [1, 1, 1], [e**2, 1, 1]) == pytest.approx(1.0, abs=1e-12)
    assert simplex_distance_closed_form(S3, [1, 1, 1, 1], [e**2, 1 / e, 1, 1]) == pytest.approx(1.5, abs=1e-12)
    assert hilbert_distance(S3, H([1, 1, 1, 1]), H([e**2, 1 / e, 1, 1])) == pytest.approx(1.5, abs=1e-8)
    with pytest.raises(NotInRelativeInterior):
        simplex_distance_closed_form(S2, [1, 0, 1], [1, 1, 1])


def test_face_distance_on_edge(square):
    assert face_distance(square, pt(1, 0), pt(1, 0.5)) == pytest.approx(LOG3, abs=1e-12)
    assert face_distance(square, pt(1, 1), pt(1, 1)) == 0.0
    with pytest.raises(FaceMismatch):
        face_distance(square, pt(1, 0), pt(0, 1))


def test_segment_bound_examples(square):
    c = check_segment_hausdorff_bound(square, pt(1, 0), pt(-1, 0), pt(1, 0), pt(-1, 0))
    assert c.lhs == pytest.approx(0.0, abs=1e-9) and c.rhs == 0.0 and c.ok
    c = check_segment_hausdorff_bound(square, pt(1, 0), pt(-1, 0), pt(1, 0.5), pt(-1, 0))
    assert c.rhs == pytest.approx(LOG3, abs=1e-12)
    assert c.lhs <= 0.5494 and c.ok


def test_segment_bound_face_mismatch(square):
    with pytest.raises(FaceMismatch):
        check_segment_hausdorff_bound(square, pt(1, 0), pt(-1, 0), pt(0, 1), pt(-1, 0))


def test_hull_bound_examples(square):
    qs = [pt(1, 0), pt(-1, 0.5), pt(0, -1)]
    c = check_hull_hausdorff_bound(square, qs, qs, pt(0, -0.1666666))
    assert c.lhs == pytest.approx(0.0, abs=1e-6) and c.ok
    ps = [pt(1, 0.4), pt(-1, 0.5), pt(0, -1)]
    c = check_hull_hausdorff_bound(square, qs, ps, pt(0, -0.1666666))
    assert c.ok and c.rhs == pytest.approx(face_distance(square, pt(1, 0), pt(1, 0.4)), abs=1e-12)


def test_hull_bound_reduces_to_segment(square):
    p1, p2, q1, q2 = pt(1, 0), pt(-1, 0.3), pt(1, 0.5), pt(-1, -0.2)
    seg = check_segment_hausdorff_bound(square, p1, p2, q1, q2)
    hull = check_hull_hausdorff_bound(square, [q1, q2], [p1, p2], geodesic_point(square, pt(0.99, 0.5), pt(-0.99, -0.2), 0.5))
    assert hull.rhs == pytest.approx(seg.rhs, abs=1e-12)
    assert abs(hull.lhs - seg.lhs) <= 5e-3


def test_asymptotic_faces_square(square):
    n = np.arange(2, 400)
    ps = [pt(1 - 1 / k, 0) for k in n]
    qs = [pt(1 - 1 / k, 0.3 * (1 - 1 / k)) for k in n]
    r = check_asymptotic_faces(square, ps, qs)
    assert r.face_equal and r.ok
    assert r.face_dist == pytest.approx(face_distance(square, pt(1, 0), pt(1, 0.3)), abs=1e-9)
    assert r.face_dist <= r.liminf_dist + 5e-3


def test_asymptotic_faces_identical(ball):
    ps = [pt(1 - 2.0**-k, 0) for k in range(1, 30)]
    r = check_asymptotic_faces(ball, ps, ps)
    assert r.face_equal and r.face_dist == 0.0 and r.liminf_dist == 0.0


def test_asymptotic_faces_ball_same_point(ball):
    ps = [pt(1 - 2.0**-k, 0) for k in range(2, 30)]
    qs = [pt(1 - 2.0**-k, 0.5 * 2.0**-k) for k in range(2, 30)]
    r = check_asymptotic_faces(ball, ps, qs)
    assert r.face_equal and r.face_dist == 0.0 and r.ok


def test_segment_suite_square_sample(square):
    quads = random_segment_quadruples(square, 60, np.random.default_rng(11))
    assert all(c.ok for c in check_segment_hausdorff_bounds(square, quads))


def test_hull_suite_square_sample(square):
    rng = np.random.default_rng(5)
    for _ in range(3):
        qs, ps, z = random_hull_fixture(square, 3, rng)
        assert check_hull_hausdorff_bound(square, qs, ps, z).ok


# properties

seeds = st.integers(0, 2**32 - 1)


@given(seeds)
def test_ball_matches_klein_oracle(seed):
    dom = Ellipsoid.ball(2)
    rng = np.random.default_rng(seed)
    x, y = dom.chart_coords(dom.sample_interior(2, rng))
    assert hilbert_distance(dom, pt(*x), pt(*y)) == pytest.approx(ball_oracle(x, y), rel=1e-9, abs=1e-9)


@given(seeds)
def test_polygon_matches_facet_oracle(seed):
    rng = np.random.default_rng(seed)
    ang = np.sort(rng.uniform(0, 2 * np.pi, 6))
    if np.max(np.diff(np.r_[ang, ang[0] + 2 * np.pi])) >= np.pi * 0.9:
        return
    V = np.c_[np.cos(ang), np.sin(ang)]
    dom = Polytope(np.c_[np.ones(6), V])
    F = polygon_facets(V)
    P, Q = dom.sample_interior(2, rng)
    x, y = P[1:] / P[0], Q[1:] / Q[0]
    assert hilbert_distance(dom, H(P), H(Q)) == pytest.approx(polygon_oracle(F, x, y), rel=1e-9, abs=1e-9)


@given(seeds)
def test_square_matches_facet_oracle(seed):
    dom = Polytope.square()
    rng = np.random.default_rng(seed)
    x, y = dom.chart_coords(dom.sample_interior(2, rng))
    assert hilbert_distance(dom, pt(*x), pt(*y)) == pytest.approx(polygon_oracle(SQUARE_F, x, y), rel=1e-9, abs=1e-9)


@given(seeds)
def test_triangle_inequality(seed):
    rng = np.random.default_rng(seed)
    for dom in (Ellipsoid.ball(2), Polytope.square(), Simplex.standard(2)):
        x, y, z = dom.sample_interior(3, rng)
        dxy, dyz, dxz = (hilbert_distance(dom, a, b) for a, b in ((x, y), (y, z), (x, z)))
        assert dxy + dyz - dxz >= -1e-8
        assert hilbert_distance(dom, y, x) == dxy


@given(seeds)
def test_simplex_closed_form_agrees(seed):
    rng = np.random.default_rng(seed)
    S = Simplex.standard(3)
    x, y = rng.uniform(0.05, 3, (2, 4))
    assert simplex_distance_closed_form(S, x, y) == pytest.approx(hilbert_distance(S, H(x), H(y)), abs=1e-8)


@given(seeds, st.floats(0.1, 3.0), st.floats(0, 2 * np.pi))
def test_isometry_invariance(seed, t, angle):
    dom = Ellipsoid.ball(2)
    g = boost_matrix(t, angle)
    rng = np.random.default_rng(seed)
    x, y = dom.sample_interior(2, rng)
    d = hilbert_distance(dom, x, y)
    assert hilbert_distance(dom, H(g @ x), H(g @ y)) == pytest.approx(d, abs=1e-8)
