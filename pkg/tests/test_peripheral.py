import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilbert_lab import (
    ConvexSubset,
    Ellipsoid,
    GeneratorSet,
    PeripheralFamily,
    SimplexCandidate,
    check_projection_observation,
    closest_point_projection,
    distance_to_subset,
    find_nearby_simplex,
    hilbert_distance,
    simplex_coarse_containment,
    strong_isolation_report,
    structure_constants_report,
)
from hilbert_lab.errors import BoundedSubset, ProjectionEscapes, TooFewTranslates
from hilbert_lab.groups import boost, boost_matrix
from hilbert_lab.projective import HomogeneousPoint as H

LOG3 = 0.5 * np.log(3.0)


def pt(x, y):
    return H([1.0, x, y])


def seg(dom, a, b):
    return ConvexSubset(dom, [pt(*a), pt(*b)])


@pytest.fixture(scope="module")
def crossing(ball):
    return PeripheralFamily([seg(ball, (-1, 0), (1, 0)), seg(ball, (0, -1), (0, 1))], GeneratorSet.trivial(ball), 0)


def parallel_family(square):
    X1 = seg(square, (-1, -0.2), (1, -0.2))
    X2 = seg(square, (-1, 0.2), (1, 0.2))
    return PeripheralFamily([X1, X2], GeneratorSet.trivial(square), 0)


def test_single_translate_is_too_few(ball):
    fam = PeripheralFamily([seg(ball, (-1, 0), (1, 0))], GeneratorSet.trivial(ball), 0)
    with pytest.raises(TooFewTranslates):
        strong_isolation_report(ball, fam, 0.5)


def test_family_members_need_ideal_points(ball):
    with pytest.raises(BoundedSubset):
        PeripheralFamily([seg(ball, (-0.5, 0), (0.5, 0))], GeneratorSet.trivial(ball), 0)


def test_crossing_diameters_isolated(ball, crossing):
    rep = strong_isolation_report(ball, crossing, 0.5, window=6.0)
    assert 0 < rep.D1_hat < 4
    assert rep.isolated_at_window_scale
    assert rep.D1_hat == max(rep.pair_diameters.values())


def test_crossing_diameter_matches_grid_oracle(ball, crossing):
    # points (s, 0) within 1.0 of the y-axis: d((s,0), y-axis) = d((s,0), origin)
    s = np.tanh(1.0)
    expected = 2 * 0.5 * np.log((1 + s) / (1 - s))
    rep = strong_isolation_report(ball, crossing, 0.5, window=6.0)
    # the sampled set undershoots by at most two sample spacings
    assert expected - 0.2 <= rep.D1_hat <= expected + 1e-9


def test_parallel_segments_saturate(square):
    fam = parallel_family(square)
    small = strong_isolation_report(square, fam, 0.5, window=3.0)
    large = strong_isolation_report(square, fam, 0.5, window=6.0)
    assert large.D1_hat > small.D1_hat + 1.0
    assert not large.isolated_at_window_scale


@given(st.floats(0.1, 0.6), st.floats(0.0, 0.5))
def test_isolation_monotone_in_r(r, extra):
    dom = Ellipsoid.ball(2)
    fam = PeripheralFamily([seg(dom, (-1, 0), (1, 0)), seg(dom, (-0.6, -0.8), (0.6, 0.8))], GeneratorSet.trivial(dom), 0)
    a = strong_isolation_report(dom, fam, r, window=4.0)
    b = strong_isolation_report(dom, fam, r + extra, window=4.0)
    for k, v in a.pair_diameters.items():
        assert b.pair_diameters[k] >= v - 1e-12


def test_isolation_invariant_under_isometry(ball, crossing):
    M = boost_matrix(0.7, 0.4)
    base = strong_isolation_report(ball, crossing, 0.5, window=6.0)
    moved = strong_isolation_report(ball, crossing.image(M), 0.5, window=6.0, basepoint=M @ ball.center)
    assert moved.D1_hat == pytest.approx(base.D1_hat, abs=5e-3)


def test_simplex_coarse_containment_examples(triangle, ball):
    corners = [H([1, 0, 0]), H([0, 1, 0]), H([0, 0, 1])]
    fam = PeripheralFamily([ConvexSubset(triangle, corners)], GeneratorSet.trivial(triangle), 0)
    radii, D2 = simplex_coarse_containment(triangle, fam, [corners])
    assert radii == [pytest.approx(0.0, abs=1e-6)] and D2 == pytest.approx(0.0, abs=1e-6)
    bfam = PeripheralFamily([seg(ball, (-1, 0), (1, 0))], GeneratorSet.trivial(ball), 0)
    assert simplex_coarse_containment(ball, bfam, []) == ([], 0.0)


def test_projection_examples(ball):
    X = seg(ball, (-1, 0), (1, 0))
    res = closest_point_projection(ball, X, pt(0.3, 0))
    assert res.value == pytest.approx(0.0, abs=1e-6) and res.minimizer.isclose(pt(0.3, 0), tol=1e-6)
    res = closest_point_projection(ball, X, pt(0, 0.5))
    assert res.value == pytest.approx(LOG3, abs=1e-6)
    assert ball.chart_coords([res.minimizer.coords])[0] == pytest.approx([0, 0], abs=1e-6)
    assert res.certificate >= -1e-6
    with pytest.raises(ProjectionEscapes):
        closest_point_projection(ball, X, pt(1, 0))


def test_projection_of_ideal_point_outside_axis_face(ball):
    X = seg(ball, (-1, 0), (1, 0))
    res = closest_point_projection(ball, X, pt(0, 1))
    assert ball.chart_coords([res.minimizer.coords])[0] == pytest.approx([0, 0], abs=1e-4)


def test_projection_observation(ball):
    X = seg(ball, (-1, 0), (1, 0))
    assert check_projection_observation(ball, X, pt(0.2, 0)).passed
    assert check_projection_observation(ball, X, pt(0, 0.5)).passed
    assert check_projection_observation(ball, X, pt(0.3, 0.5), boost(1.0)).passed


@given(st.integers(0, 2**32 - 1))
def test_projection_value_matches_distance(seed):
    dom = Ellipsoid.ball(2)
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(0, 2 * np.pi, 2)
    X = seg(dom, (np.cos(a), np.sin(a)), (np.cos(b), np.sin(b)))
    p = dom.sample_interior(1, rng)[0]
    res = closest_point_projection(dom, X, p)
    assert res.value == pytest.approx(distance_to_subset(dom, p, X), abs=1e-6)
    assert res.value == pytest.approx(hilbert_distance(dom, p, res.minimizer), abs=1e-6)


@given(st.integers(0, 2**32 - 1))
def test_projection_value_unique(seed):
    dom = Ellipsoid.ball(2)
    rng = np.random.default_rng(seed)
    X = ConvexSubset(dom, [pt(np.cos(t), np.sin(t)) for t in rng.uniform(0, 2 * np.pi, 3)])
    p = dom.sample_interior(1, rng)[0]
    r1 = closest_point_projection(dom, X, p)
    r2 = closest_point_projection(dom, X, H(2.0 * p))
    assert hilbert_distance(dom, r1.minimizer, r2.minimizer) <= 1e-5 or abs(r1.value - r2.value) <= 1e-6


def test_find_nearby_simplex_triangle(triangle):
    a, b = H([1, 0.01, 0]), H([0.01, 1, 0])
    S = find_nearby_simplex(triangle, ConvexSubset.whole_domain(triangle), a, b, H([1, 1, 1]), 0.5, 0.1)
    assert isinstance(S, SimplexCandidate)
    V = triangle.lift(list(S.vertices))
    for e in np.eye(3):
        assert min(np.linalg.norm(v - triangle.lift([e])[0]) for v in V) < 1e-9


def test_find_nearby_simplex_square_finds_nothing(square):
    # sides of a properly embedded triangle would lie in three edges, two of them opposite
    a, b = pt(1, -0.95), pt(1, 0.95)
    assert find_nearby_simplex(square, ConvexSubset.whole_domain(square), a, b, pt(0.5, 0), 0.3, 0.5) is None


def test_find_nearby_simplex_ball(ball):
    assert find_nearby_simplex(ball, ConvexSubset.whole_domain(ball), pt(1, 0), pt(1, 0), pt(0, 0), 0.5, 0.1) is None


def test_structure_single_axis_ball(ball):
    X = seg(ball, (-1, 0), (1, 0))
    fam = PeripheralFamily([X], GeneratorSet.trivial(ball), 0)
    rep = structure_constants_report(ball, ConvexSubset.whole_domain(ball), fam, samples=32)
    assert rep.face_disjoint and rep.R_hat == 0.0


def test_structure_schottky_face_disjoint(schottky, schottky_family):
    X = schottky_family.representatives[0]
    rep = structure_constants_report(schottky.domain, X, schottky_family, samples=8)
    assert rep.face_disjoint and rep.shared_faces == []


def test_structure_square_edge_asymptotic(square):
    X = seg(square, (1, 0), (-1, 0))
    fam = PeripheralFamily([X], GeneratorSet.trivial(square), 0)
    rep = structure_constants_report(square, ConvexSubset.whole_domain(square), fam, samples=64)
    assert rep.R_hat > 0
