import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilbert_lab.errors import DegenerateConfiguration, HilbertLabError, KernelPoint, NotCollinear, NotConverged
from hilbert_lab.projective import (
    AffineChart,
    EndomorphismClass,
    HomogeneousPoint,
    ProjectiveMap,
    apply_endo,
    canonicalize,
    cross_ratio,
    limit_of_maps,
)

vectors = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=6).filter(
    lambda v: np.linalg.norm(v) > 1e-3
)


def line_points(ts):
    """Points (1, t) of the standard chart of P(R^2), lifted to P(R^3) on a line."""
    return [HomogeneousPoint([1.0, t, 0.5 * t]) for t in ts]


def test_cross_ratio_of_0123_is_4():
    a, x, y, b = line_points([0, 1, 2, 3])
    assert cross_ratio(a, x, y, b) == pytest.approx(4.0, rel=1e-12)


def test_cross_ratio_repeated_point_is_1():
    a, x, _, b = line_points([0, 1, 2, 3])
    assert cross_ratio(a, x, x, b) == pytest.approx(1.0, rel=1e-12)


def test_cross_ratio_invariant_under_map():
    rng = np.random.default_rng(3)
    g = ProjectiveMap(rng.normal(size=(3, 3)) + 3 * np.eye(3))
    pts = [g(p) for p in line_points([0, 1, 2, 3])]
    assert cross_ratio(*pts) == pytest.approx(4.0, abs=1e-10)


def test_cross_ratio_errors():
    a, x, y, b = line_points([0, 1, 2, 3])
    with pytest.raises(NotCollinear):
        cross_ratio(a, x, HomogeneousPoint([0, 0, 1]), b)
    with pytest.raises(DegenerateConfiguration):
        cross_ratio(a, a, y, b)


@given(st.integers(0, 2**32 - 1))
def test_cross_ratio_invariance_property(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(3, 6))
    p, q = rng.normal(size=(2, d))
    ts = np.sort(rng.uniform(-2, 2, 4))
    if np.min(np.diff(ts)) < 1e-2:
        return
    pts = [HomogeneousPoint(p + t * q) for t in ts]
    g = ProjectiveMap(rng.normal(size=(d, d)) + 2 * d * np.eye(d))
    before = cross_ratio(*pts)
    after = cross_ratio(*[g(x) for x in pts])
    assert abs(after - before) <= 1e-9 * before


@given(vectors)
def test_canonicalize_idempotent(v):
    c = canonicalize(v)
    assert np.array_equal(canonicalize(c), c)
    assert abs(np.linalg.norm(c) - 1) < 1e-12
    lead = c[np.flatnonzero(np.abs(c) > 1e-9)[0]]
    assert lead > 0


def test_zero_vector_rejected():
    with pytest.raises(HilbertLabError):
        HomogeneousPoint([0, 0, 0])


def test_point_equality_is_projective():
    assert HomogeneousPoint([1, 2, 3]) == HomogeneousPoint([-2, -4, -6])
    assert HomogeneousPoint([1, 2, 3]) != HomogeneousPoint([1, 2, 3.1])


def test_projective_map_requires_invertible():
    with pytest.raises(HilbertLabError):
        ProjectiveMap(np.diag([1.0, 1.0, 0.0]))


def test_limit_of_hyperbolic_diagonal():
    seq = [np.diag([np.e**n, 1.0, np.e**-n]) for n in range(1, 41)]
    T = limit_of_maps(seq)
    assert T.rank == 1
    assert np.allclose(T.matrix, np.diag([1.0, 0, 0]), atol=1e-12)


def test_limit_of_constant_sequence_is_itself():
    g = np.array([[2.0, 1, 0], [0, 1, 0], [0, 0, 3]])
    T = limit_of_maps([g] * 5)
    assert T.rank == 3
    assert np.allclose(T.matrix, canonicalize(g))


def test_limit_of_rank_two_diagonal():
    seq = [np.diag([np.e**n, np.e**n, 1.0]) for n in range(1, 41)]
    T = limit_of_maps(seq)
    assert T.rank == 2
    assert np.allclose(T.matrix, np.diag([1, 1, 0]) / np.sqrt(2), atol=1e-12)


def test_limit_requires_cauchy_tail():
    with pytest.raises(NotConverged):
        limit_of_maps([np.diag([1.0, n, 1.0]) for n in range(1, 5)])


def test_apply_endo_examples():
    T = EndomorphismClass(np.diag([1.0, 0, 0]))
    assert apply_endo(T, HomogeneousPoint([1, 0.3, 0.3])) == HomogeneousPoint([1, 0, 0])
    p = HomogeneousPoint([0.2, 0.5, 1.0])
    assert apply_endo(EndomorphismClass(np.eye(3)), p) == p
    with pytest.raises(KernelPoint):
        apply_endo(T, HomogeneousPoint([0, 1, 0]))


def test_limit_agrees_with_pointwise_limits():
    seq = [np.diag([np.e**n, 1.0, np.e**-n]) for n in range(1, 41)]
    T = limit_of_maps(seq)
    rng = np.random.default_rng(1)
    for v in rng.normal(size=(20, 3)):
        target = apply_endo(T, v).coords
        errs = [min(np.linalg.norm(canonicalize(g @ v) - target), np.linalg.norm(canonicalize(g @ v) + target)) for g in seq]
        tail = errs[5:]
        assert all(b <= a + 1e-15 for a, b in zip(tail, tail[1:]))
        assert errs[-1] < 1e-15 * 1e3


def test_affine_chart_roundtrip():
    ch = AffineChart([1.0, 0.0, 0.0])
    y = np.array([0.3, -0.2])
    assert np.allclose(ch.coords(ch.from_coords(y)), y)
