from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilbert_lab import (
    ConvexSubset,
    GeneratorSet,
    PeripheralFamily,
    attracting_fixed_point,
    build_quotient,
    check_conditions,
    classify_point,
    equivalence_decide,
    ideal_boundary_sample,
)
from hilbert_lab.errors import EmptySample, NotIdealPoint
from hilbert_lab.groups import axis_of, enumerate_orbit, schottky_pso21
from hilbert_lab.projective import HomogeneousPoint as H
from hilbert_lab.quotient import CONICAL, PERIPHERAL, UNKNOWN, make_sample

ORIGIN = H([1.0, 0.0, 0.0])


def pt(x, y):
    return H([1.0, x, y])


def circle(theta):
    return pt(np.cos(theta), np.sin(theta))


@pytest.fixture(scope="module")
def schottky_quotient(schottky, schottky_family):
    pts = np.vstack([ideal_boundary_sample(t.subset, 2) for t in schottky_family.translates[:40]])
    sample = make_sample(schottky.domain, pts, schottky_family)
    return sample, build_quotient(sample, schottky_family)


def test_equivalence_examples(ball, schottky, schottky_family, commutator_axis):
    x = circle(0.3)
    assert equivalence_decide(ball, None, x, x)
    gp, gm = commutator_axis.lifts
    assert equivalence_decide(schottky.domain, schottky_family, gp, gm)
    assert not equivalence_decide(ball, None, circle(0.3), circle(2.0))


def test_equivalence_needs_ideal_points(ball):
    with pytest.raises(NotIdealPoint):
        equivalence_decide(ball, None, pt(0, 0), circle(1.0))


def test_discrete_quotient_without_family(ball):
    sample = make_sample(ball, [circle(t) for t in np.linspace(0, 6, 12)], None)
    q = build_quotient(sample, None)
    assert len(q) == 12 and q.class_of == list(range(12))


def test_square_edge_single_class(square):
    sample = make_sample(square, [pt(1, y) for y in np.linspace(-0.9, 0.9, 7)], None)
    assert len(build_quotient(sample, None)) == 1


def test_empty_sample(ball):
    with pytest.raises(EmptySample):
        make_sample(ball, [], None)


def test_axis_endpoints_share_class(schottky, schottky_family, commutator_axis):
    sample = make_sample(schottky.domain, [*commutator_axis.lifts, attracting_fixed_point(schottky.word_matrix("a"))[0]], schottky_family)
    q = build_quotient(sample, schottky_family)
    assert q.class_of[0] == q.class_of[1] != q.class_of[2]


def test_each_translate_one_class(schottky_quotient):
    sample, q = schottky_quotient
    for k in range(0, len(sample.points), 2):
        assert q.class_of[k] == q.class_of[k + 1]
    assert len(q) == len(sample.points) // 2
    assert not sample.conflicts


def test_quotient_numbering_deterministic(schottky_quotient, schottky_family):
    sample, q = schottky_quotient
    again = build_quotient(sample, schottky_family)
    assert again.class_of == q.class_of and again.adjacency == q.adjacency


def test_classification_examples(schottky, schottky_family, commutator_axis):
    dom = schottky.domain
    orbit = enumerate_orbit(schottky, ORIGIN, 6)
    assert classify_point(dom, schottky, schottky_family, commutator_axis.lifts[0], ORIGIN, orbit) == PERIPHERAL
    a_plus = attracting_fixed_point(schottky.word_matrix("a"))[0]
    assert classify_point(dom, schottky, schottky_family, a_plus, ORIGIN, orbit) == CONICAL


def test_shallow_orbit_is_unknown(ball):
    trivial = GeneratorSet.trivial(ball)
    assert classify_point(ball, trivial, None, circle(1.0), ORIGIN) == UNKNOWN


def test_peripheral_labels_are_equivariant(schottky, schottky_family, commutator_axis):
    dom = schottky.domain
    x = commutator_axis.lifts[0]
    for M in schottky.letter_matrices:
        assert classify_point(dom, schottky, schottky_family, M @ x, ORIGIN) == PERIPHERAL


def test_membership_takes_precedence(schottky, schottky_family, commutator_axis):
    x = commutator_axis.lifts[1]
    label = classify_point(schottky.domain, schottky, schottky_family, x, ORIGIN, membership=0)
    assert label == PERIPHERAL


def test_conditions_examples(ball, square):
    r = check_conditions(ball, ConvexSubset.whole_domain(ball), None, 0.5, 4.0, samples=24)
    assert r.cond1_ok and r.boundary_pairs == 0
    edge = PeripheralFamily([ConvexSubset(square, [pt(1, -1), pt(1, 1), pt(-1, 0)])], GeneratorSet.trivial(square), 0)
    C = ConvexSubset(square, [pt(1, -1), pt(1, 1), pt(-1, 0)])
    assert check_conditions(square, C, edge, 0.5, 4.0, samples=24).cond1_ok
    fam = PeripheralFamily(
        [ConvexSubset(ball, [pt(-1, 0), pt(1, 0)]), ConvexSubset(ball, [pt(0, -1), pt(0, 1)])], GeneratorSet.trivial(ball), 0
    )
    C = ConvexSubset(ball, [pt(-1, 0), pt(1, 0), pt(0, -1), pt(0, 1)])
    rep = check_conditions(ball, C, fam, 0.5, 4.0, samples=16)
    assert rep.cond2_ok and rep.cond2_max_diameter < 4


def test_square_without_family_fails_condition_one(square):
    r = check_conditions(square, ConvexSubset.whole_domain(square), None, 0.5, 4.0, samples=24)
    assert not r.cond1_ok and r.witnesses


@given(st.data())
def test_equivalence_symmetric(data):
    fam = _short_family()
    gens = fam.gens
    pts = np.vstack([ideal_boundary_sample(t.subset, 2) for t in fam.translates[:12]])
    pts = np.vstack([pts, gens.domain.lift([circle(t).coords for t in (0.1, 1.7, 4.0)])])
    i = data.draw(st.integers(0, len(pts) - 1))
    j = data.draw(st.integers(0, len(pts) - 1))
    dom = gens.domain
    assert equivalence_decide(dom, fam, pts[i], pts[j]) == equivalence_decide(dom, fam, pts[j], pts[i])
    if i == j:
        assert equivalence_decide(dom, fam, pts[i], pts[j])


@lru_cache(maxsize=None)
def _short_family():
    gens = schottky_pso21(2.0, np.pi / 2)
    return PeripheralFamily([axis_of(gens.domain, gens.word_matrix("abAB"))], gens, 3)


@given(st.integers(0, 63))
def test_member_points_never_conical(k):
    fam = _short_family()
    gens = fam.gens
    sample = make_sample(gens.domain, np.vstack([ideal_boundary_sample(t.subset, 2) for t in fam.translates]), fam)
    k %= len(sample.points)
    assert sample.family_membership[k] is not None
    label = classify_point(gens.domain, gens, fam, sample.points[k], ORIGIN, membership=sample.family_membership[k])
    assert label != CONICAL
