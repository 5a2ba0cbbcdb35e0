"""Finite-sample boundary quotients: identify ideal points sharing a face or a family face.

Two ideal points are equivalent when they lie in the same open face, or
when both lie in faces met by the ideal boundary of a single family
translate. The quotient of a finite sample is the union-find closure of
that relation; classes are labelled Peripheral, Conical or Unknown.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .config import settings, tolerances
from .domain import ConvexDomain, ConvexSubset, _vec, face_labels, ideal_boundary_sample, segment_in_boundary
from .errors import EmptySample, EmptySubset, NotIdealPoint, OutsidePoint, TooFewSamples
from .groups import GeneratorSet, OrbitResult, enumerate_orbit
from .metric import pair_distances, ray_points
from .peripheral import PeripheralFamily, _diameter, _distance_to_translate, _window_samples

CONICAL = "Conical"
PERIPHERAL = "Peripheral"
UNKNOWN = "Unknown"


@dataclass
class BoundarySample:
    domain: ConvexDomain
    points: np.ndarray  # chart lifts of ideal points
    labels: list  # face labels, comparable within this sample
    family_membership: list  # translate index or None per point
    conflicts: list = field(default_factory=list)  # points whose face meets several translates

    def __len__(self):
        return len(self.points)


def _translate_ideal_points(family: PeripheralFamily | None, per_translate: int = 8):
    pts, owner = [], []
    if family is None:
        return np.zeros((0, 0)), []
    for k, t in enumerate(family.translates):
        P = ideal_boundary_sample(t.subset, per_translate)
        pts.extend(P)
        owner.extend([k] * len(P))
    return (np.array(pts) if pts else None), owner


def _label_with_family(dom, points, family):
    """Face labels of ``points`` and the translate (if any) whose ideal faces contain each point."""
    tpts, owner = _translate_ideal_points(family)
    rows = np.asarray(points, dtype=float)
    allpts = np.vstack([rows, tpts]) if tpts is not None and len(owner) else rows
    labels = face_labels(dom, allpts)
    own, tl = labels[: len(rows)], labels[len(rows) :]
    face_owner = {}
    for lab, k in zip(tl, owner):
        face_owner.setdefault(lab, [])
        if k not in face_owner[lab]:
            face_owner[lab].append(k)
    membership, conflicts = [], []
    for i, lab in enumerate(own):
        ks = face_owner.get(lab, [])
        membership.append(ks[0] if ks else None)
        if len(ks) > 1:
            conflicts.append(i)
    return own, membership, conflicts


def boundary_sample(dom: ConvexDomain, C: ConvexSubset, family: PeripheralFamily | None, n: int = 64, extra=()) -> BoundarySample:
    """Sample ideal points of C (plus ``extra`` ideal points) and record face and family data."""
    pts = ideal_boundary_sample(C, n)
    if len(extra):
        pts = np.vstack([pts, dom.lift([_vec(p) for p in extra])])
    return make_sample(dom, pts, family)


def make_sample(dom: ConvexDomain, points, family: PeripheralFamily | None) -> BoundarySample:
    L = dom.lift([_vec(p) for p in points]) if len(points) else np.zeros((0, dom.dim))
    if len(L) == 0:
        raise EmptySample("no sample points")
    if np.any(dom.classify_many(L) != 1):
        raise NotIdealPoint("sample points must lie on the boundary")
    labels, membership, conflicts = _label_with_family(dom, L, family)
    return BoundarySample(dom, L, labels, membership, conflicts)


def equivalence_decide(dom: ConvexDomain, family: PeripheralFamily | None, x, y) -> bool:
    """x ~ y iff they share an open face or both lie in faces of the ideal boundary of one translate."""
    L = dom.lift([_vec(x), _vec(y)])
    if np.any(dom.classify_many(L) != 1):
        raise NotIdealPoint("equivalence is only defined on ideal points")
    labels, membership, _ = _label_with_family(dom, L, family)
    if labels[0] == labels[1]:
        return True
    return membership[0] is not None and membership[0] == membership[1]


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        a, b = self.find(i), self.find(j)
        if a != b:
            # smaller root wins, which keeps class numbering independent of merge order
            self.parent[max(a, b)] = min(a, b)


@dataclass
class QuotientComplex:
    sample: BoundarySample
    class_of: list  # class number per sample point
    classes: list  # sample indices per class (numbered by first member)
    class_labels: list
    class_translates: list  # translate index or None per class
    adjacency: list  # (class, class) edges

    def __len__(self):
        return len(self.classes)


def build_quotient(sample: BoundarySample, family: PeripheralFamily | None, gens: GeneratorSet | None = None, p0=None, classify: bool = False) -> QuotientComplex:
    """Union-find closure of the face/family equivalence on a boundary sample."""
    n = len(sample)
    if n == 0:
        raise EmptySample("no sample points")
    uf = _UnionFind(n)
    first_label, first_member = {}, {}
    for i, (lab, mem) in enumerate(zip(sample.labels, sample.family_membership)):
        j = first_label.setdefault(lab, i)
        uf.union(i, j)
        if mem is not None:
            uf.union(i, first_member.setdefault(mem, i))
    roots = [uf.find(i) for i in range(n)]
    numbering = {}
    for r in roots:
        numbering.setdefault(r, len(numbering))
    class_of = [numbering[r] for r in roots]
    classes = [[] for _ in numbering]
    for i, c in enumerate(class_of):
        classes[c].append(i)
    translates = []
    for members in classes:
        mem = [sample.family_membership[i] for i in members if sample.family_membership[i] is not None]
        translates.append(mem[0] if mem else None)
    labels = []
    orbit = None
    for c, members in enumerate(classes):
        if translates[c] is not None:
            labels.append(PERIPHERAL)
        elif classify and gens is not None:
            if orbit is None:
                base = gens.domain.center if p0 is None else p0
                orbit = family.orbit if family is not None and p0 is None else enumerate_orbit(gens, base, settings().word_cap // 2)
            labels.append(classify_point(sample.domain, gens, family, sample.points[members[0]], orbit.basepoint, orbit=orbit, membership=None))
        else:
            labels.append(UNKNOWN)
    reps = sample.domain.chart.coords(sample.points[[m[0] for m in classes]])
    adj = []
    delta = tolerances().adj
    for a, b in itertools.combinations(range(len(classes)), 2):
        if np.linalg.norm(reps[a] - reps[b]) < delta:
            adj.append((a, b))
    return QuotientComplex(sample, class_of, classes, labels, translates, adj)


def recurrence_radius(gens: GeneratorSet, p0) -> float:
    """Threshold R_rec: twice the covering-radius estimate, taken as half the largest generator displacement at p0."""
    dom = gens.domain
    P0 = dom.lift([_vec(p0)])[0]
    if len(gens.letter_matrices) == 0:
        return 0.0
    imgs = dom.lift(gens.letter_matrices @ P0)
    covering = 0.5 * pair_distances(dom, P0[None], imgs).max()
    return float(2.0 * covering)


def ray_recurrence(gens: GeneratorSet, x, p0, orbit: OrbitResult):
    """Distances from the grid points of the ray [p0, x) to the enumerated orbit of p0."""
    dom = gens.domain
    P0 = dom.lift([_vec(p0)])[0]
    X = dom.lift([_vec(x)])[0]
    cfg = settings()
    depths = np.linspace(cfg.conical_depth / cfg.conical_grid, cfg.conical_depth, cfg.conical_grid)
    R = ray_points(dom, P0, X - P0, depths)
    O = orbit.orbit_points[dom.strictly_inside(orbit.orbit_points)]
    D = pair_distances(dom, np.repeat(R, len(O), axis=0), np.tile(O, (len(R), 1))).reshape(len(R), len(O))
    return depths, D.min(axis=1)


def classify_point(dom: ConvexDomain, gens: GeneratorSet, family: PeripheralFamily | None, x, p0, orbit: OrbitResult | None = None, membership="auto") -> str:
    """Peripheral if x lies in a face of a translate's ideal boundary, else Conical when the ray
    [p0, x) stays within R_rec of the orbit of p0 along the grid, else Unknown."""
    X = dom.lift([_vec(x)])[0]
    if dom.classify_many([X])[0] != 1:
        raise NotIdealPoint("classification is only defined on ideal points")
    if membership == "auto":
        _, mem, _ = _label_with_family(dom, X[None], family)
        membership = mem[0]
    if membership is not None:
        return PERIPHERAL
    if orbit is None:
        orbit = enumerate_orbit(gens, p0, settings().word_cap // 2)
    if len(orbit) <= 1:
        return UNKNOWN
    _, mins = ray_recurrence(gens, X, p0, orbit)
    return CONICAL if float(mins.max()) <= recurrence_radius(gens, p0) else UNKNOWN


@dataclass
class ConditionsReport:
    cond1_ok: bool
    cond2_ok: bool
    witnesses: list
    pairs_checked: int
    boundary_pairs: int
    cond2_max_diameter: float


def _class_hull(dom, sample, q, c, family):
    """The convex set C_x attached to class c: the family translate, or the hull of the class samples."""
    if q.class_translates[c] is not None and family is not None:
        return family.translates[q.class_translates[c]].subset
    pts = sample.points[q.classes[c]]
    try:
        return ConvexSubset(dom, list(pts))
    except (EmptySubset, OutsidePoint):
        return None


def check_conditions(dom: ConvexDomain, C: ConvexSubset, family: PeripheralFamily | None, r: float, D: float, samples: int = 64, window=None) -> ConditionsReport:
    """Condition (1): boundary segments join equivalent points. Condition (2): hulls of
    inequivalent classes have r-neighbourhoods meeting in diameter < D (window-relative)."""
    window = settings().window if window is None else float(window)
    sample = boundary_sample(dom, C, family, samples)
    if len(sample) < 2:
        raise TooFewSamples("need at least two ideal points")
    q = build_quotient(sample, family)
    witnesses = []
    boundary_pairs = 0
    n = len(sample)
    for i, j in itertools.combinations(range(n), 2):
        if dom.strictly_convex:
            break
        if segment_in_boundary(dom, sample.points[i], sample.points[j]):
            boundary_pairs += 1
            if q.class_of[i] != q.class_of[j]:
                witnesses.append({"condition": 1, "points": [i, j]})
    cond1 = not any(w["condition"] == 1 for w in witnesses)
    P0 = dom.center
    hulls = [_class_hull(dom, sample, q, c, family) for c in range(len(q))]
    worst = 0.0
    for a, b in itertools.combinations(range(len(q)), 2):
        Ha, Hb = hulls[a], hulls[b]
        if Ha is None or Hb is None:
            continue
        for H1, H2 in ((Ha, Hb), (Hb, Ha)):
            S, _, _ = _window_samples(dom, H1, P0, window, settings().segment_samples)
            if len(S) == 0:
                continue
            close = _distance_to_translate(dom, S, H2) < 2 * r
            if close.any():
                dmt = _diameter(dom, S[close])
                worst = max(worst, dmt)
                if dmt >= D:
                    witnesses.append({"condition": 2, "classes": [a, b], "diameter": dmt})
    cond2 = not any(w["condition"] == 2 for w in witnesses)
    return ConditionsReport(cond1, cond2, witnesses, n * (n - 1) // 2, boundary_pairs, worst)
