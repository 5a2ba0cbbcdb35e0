"""Candidate peripheral families: translates, isolation estimates, projections and simplex search.

Every "unbounded" statement here is relative to a sampling window, the
Hilbert ball of radius ``settings().window`` about a basepoint; reports carry
the window so that numbers from different scales are not compared blindly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .config import settings, tolerances
from .domain import (
    ConvexDomain,
    ConvexSubset,
    Membership,
    SimplexCandidate,
    _vec,
    cluster_ids,
    detect_properly_embedded_simplex,
    face_labels,
    ideal_boundary_sample,
)
from .errors import (
    BoundedSubset,
    EmptySubset,
    FaceMismatch,
    NotProperlyEmbedded,
    OutsidePoint,
    ProjectionEscapes,
    TooFewSamples,
    TooFewTranslates,
)
from .groups import GeneratorSet, enumerate_orbit
from .metric import (
    _segment_min,
    distances_to_subset,
    face_distance,
    hull_samples,
    nearest_point,
    pair_distances,
    ray_points,
    segment_samples,
)
from .projective import HomogeneousPoint


@dataclass
class Translate:
    subset: ConvexSubset
    word: str
    representative: int
    key: frozenset


class PeripheralFamily:
    """Representatives X_1..X_m and their translates by group words up to a length."""

    def __init__(self, representatives, gens: GeneratorSet, translate_word_len: int, basepoint=None):
        self.representatives = list(representatives)
        self.gens = gens
        self.translate_word_len = int(translate_word_len)
        dom = gens.domain
        self.basepoint = HomogeneousPoint(dom.center if basepoint is None else _vec(basepoint))
        for X in self.representatives:
            if X.whole or not np.any(dom.classify_many(X.lifts) == 1):
                raise BoundedSubset("family members must have ideal points")
        self.orbit = enumerate_orbit(gens, self.basepoint, self.translate_word_len)
        self.translates = self._translates()

    @property
    def domain(self) -> ConvexDomain:
        return self.gens.domain

    def _translates(self):
        dom = self.domain
        rows, owner, ideal = [], [], []
        for k, M in enumerate(self.orbit.matrices):
            for j, X in enumerate(self.representatives):
                codes = dom.classify_many(X.lifts)
                for g, code in zip(X.lifts, codes):
                    rows.append(M @ g)
                    owner.append((k, j))
                    ideal.append(code == 1)
        L = dom.lift(np.array(rows))
        # long words amplify rounding transversally to the boundary; put ideal points back on it
        ideal = np.array(ideal)
        if ideal.any():
            L[ideal] = dom.radial_boundary(L[ideal])
        ids = cluster_ids(dom.chart.coords(L), tolerances().limit_merge)
        groups = {}
        for (k, j), pid in zip(owner, ids):
            groups.setdefault((k, j), set()).add(int(pid))
        out, seen = [], set()
        self.unresolved = 0
        pos = 0
        for k, M in enumerate(self.orbit.matrices):
            for j, X in enumerate(self.representatives):
                key = frozenset(groups[(k, j)])
                n = len(X.lifts)
                if key not in seen:
                    seen.add(key)
                    gens = L[pos : pos + n]
                    try:
                        sub = ConvexSubset(dom, [HomogeneousPoint(p) for p in gens])
                    except (EmptySubset, OutsidePoint):
                        # generators collapsed below double precision
                        self.unresolved += 1
                    else:
                        out.append(Translate(sub, self.orbit.elements[k].word, j, key))
                pos += n
        return out

    def image(self, matrix) -> "PeripheralFamily":
        """The family generated by the images of the representatives under ``matrix``."""
        return PeripheralFamily([X.image(matrix) for X in self.representatives], self.gens, self.translate_word_len, self.basepoint)

    def __len__(self):
        return len(self.translates)

    def __repr__(self):
        return f"PeripheralFamily({len(self.representatives)} representatives, {len(self)} translates)"


@dataclass
class IsolationReport:
    r: float
    window: float
    pair_diameters: dict
    D1_hat: float
    saturated_pairs: list
    translates_in_window: int
    D2_hat: float | None = None
    L_hat: float | None = None
    R_hat: float | None = None

    @property
    def isolated_at_window_scale(self) -> bool:
        return not self.saturated_pairs


def _window_samples(dom, X: ConvexSubset, P0, window, n):
    """Samples of X in the Hilbert ball of radius ``window`` about P0.

    Returns (samples, their depths from P0, spacing), where ``spacing`` bounds
    the Hilbert gap between consecutive segment samples (inf for hulls).
    """
    if X.size == 2:
        reach, x0 = nearest_point(dom, P0, X)
        span = window + reach
        half = max(2, n // 2)
        steps = np.linspace(0.0, span, half)
        parts = []
        for end in X.lifts:
            if np.linalg.norm(end - x0) <= 1e-15:
                continue
            parts.append(ray_points(dom, x0, end - x0, steps))
        S = np.vstack(parts) if parts else x0[None]
        spacing = span / (half - 1)
    else:
        S = hull_samples(dom, X.lifts, n)
        spacing = np.inf
    S = S[dom.strictly_inside(S)]
    depth = pair_distances(dom, P0[None], S)
    keep = depth < window
    return S[keep], depth[keep], spacing


def hilbert_reach(dom, P0, X: ConvexSubset) -> float:
    """d(P0, X) (finite since X meets the domain)."""
    return float(nearest_point(dom, P0, X)[0])


def _diameter(dom, S):
    if len(S) < 2:
        return 0.0
    n = len(S)
    i, j = np.triu_indices(n, 1)
    return float(pair_distances(dom, S[i], S[j]).max())


def _distance_to_translate(dom, S, X: ConvexSubset):
    if len(S) == 0:
        return np.zeros(0)
    if X.size == 2:
        return _segment_min(dom, S, X.lifts[0][None], X.lifts[1][None])[0]
    return distances_to_subset(dom, S, X)


def translates_in_window(dom, family: PeripheralFamily, P0, window):
    """Translates at Hilbert distance < window from P0 (segments are tested in one batch)."""
    reach = np.empty(len(family.translates))
    seg = [i for i, t in enumerate(family.translates) if t.subset.size == 2]
    if seg:
        A = np.array([family.translates[i].subset.lifts[0] for i in seg])
        B = np.array([family.translates[i].subset.lifts[1] for i in seg])
        reach[seg] = _segment_min(dom, P0[None], A, B)[0]
    for i, t in enumerate(family.translates):
        if t.subset.size != 2:
            reach[i] = hilbert_reach(dom, P0, t.subset)
    return [t for t, d in zip(family.translates, reach) if d < window]


def strong_isolation_report(dom: ConvexDomain, family: PeripheralFamily, r: float, window=None, basepoint=None, samples=None) -> IsolationReport:
    """Window-relative estimate of diam(N(X1, r) & N(X2, r)) over pairs of distinct translates.

    For each ordered pair the points of X1 (sampled in the window) within 2r
    of X2 are kept and their diameter reported; ``D1_hat`` is the maximum.
    Pairs whose kept set reaches the window edge are listed as saturated: the
    window, not the geometry, bounds their diameter.
    """
    window = settings().window if window is None else float(window)
    n = settings().segment_samples if samples is None else samples
    P0 = dom.lift([_vec(family.basepoint if basepoint is None else basepoint)])[0]
    near = translates_in_window(dom, family, P0, window)
    if len(near) < 2:
        raise TooFewTranslates(f"{len(near)} translate(s) meet the window of radius {window}")
    data = [_window_samples(dom, t.subset, P0, window, n) for t in near]
    coarse_every = 8
    segs = all(t.subset.size == 2 for t in near)
    diam, saturated = {}, []
    for a in range(len(near)):
        S, depth, spacing = data[a]
        others = [b for b in range(len(near)) if b != a]
        for b in others:
            diam.setdefault((min(a, b), max(a, b)), 0.0)
        if len(S) == 0:
            continue
        if segs and np.isfinite(spacing):
            # exact-safe prefilter, batched over all other translates:
            # d(., X2) is 1-Lipschitz along X1
            coarse = S[::coarse_every]
            k = len(coarse)
            A = np.repeat(np.array([near[b].subset.lifts[0] for b in others]), k, axis=0)
            B = np.repeat(np.array([near[b].subset.lifts[1] for b in others]), k, axis=0)
            d = _segment_min(dom, np.tile(coarse, (len(others), 1)), A, B)[0].reshape(len(others), k)
            others = [b for b, row in zip(others, d) if row.min() < 2 * r + coarse_every * spacing]
        for b in others:
            key = (min(a, b), max(a, b))
            close = _distance_to_translate(dom, S, near[b].subset) < 2 * r
            if not close.any():
                continue
            diam[key] = max(diam[key], _diameter(dom, S[close]))
            edge = window - (spacing if np.isfinite(spacing) else 0.5)
            if depth[close].max() >= edge and key not in saturated:
                saturated.append(key)
    pair_diameters = {(near[i].word, near[i].representative, near[j].word, near[j].representative): v for (i, j), v in sorted(diam.items())}
    D1 = max(diam.values()) if diam else 0.0
    return IsolationReport(float(r), window, pair_diameters, float(D1), sorted(saturated), len(near))


def simplex_coarse_containment(dom: ConvexDomain, family: PeripheralFamily, simplices, window=None, basepoint=None, samples=400):
    """(per-simplex radii, D2_hat): how far each properly embedded simplex strays from the nearest translate."""
    window = settings().window if window is None else float(window)
    P0 = dom.lift([_vec(family.basepoint if basepoint is None else basepoint)])[0]
    radii = []
    near = [t.subset for t in translates_in_window(dom, family, P0, window)] or [t.subset for t in family.translates]
    for S in simplices:
        verts = S.vertices if isinstance(S, SimplexCandidate) else S
        if detect_properly_embedded_simplex(dom, verts) is None:
            raise NotProperlyEmbedded("simplex is not properly embedded")
        L = dom.lift(list(verts))
        pts = hull_samples(dom, L, samples)
        pts = pts[dom.strictly_inside(pts)]
        pts = pts[pair_distances(dom, P0[None], pts) < window]
        if len(pts) == 0:
            radii.append(0.0)
            continue
        radii.append(float(min(_distance_to_translate(dom, pts, X).max() for X in near)))
    return radii, (max(radii) if radii else 0.0)


# --------------------------------------------------------------------------
# closest-point projection


@dataclass
class ProjectionResult:
    minimizer: HomogeneousPoint
    value: float
    certificate: float
    ray_depths: list = field(default_factory=list)


def closest_point_projection(dom: ConvexDomain, X: ConvexSubset, p, samples: int = 200) -> ProjectionResult:
    """Nearest point of X to p; for ideal p, the limit of projections of a ray toward p.

    ``certificate`` is, for interior p, the smallest excess d(p, s) - value over
    sampled s in X (nonnegative up to the optimizer accuracy); for ideal p it is
    the drift D(8) - D(4) of projection depths along the ray.
    """
    if X is None or (not X.whole and X.size == 0):
        raise EmptySubset("X is empty")
    P = dom.lift([_vec(p)])[0]
    m = dom.contains(P)
    if m is Membership.OUTSIDE:
        raise OutsidePoint("p lies outside the closed domain")
    if m is Membership.INTERIOR:
        val, pt = nearest_point(dom, P, X)
        if X.whole:
            return ProjectionResult(HomogeneousPoint(P), 0.0, 0.0)
        S = hull_samples(dom, X.lifts, samples) if X.size > 1 else X.lifts
        S = S[dom.strictly_inside(S)]
        cert = float((pair_distances(dom, P[None], S) - val).min()) if len(S) else 0.0
        return ProjectionResult(HomogeneousPoint(pt), float(val), cert)
    # ideal point: follow the ray from the basepoint of X toward p
    B = dom.lift([X.interior_basepoint.coords])[0]
    depths = np.arange(1, settings().ray_depths + 1, dtype=float)
    R = ray_points(dom, B, P - B, depths)
    proj = [nearest_point(dom, r, X)[1] for r in R]
    D = pair_distances(dom, np.repeat(B[None], len(proj), axis=0), np.array(proj))
    k4 = min(3, len(D) - 1)
    drift = float(D[-1] - D[k4])
    if drift > 2.0:
        raise ProjectionEscapes(f"ray projections drift by {drift:.3g} between depths 4 and 8")
    return ProjectionResult(HomogeneousPoint(proj[-1]), float("inf"), drift, D.tolist())


@dataclass
class ProjectionObservation:
    subsegment_ok: bool
    subsegment_defect: float
    equivariance_ok: bool
    equivariance_defect: float

    @property
    def passed(self) -> bool:
        return self.subsegment_ok and self.equivariance_ok


def check_projection_observation(dom: ConvexDomain, X: ConvexSubset, p, gens: GeneratorSet | None = None) -> ProjectionObservation:
    """Points of [pi(p), p] project to pi(p) at the right distance; projection commutes with generators."""
    opt = tolerances().opt
    res = closest_point_projection(dom, X, p)
    P = dom.lift([_vec(p)])[0]
    x = dom.lift([res.minimizer.coords])[0]
    sub = 0.0
    if res.value > 0:
        for s in (1 / 6, 2 / 6, 3 / 6, 4 / 6, 5 / 6):
            q = x + s * (P - x)
            sub = max(sub, abs(nearest_point(dom, q, X)[0] - pair_distances(dom, q[None], x[None])[0]))
    eq = 0.0
    if gens is not None:
        for M in gens.letter_matrices:
            gx = dom.lift([M @ x])[0]
            other = closest_point_projection(dom, X.image(M), M @ P)
            eq = max(eq, float(pair_distances(dom, gx[None], dom.lift([other.minimizer.coords]))[0]))
    return ProjectionObservation(bool(sub <= opt), sub, bool(eq <= 10 * opt), eq)


# --------------------------------------------------------------------------
# simplex search and structure constants


def find_nearby_simplex(dom: ConvexDomain, C: ConvexSubset, a, b, q, r: float, eps: float, directions: int = 24):
    """Search small candidate pools for a properly embedded 2-simplex near the slice through a, b, q.

    Candidates: a, b, the extreme points of their common face, the boundary
    point hit by the ray from the midpoint of [a, b] through q and the
    extreme points of its face, and the ideal generators of C. A triple is
    returned when it spans a properly embedded simplex S and the slice
    P(Span{a, b, q}) & B(q, r) lies in the eps-neighbourhood of S. ``None``
    means nothing was found, not that nothing exists.
    """
    fa, fb = dom.face_of(a), dom.face_of(b)
    if fa != fb:
        raise FaceMismatch("a and b must share an open face")
    if fa.kind == "point" or fa.kind == "domain":
        return None
    A, B, Q = dom.lift([_vec(a), _vec(b), _vec(q)])
    pool = [A, B, *dom.face_extremes(fa)]
    M = 0.5 * (A + B)
    _, hi = dom.chord(M[None], (Q - M)[None])
    exit_pt = M + hi[0] * (Q - M)
    pool.append(exit_pt)
    pool.extend(dom.face_extremes(dom.face_of(exit_pt)))
    if not C.whole:
        pool.extend(C.lifts[dom.classify_many(C.lifts) == 1])
    uniq = []
    for v in pool:
        if not any(np.linalg.norm(v - u) <= 1e-9 for u in uniq):
            uniq.append(v)
    # slice samples: in-plane rays from q up to Hilbert radius r
    plane = np.linalg.svd(np.stack([A - Q, B - Q]), full_matrices=False)[2][:2]
    slice_pts = [Q]
    for th in np.linspace(0, 2 * np.pi, directions, endpoint=False):
        Dv = np.cos(th) * plane[0] + np.sin(th) * plane[1]
        slice_pts.extend(ray_points(dom, Q, Dv, np.linspace(r / 4, r, 4)))
    slice_pts = np.array(slice_pts)
    for tri in itertools.combinations(range(len(uniq)), 3):
        verts = [uniq[i] for i in tri]
        try:
            S = detect_properly_embedded_simplex(dom, verts)
        except Exception:
            continue
        if S is None:
            continue
        hull = ConvexSubset(dom, [HomogeneousPoint(v) for v in verts])
        if np.all(distances_to_subset(dom, slice_pts, hull) <= eps):
            return S
    return None


@dataclass
class StructureReport:
    L_hat: float
    R_hat: float
    face_disjoint: bool
    cocompact_radius: list
    shared_faces: list
    sample_size: int


def _face_hausdorff_directed(dom, A, B):
    """sup over a in A of min over b in B of face distances (A, B in one open face)."""
    if len(A) == 0 or len(B) == 0:
        return 0.0
    return float(max(min(face_distance(dom, a, b) for b in B) for a in A))


def structure_constants_report(dom: ConvexDomain, C: ConvexSubset, family: PeripheralFamily, samples: int = 64, window=None) -> StructureReport:
    """Empirical face-structure constants of a family inside a convex subset C."""
    window = settings().window if window is None else float(window)
    ideal_C = ideal_boundary_sample(C, samples)
    if len(ideal_C) < 2:
        raise TooFewSamples("need at least two ideal points of C")
    tr_points, owners = [], []
    for k, t in enumerate(family.translates):
        pts = ideal_boundary_sample(t.subset, 8)
        tr_points.extend(pts)
        owners.extend([k] * len(pts))
    allpts = np.vstack([ideal_C, np.array(tr_points)]) if tr_points else ideal_C
    labels = face_labels(dom, allpts)
    lab_C = labels[: len(ideal_C)]
    lab_T = labels[len(ideal_C) :]
    owner_of = {}
    shared = []
    for lab, k in zip(lab_T, owners):
        prev = owner_of.setdefault(lab, k)
        if prev != k and (prev, k) not in shared:
            shared.append((family.translates[prev].word, family.translates[k].word))
    face_disjoint = not shared
    # L: face diameters of ideal points of C outside every family face
    groups = {}
    for lab, p in zip(lab_C, ideal_C):
        if lab not in owner_of:
            groups.setdefault(lab, []).append(p)
    L_hat = 0.0
    for lab, pts in groups.items():
        if lab[0] == "facets" and len(pts) > 1:
            L_hat = max(L_hat, max(face_distance(dom, u, v) for u, v in itertools.combinations(pts, 2)))
    # R: gap between F(x) & ideal(C) and F(x) & ideal(X)
    R_hat = 0.0
    for k, t in enumerate(family.translates):
        mine = [p for p, lab, o in zip(tr_points, lab_T, owners) if o == k]
        mylabs = {lab for lab, o in zip(lab_T, owners) if o == k}
        for lab in mylabs:
            if lab[0] != "facets":
                continue
            A = [p for p, l2 in zip(ideal_C, lab_C) if l2 == lab]
            B = [p for p, l2 in zip(mine, [l for l, o in zip(lab_T, owners) if o == k]) if l2 == lab]
            R_hat = max(R_hat, _face_hausdorff_directed(dom, A, B))
    radii = [_cocompact_radius(dom, family, t, window) for t in family.translates[: len(family.representatives)]]
    return StructureReport(float(L_hat), float(R_hat), face_disjoint, radii, shared, len(ideal_C))


def _cocompact_radius(dom, family: PeripheralFamily, t: Translate, window: float) -> float:
    """Largest distance from window samples of X to the stabilizer orbit of a basepoint on X."""
    X = t.subset
    P0 = dom.lift([family.basepoint.coords])[0]
    _, x0 = nearest_point(dom, P0, X)
    stab = []
    for k, M in enumerate(family.orbit.matrices):
        L = dom.lift(X.lifts @ M.T)
        ids_ok = True
        for g in L:
            if not np.any(np.linalg.norm(X.lifts - g, axis=1) <= 1e-6):
                ids_ok = False
                break
        if ids_ok:
            stab.append(M)
    orbit = dom.lift(np.array([M @ x0 for M in stab]))
    if X.size == 2:
        S = segment_samples(dom, X.lifts[0], X.lifts[1], 200, cap=window)
    else:
        S = hull_samples(dom, X.lifts, 400)
    S = S[dom.strictly_inside(S)]
    S = S[pair_distances(dom, x0[None], S) <= window]
    if len(S) == 0:
        return 0.0
    D = pair_distances(dom, np.repeat(S, len(orbit), axis=0), np.tile(orbit, (len(S), 1))).reshape(len(S), len(orbit))
    return float(D.min(axis=1).max())
