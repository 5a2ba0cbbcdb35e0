"""Hilbert metric, geodesics, distances to convex hulls and Hausdorff-bound checks.

Distances are evaluated from chord parameters rather than from explicit
boundary points: for chart lifts P, Q and D = Q - P the closure meets the
line in {P + tD : ta <= t <= tb}, and with sa = ta - 1, sb = tb - 1 (the
same interval seen from Q)

    d(P, Q) = 1/2 log( (tb / sb) * (sa / ta) ).

Both pairs are clipped independently, which keeps full relative precision
when P and Q are close together or close to the boundary.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.optimize import nnls
from scipy.spatial import ConvexHull, QhullError

from .config import settings, tolerances
from .domain import (
    ConvexDomain,
    ConvexSubset,
    Face,
    Membership,
    SimplexCandidate,
    _vec,
)
from .errors import (
    EmptySet,
    EmptySubset,
    FaceMismatch,
    NotConverging,
    NotInRelativeInterior,
    NotInterior,
    SegmentOutside,
)
from .projective import HomogeneousPoint

_GOLD = (np.sqrt(5.0) - 1.0) / 2.0


class BoundCheck(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


class AsymptoticFaces(NamedTuple):
    liminf_dist: float
    face_equal: bool
    face_dist: float
    ok: bool


# --------------------------------------------------------------------------
# vectorized kernels


def pair_distances(dom: ConvexDomain, P, Q, ignore=None) -> np.ndarray:
    """Hilbert distances between matching rows of chart lifts P and Q.

    Rows outside the (face) geometry give ``inf``; coincident rows give 0.
    ``ignore`` lists facet indices to drop, which measures distances inside
    the face cut out by those facets.
    """
    P = np.atleast_2d(P)
    Q = np.atleast_2d(Q)
    P, Q = np.broadcast_arrays(P, Q)
    ta, tb, sa, sb = dom.chord_pair(P, Q, ignore)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = 0.5 * (np.log(tb / sb) + np.log(sa / ta))
    d = np.where(np.isnan(d), np.inf, d)
    same = np.linalg.norm(Q - P, axis=1) <= 1e-15 * np.maximum(1.0, np.linalg.norm(P, axis=1))
    d = np.where(same, 0.0, d)
    return np.maximum(d, 0.0)


def _golden(f, lo, hi, iters=None):
    """Vectorized golden-section minimization of unimodal f on [lo, hi] (arrays)."""
    iters = settings().golden_iters if iters is None else iters
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        nc = np.where(left, b - _GOLD * (b - a), d)
        nd = np.where(left, c, a + _GOLD * (b - a))
        fnew = f(np.where(left, nc, nd))
        fc, fd = np.where(left, fnew, fd), np.where(left, fc, fnew)
        c, d = nc, nd
    cand = np.stack([a, b, 0.5 * (a + b)])
    vals = np.stack([f(a), f(b), f(0.5 * (a + b))])
    k = np.argmin(vals, axis=0)
    idx = np.arange(cand.shape[1])
    return cand[k, idx], vals[k, idx]


_DEPTH_LIMIT = 18.0  # beyond this Hilbert depth chart points stop being distinct in double precision
_GRID = 24


def _bracketed_golden(f, lo, hi, grid=_GRID):
    """Grid scan then golden refinement around the best grid point (robust to plateaus)."""
    n = lo.shape[0]
    s = np.linspace(0.0, 1.0, grid)
    G = lo[:, None] + s[None, :] * (hi - lo)[:, None]
    vals = np.stack([f(G[:, k]) for k in range(grid)], axis=1)
    k = np.argmin(vals, axis=1)
    idx = np.arange(n)
    a = G[idx, np.maximum(k - 1, 0)]
    b = G[idx, np.minimum(k + 1, grid - 1)]
    x, v = _golden(f, a, b)
    better = vals[idx, k] < v
    return np.where(better, G[idx, k], x), np.where(better, vals[idx, k], v)


def _line_points(dom, M, D, delta, ignore=None, chord=None):
    """Points at signed Hilbert depth ``delta`` from M_i along the line M_i + t D_i (row-wise)."""
    ta, tb = dom.chord(M, D, ignore) if chord is None else chord
    em1 = np.expm1(2.0 * np.abs(delta))
    fwd = tb * (-ta) * em1 / (tb + (em1 + 1.0) * (-ta))
    # the backward ray sees the chord (-tb, -ta)
    bwd = -((-ta) * tb * em1 / ((-ta) + (em1 + 1.0) * tb))
    t = np.where(delta >= 0, fwd, bwd)
    return M + t[:, None] * D


def _segment_min(dom, P, A, B, ignore=None):
    """min over the segment [A_i, B_i] of d(P_i, .), vectorized over rows.

    The segment is parametrized by signed Hilbert depth from its midpoint so
    that points close to boundary endpoints stay resolvable.
    """
    P, A, B = (np.atleast_2d(x) for x in (P, A, B))
    P, A, B = np.broadcast_arrays(P, A, B)
    n = P.shape[0]
    M = 0.5 * (A + B)
    D = B - A
    ta, tb = dom.chord(M, D, ignore)
    depth_ok = np.isfinite(ta) & (np.linalg.norm(D, axis=1) > 1e-15 * np.linalg.norm(M, axis=1))
    val = np.empty(n)
    pts = np.empty_like(P, dtype=float)
    if depth_ok.any():
        i = np.flatnonzero(depth_ok)
        Mi, Di, Pi = M[i], D[i], P[i]
        ch = (ta[i], tb[i])
        with np.errstate(divide="ignore", invalid="ignore"):
            up = np.minimum(pair_distances(dom, Mi, B[i], ignore), _DEPTH_LIMIT)
            down = np.minimum(pair_distances(dom, Mi, A[i], ignore), _DEPTH_LIMIT)

        def f(delta):
            return pair_distances(dom, Pi, _line_points(dom, Mi, Di, delta, ignore, ch), ignore)

        x, v = _bracketed_golden(f, -down, up)
        val[i], pts[i] = v, _line_points(dom, Mi, Di, x, ignore, ch)
    if (~depth_ok).any():
        i = np.flatnonzero(~depth_ok)
        Pi, Ai, Bi = P[i], A[i], B[i]

        def g(u):
            return pair_distances(dom, Pi, (1 - u)[:, None] * Ai + u[:, None] * Bi, ignore)

        u, v = _bracketed_golden(g, np.zeros(len(i)), np.ones(len(i)))
        val[i], pts[i] = v, (1 - u)[:, None] * Ai + u[:, None] * Bi
    return val, pts


def _triangle_min(dom, P, A, B, C, ignore=None):
    """Nested golden search over the triangle ABC (fan parameters (u, v))."""
    P, A, B, C = (np.atleast_2d(x) for x in (P, A, B, C))
    P, A, B, C = np.broadcast_arrays(P, A, B, C)

    def inner(v):
        E = (1 - v)[:, None] * A + v[:, None] * C
        F = (1 - v)[:, None] * B + v[:, None] * C
        return _segment_min(dom, P, E, F, ignore)

    iters = max(24, settings().golden_iters // 2)
    v, _ = _golden(lambda v: inner(v)[0], np.zeros(P.shape[0]), np.ones(P.shape[0]), iters)
    return inner(v)


# --------------------------------------------------------------------------
# point-to-point


def _interior_lifts(dom, *points):
    L = dom.lift([_vec(p) for p in points])
    if np.any(np.isnan(L)) or not np.all(dom.strictly_inside(L)):
        raise NotInterior("points must lie in the open domain")
    return L


def hilbert_distance(dom: ConvexDomain, x, y) -> float:
    """d(x, y) = 1/2 log [a, x, y, b]."""
    P, Q = _interior_lifts(dom, x, y)
    return float(pair_distances(dom, P, Q)[0])


def geodesic_point(dom: ConvexDomain, x, y, s: float) -> HomogeneousPoint:
    """The point z of [x, y] with d(x, z) = s d(x, y)."""
    P, Q = _interior_lifts(dom, x, y)
    if s <= 0.0:
        return HomogeneousPoint(P)
    if s >= 1.0:
        return HomogeneousPoint(Q)
    return HomogeneousPoint(_geodesic_lifts(dom, P, Q, np.array([s]))[0])


def _geodesic_lifts(dom, P, Q, s):
    """Points along [P, Q] at fractions ``s`` of the Hilbert length (closed form)."""
    D = Q - P
    ta, tb = dom.chord(P[None], D[None])
    total = pair_distances(dom, P, Q)[0]
    em1 = np.expm1(2.0 * s * total)
    t = tb * (-ta) * em1 / (tb + (em1 + 1.0) * (-ta))
    return P + t[:, None] * D


def face_distance(dom: ConvexDomain, x, y) -> float:
    """Hilbert distance between x and y measured in their common open face."""
    fx, fy = dom.face_of(x), dom.face_of(y)
    if fx != fy:
        raise FaceMismatch("points lie in different open faces")
    if fx.kind == "domain":
        return hilbert_distance(dom, x, y)
    if fx.kind == "point" or fx.dimension == 0:
        return 0.0
    P, Q = dom.lift([_vec(x), _vec(y)])
    return float(pair_distances(dom, P, Q, ignore=fx.signature)[0])


def simplex_distance_closed_form(S, x, y) -> float:
    """1/2 (max_i log(x_i/y_i) - min_j log(x_j/y_j)) in vertex coordinates.

    ``x`` and ``y`` are vertex-coordinate vectors, or homogeneous points that
    are converted using the vertices of ``S``.
    """
    def coords(p):
        if isinstance(p, HomogeneousPoint):
            return S.coordinates([p.coords])[0] if isinstance(S, SimplexCandidate) else S.barycentric([p.coords])[0]
        return np.array(p, dtype=float)

    a, b = coords(x), coords(y)
    for v in (a, b):
        v *= np.sign(v.sum()) or 1.0
        if np.any(v <= tolerances().alg * np.abs(v).max()):
            raise NotInRelativeInterior("vertex coordinates must all be positive")
    r = np.log(a) - np.log(b)
    return float(0.5 * (r.max() - r.min()))


# --------------------------------------------------------------------------
# distances to convex subsets


def _hull_edges_2d(L):
    """Edges of the planar convex hull of chart lifts L (indices), or one segment if degenerate."""
    if len(L) == 2:
        return [(0, 1)]
    try:
        M = L - L.mean(axis=0)
        _, s, vt = np.linalg.svd(M, full_matrices=False)
        Y = M @ vt[:2].T
        if s[1] <= 1e-12 * max(s[0], 1e-300):
            raise QhullError("collinear")
        hull = ConvexHull(Y)
        v = list(hull.vertices)
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]
    except QhullError:
        M = L - L.mean(axis=0)
        axis = np.linalg.svd(M, full_matrices=False)[2][0]
        proj = M @ axis
        return [(int(np.argmin(proj)), int(np.argmax(proj)))]


def _descent_min(dom, P, L, ignore=None):
    """Multi-start pairwise coordinate descent over barycentric weights."""
    m = len(L)
    rng = np.random.default_rng(settings().seed)
    starts = [np.full(m, 1.0 / m)] + list(rng.dirichlet(np.ones(m), size=settings().multistarts - 1))
    best_val, best_pt = np.inf, None
    opt = tolerances().opt
    for lam in starts:
        lam = lam.copy()
        val = pair_distances(dom, P[None], (lam @ L)[None], ignore)[0]
        for _ in range(100):
            before = val
            for i in range(m):
                for j in range(i + 1, m):
                    lo, hi = -lam[i], lam[j]
                    if hi - lo <= 1e-15:
                        continue
                    base = lam.copy()

                    def f(s, base=base, i=i, j=j):
                        W = np.repeat(base[None], s.size, axis=0)
                        W[:, i] += s
                        W[:, j] -= s
                        return pair_distances(dom, P[None], W @ L, ignore)

                    s, v = _golden(f, np.array([lo]), np.array([hi]), 40)
                    if v[0] < val:
                        lam[i] += s[0]
                        lam[j] -= s[0]
                        lam = np.clip(lam, 0.0, None)
                        lam /= lam.sum()
                        val = v[0]
            if before - val <= opt * 1e-3:
                break
        if val < best_val:
            best_val, best_pt = val, lam @ L
    return best_val, best_pt


def nearest_point(dom: ConvexDomain, p, X: ConvexSubset, ignore=None):
    """(value, chart lift of a minimizer) of d(p, .) over X."""
    P = dom.lift([_vec(p)])[0]
    if X.whole or X.hull_contains(P):
        return 0.0, P
    L = X.lifts
    m = len(L)
    if m == 1:
        return float(pair_distances(dom, P[None], L, ignore)[0]), L[0]
    if m == 2:
        val, pts = _segment_min(dom, P, L[0], L[1], ignore)
        return float(val[0]), pts[0]
    if dom.dim == 3:
        # planar chart: a minimizer outside X sits on the relative boundary of X
        edges = _hull_edges_2d(L)
        i, j = np.array(edges).T
        vals, pts = _segment_min(dom, P[None], L[i], L[j], ignore)
        k = int(np.argmin(vals))
        return float(vals[k]), pts[k]
    if m == 3:
        val, pts = _triangle_min(dom, P, L[0], L[1], L[2], ignore)
        return float(val[0]), pts[0]
    val, pt = _descent_min(dom, P, L, ignore)
    return float(val), pt


def distance_to_subset(dom: ConvexDomain, p, X: ConvexSubset) -> float:
    """min over X of d(p, .)."""
    if X is None or (not X.whole and X.size == 0):
        raise EmptySubset("X is empty")
    _interior_lifts(dom, p)
    return nearest_point(dom, p, X)[0]


def distances_to_subset(dom: ConvexDomain, points, X: ConvexSubset) -> np.ndarray:
    """Vectorized `distance_to_subset` for many points (rows of chart lifts)."""
    P = dom.lift(points)
    if X.whole:
        return np.zeros(len(P))
    L = X.lifts
    if len(L) == 1:
        return pair_distances(dom, P, L)
    if len(L) == 2:
        return _segment_min(dom, P, L[0], L[1])[0]
    if dom.dim == 3:
        edges = np.array(_hull_edges_2d(L))
        n, k = len(P), len(edges)
        PP = np.repeat(P, k, axis=0)
        A = np.tile(L[edges[:, 0]], (n, 1))
        B = np.tile(L[edges[:, 1]], (n, 1))
        vals = _segment_min(dom, PP, A, B)[0].reshape(n, k).min(axis=1)
        inside = np.array([X.hull_contains(p) for p in P])
        return np.where(inside, 0.0, vals)
    return np.array([nearest_point(dom, p, X)[0] for p in P])


def hausdorff_distance(dom: ConvexDomain, A, B) -> float:
    """Hausdorff distance between two finite point sets."""
    A = dom.lift([_vec(a) for a in A]) if len(A) else np.empty((0, dom.dim))
    B = dom.lift([_vec(b) for b in B]) if len(B) else np.empty((0, dom.dim))
    if len(A) == 0 or len(B) == 0:
        raise EmptySet("Hausdorff distance needs two nonempty sets")
    if not (np.all(dom.strictly_inside(A)) and np.all(dom.strictly_inside(B))):
        raise NotInterior("points must lie in the open domain")
    return _finite_hausdorff(dom, A, B)


def _finite_hausdorff(dom, A, B, ignore=None):
    rowmin = np.full(len(A), np.inf)
    colmin = np.full(len(B), np.inf)
    step = max(1, 200_000 // max(1, len(B)))
    for s in range(0, len(A), step):
        blk = A[s : s + step]
        D = pair_distances(dom, np.repeat(blk, len(B), axis=0), np.tile(B, (len(blk), 1)), ignore)
        D = D.reshape(len(blk), len(B))
        rowmin[s : s + step] = D.min(axis=1)
        colmin = np.minimum(colmin, D.min(axis=0))
    return float(max(rowmin.max(), colmin.max()))


# --------------------------------------------------------------------------
# sampled Hausdorff-bound checks


def segment_samples(dom, P1, P2, n=None, cap=None, ignore=None):
    """Hilbert-uniform samples of the open segment (P1, P2), truncated at ``cap`` from its midpoint."""
    n = settings().segment_samples if n is None else n
    cap = settings().segment_cap if cap is None else cap
    M = 0.5 * (P1 + P2)
    D = P2 - P1
    ta, tb = dom.chord(M[None], D[None], ignore)
    if np.isnan(ta[0]):
        raise SegmentOutside("segment misses the domain")
    # parameters of the endpoints relative to M are -1/2 and +1/2
    def depth(sign, t_bound):
        if 0.5 >= t_bound - 1e-15 * max(1.0, abs(t_bound)):
            return cap
        return min(cap, float(pair_distances(dom, M[None], (M + sign * 0.5 * D)[None], ignore)[0]))

    up, down = depth(1.0, tb[0]), depth(-1.0, -ta[0])
    deltas = np.linspace(-down, up, n)
    fwd = deltas >= 0
    out = np.empty((n, dom.dim))
    if fwd.any():
        out[fwd] = ray_points(dom, M, D, deltas[fwd], ignore)
    if (~fwd).any():
        out[~fwd] = ray_points(dom, M, -D, -deltas[~fwd], ignore)
    return out


def ray_points(dom, P, D, deltas, ignore=None):
    """Points at Hilbert distances ``deltas`` from P along the ray P + tD, t > 0."""
    ta, tb = dom.chord(P[None], D[None], ignore)
    em1 = np.expm1(2.0 * np.asarray(deltas, dtype=float))
    t = tb * (-ta) * em1 / (tb + (em1 + 1.0) * (-ta))
    return P + t[:, None] * D


def _directed_to_segment(dom, S, A, B, ignore=None):
    """sup over rows of S of min over [A, B] of the distance."""
    vals, _ = _segment_min(dom, S, A[None], B[None], ignore)
    return float(vals.max())


def _segment_setup(dom, p1, p2, q1, q2, n):
    P1, P2, Q1, Q2 = dom.lift([_vec(v) for v in (p1, p2, q1, q2)])
    if dom.contains(0.5 * (P1 + P2)) is not Membership.INTERIOR:
        raise SegmentOutside("the open segment (p1, p2) is not in the domain")
    if not (dom.same_face(P1, Q1) and dom.same_face(P2, Q2)):
        raise FaceMismatch("endpoints must share open faces pairwise")
    rhs = max(face_distance(dom, P1, Q1), face_distance(dom, P2, Q2))
    if dom.contains(0.5 * (Q1 + Q2)) is not Membership.INTERIOR:
        raise SegmentOutside("the open segment (q1, q2) is not in the domain")
    return (P1, P2, Q1, Q2), segment_samples(dom, P1, P2, n), segment_samples(dom, Q1, Q2, n), rhs


def check_segment_hausdorff_bound(dom: ConvexDomain, p1, p2, q1, q2) -> BoundCheck:
    """Compare the sampled Hausdorff distance of (p1,p2) and (q1,q2) with the face-distance bound."""
    return check_segment_hausdorff_bounds(dom, [(p1, p2, q1, q2)])[0]


def check_segment_hausdorff_bounds(dom: ConvexDomain, quadruples, n=None) -> list:
    """Batched `check_segment_hausdorff_bound`: all samples go through one vectorized search."""
    n = settings().segment_samples if n is None else n
    setups = [_segment_setup(dom, *q, n) for q in quadruples]
    if not setups:
        return []
    S, A, B = [], [], []
    for (P1, P2, Q1, Q2), SP, SQ, _ in setups:
        S += [SP, SQ]
        A += [np.repeat(Q1[None], len(SP), axis=0), np.repeat(P1[None], len(SQ), axis=0)]
        B += [np.repeat(Q2[None], len(SP), axis=0), np.repeat(P2[None], len(SQ), axis=0)]
    vals, _ = _segment_min(dom, np.vstack(S), np.vstack(A), np.vstack(B))
    out, pos = [], 0
    samp = tolerances().samp
    for _, SP, SQ, rhs in setups:
        k = len(SP) + len(SQ)
        lhs = float(vals[pos : pos + k].max())
        pos += k
        out.append(BoundCheck(lhs, rhs, bool(lhs <= rhs + samp)))
    return out


def hull_samples(dom, L, n=None, ignore=None, rng=None):
    """Samples of ConvHull(L): barycentric interior points plus Hilbert-uniform edge samples."""
    n = settings().hull_samples if n is None else n
    rng = np.random.default_rng(settings().seed) if rng is None else rng
    m = len(L)
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    per_edge = max(8, n // (2 * max(1, len(pairs))))
    parts = [rng.dirichlet(np.ones(m), size=n - per_edge * len(pairs)) @ L]
    for i, j in pairs:
        mid = 0.5 * (L[i] + L[j])
        ta, _ = dom.chord(mid[None], (L[j] - L[i])[None], ignore)
        if np.isnan(ta[0]):
            continue
        parts.append(segment_samples(dom, L[i], L[j], per_edge, ignore=ignore))
    return np.vstack(parts)


def check_hull_hausdorff_bound(dom: ConvexDomain, qs, ps, z) -> BoundCheck:
    """Hausdorff distance of ConvHull(q) and ConvHull(p) inside F(z) versus max_j d_F(p_j, q_j)."""
    if len(qs) != len(ps) or not qs:
        raise FaceMismatch("q-list and p-list must be nonempty and of equal length")
    Q = dom.lift([_vec(v) for v in qs])
    P = dom.lift([_vec(v) for v in ps])
    for a, b in zip(P, Q):
        if not dom.same_face(a, b):
            raise FaceMismatch("p_j and q_j must share an open face")
    rhs = max(face_distance(dom, a, b) for a, b in zip(P, Q))
    fz = dom.face_of(z)
    ignore = fz.signature if fz.kind == "facets" else None
    rng = np.random.default_rng(settings().seed)
    SQ = _in_face(dom, hull_samples(dom, Q, ignore=ignore, rng=rng), fz)
    SP = _in_face(dom, hull_samples(dom, P, ignore=ignore, rng=rng), fz)
    if len(SQ) == 0 or len(SP) == 0:
        return BoundCheck(0.0, rhs, True)
    lhs = max(_directed_to_hull(dom, SQ, P, ignore), _directed_to_hull(dom, SP, Q, ignore))
    return BoundCheck(lhs, rhs, bool(lhs <= rhs + tolerances().samp))


def _in_face(dom, S, face: Face):
    if face.kind == "domain":
        return S[dom.classify_many(S) == 0]
    keep = [dom.face_of(s) == face for s in S]
    return S[np.array(keep, dtype=bool)]


def _directed_to_hull(dom, S, L, ignore):
    """sup over rows of S of the distance (in the face geometry) to ConvHull(L)."""
    m = len(L)
    if m == 1:
        return float(pair_distances(dom, S, L, ignore).max())
    if m == 2:
        return _directed_to_segment(dom, S, L[0], L[1], ignore)
    A = np.vstack([L.T, np.ones((1, m))])
    inside = np.array([nnls(A, np.append(s, 1.0))[1] <= tolerances().geo for s in S])
    if dom.dim == 3:
        edges = np.array(_hull_edges_2d(L))
        n, k = len(S), len(edges)
        vals = _segment_min(
            dom, np.repeat(S, k, axis=0), np.tile(L[edges[:, 0]], (n, 1)), np.tile(L[edges[:, 1]], (n, 1)), ignore
        )[0].reshape(n, k).min(axis=1)
    elif m == 3:
        vals = _triangle_min(dom, S, L[0][None], L[1][None], L[2][None], ignore)[0]
    else:
        vals = np.array([_descent_min(dom, s, L, ignore)[0] for s in S])
    vals = np.where(inside, 0.0, vals)
    return float(vals.max())


# --------------------------------------------------------------------------
# asymptotic sequences


def _sequence_limit(dom, seq):
    L = dom.lift([_vec(v) for v in seq])
    if len(L) < 3:
        raise NotConverging("need at least three terms to judge convergence")
    steps = np.linalg.norm(np.diff(L[-3:], axis=0), axis=1)
    last = L[-1]
    if dom.contains(last) is Membership.BOUNDARY:
        return last
    if not steps[1] < steps[0] or steps[1] == 0:
        raise NotConverging("tail steps are not shrinking")
    D = L[-1] - L[-2]
    _, tb = dom.chord(last[None], D[None])
    if np.isnan(tb[0]):
        raise NotConverging("sequence leaves the domain")
    return last + tb[0] * D


def check_asymptotic_faces(dom: ConvexDomain, ps, qs) -> AsymptoticFaces:
    """liminf d(p_n, q_n), whether the limits share a face, and their face distance."""
    if len(ps) != len(qs):
        raise NotConverging("sequences must have equal length")
    p, q = _sequence_limit(dom, ps), _sequence_limit(dom, qs)
    P = dom.lift([_vec(v) for v in ps])
    Q = dom.lift([_vec(v) for v in qs])
    tail = slice(len(P) // 2, None)
    liminf = float(pair_distances(dom, P[tail], Q[tail]).min())
    equal = dom.same_face(p, q)
    fd = face_distance(dom, p, q) if equal else float("inf")
    ok = bool(equal and fd <= liminf + tolerances().samp)
    return AsymptoticFaces(liminf, equal, fd, ok)
