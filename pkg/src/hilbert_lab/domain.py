"""Properly convex domains, their faces, and convex subsets generated by finitely many points.

Three domain variants are supported:

* `Ellipsoid` -- the projectivized positive cone of a form of signature (1, d-1)
  (the Beltrami-Klein ball up to a change of coordinates);
* `Polytope` -- the convex hull of finitely many points, with derived facets;
* `Simplex` -- a projective simplex, possibly of lower dimension than the
  ambient space (in which case it is open in its span).

Everything vectorized works on *chart lifts*: representatives v with
``chart.covector @ v == 1``. Membership is decided from a signed "level"
which is positive inside, zero on the boundary and negative outside.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import nnls
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .config import settings, tolerances
from .errors import (
    BoundedSubset,
    CoincidentPoints,
    DependentVertices,
    EmptySubset,
    InvalidDomain,
    NotASubset,
    OutsidePoint,
    SegmentOutside,
)
from .projective import AffineChart, HomogeneousPoint, as_point


class Membership(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def _rows(points) -> np.ndarray:
    """Stack points (HomogeneousPoint or arrays) into a 2-d float array."""
    if isinstance(points, np.ndarray):
        return np.atleast_2d(points.astype(float))
    return np.stack([p.coords if isinstance(p, HomogeneousPoint) else np.asarray(p, float) for p in points])


def _vec(p) -> np.ndarray:
    return p.coords if isinstance(p, HomogeneousPoint) else np.asarray(p, dtype=float)


@dataclass(frozen=True, eq=False)
class Face:
    """An open face F(x) of the closure of a domain.

    ``kind`` is ``"domain"`` for interior points (the whole domain),
    ``"facets"`` for polytope faces (signature = active facet indices) and
    ``"point"`` for singleton faces of strictly convex domains.
    """

    kind: str
    signature: tuple
    span_basis: np.ndarray = field(repr=False)
    dimension: int

    def key(self, resolution: float = 1e-6) -> tuple:
        if self.kind == "point":
            return ("point",) + tuple(np.round(np.asarray(self.signature) / resolution).astype(int))
        return (self.kind,) + tuple(self.signature)

    def __eq__(self, other):
        if not isinstance(other, Face):
            return NotImplemented
        if self.kind != other.kind:
            return False
        if self.kind == "point":
            a, b = np.asarray(self.signature), np.asarray(other.signature)
            return bool(min(np.linalg.norm(a - b), np.linalg.norm(a + b)) <= 10 * tolerances().geo)
        return self.signature == other.signature

    __hash__ = None


class ConvexDomain:
    """Base class; subclasses provide ``_levels``, ``_chord`` and sampling."""

    kind = "abstract"
    strictly_convex = False

    def __init__(self, dim: int, chart: AffineChart):
        self.dim = dim
        self.chart = chart

    # -- lifting and levels -------------------------------------------------
    def lift(self, points) -> np.ndarray:
        """Chart lifts of the rows of ``points``; rows off the chart become nan."""
        V = _rows(points)
        s = V @ self.chart.covector
        with np.errstate(divide="ignore", invalid="ignore"):
            out = V / s[:, None]
        out[np.abs(s) < 1e-14 * np.linalg.norm(V, axis=1)] = np.nan
        return out

    def levels(self, points) -> np.ndarray:
        """Signed membership level of unit-normalized representatives."""
        V = _rows(points)
        s = V @ self.chart.covector
        V = V * np.sign(np.where(s == 0, 1.0, s))[:, None]
        V = V / np.linalg.norm(V, axis=1)[:, None]
        lv = self._levels(V)
        lv[np.abs(s) <= tolerances().chart_margin * 1e-3] = -1.0
        return lv

    def classify_many(self, points) -> np.ndarray:
        """0 interior, 1 boundary, 2 outside."""
        lv = self.levels(points)
        geo = tolerances().geo
        return np.where(lv > geo, 0, np.where(lv >= -geo, 1, 2))

    def contains(self, p) -> Membership:
        code = int(self.classify_many([_vec(p)])[0])
        return (Membership.INTERIOR, Membership.BOUNDARY, Membership.OUTSIDE)[code]

    def strictly_inside(self, points) -> np.ndarray:
        """Numerical interior test used by metric computations (no margin)."""
        return self.levels(points) > 0.0

    # -- chords ---------------------------------------------------------------
    def chord(self, P, D, ignore=None):
        """Parameter interval [t_lo, t_hi] of {P + t D} inside the closure.

        ``P`` are chart lifts, ``D`` directions with covector . D = 0. Rows
        whose line misses the closure get nan.
        """
        return self._chord(np.atleast_2d(P), np.atleast_2d(D), ignore)

    def line_boundary_intersection(self, p, q):
        """Endpoints (a, b) of the closure of the line through p, q, ordered a, p, q, b."""
        P, Q = self.lift([_vec(p), _vec(q)])
        if np.any(np.isnan(P)) or np.any(np.isnan(Q)):
            raise SegmentOutside("points are not in the domain chart")
        D = Q - P
        if np.linalg.norm(D) <= tolerances().alg * max(1.0, np.linalg.norm(P)):
            raise CoincidentPoints("p and q coincide")
        mid = 0.5 * (P + Q)
        if self.classify_many([mid])[0] != 0:
            raise SegmentOutside("the open segment (p, q) does not meet the domain")
        lo, hi = self.chord(P[None], D[None])
        a, b = P + lo[0] * D, P + hi[0] * D
        return HomogeneousPoint(a), HomogeneousPoint(b)

    # -- geometry helpers --------------------------------------------------
    @property
    def center(self) -> np.ndarray:
        raise NotImplementedError

    def radial_boundary(self, points) -> np.ndarray:
        """Boundary points on the rays from the center through ``points`` (chart lifts)."""
        V = self.lift(points)
        C = np.broadcast_to(self.center, V.shape)
        D = V - C
        norms = np.linalg.norm(D, axis=1)
        D = np.where(norms[:, None] > 1e-15, D, self.chart.frame[:, 0])
        _, hi = self.chord(C, D)
        return C + hi[:, None] * D

    def chart_gap(self, points) -> np.ndarray:
        """Chart-Euclidean distance from the rows to the boundary along center rays."""
        V = self.lift(points)
        return np.linalg.norm(V - self.radial_boundary(V), axis=1)

    def face_of(self, x) -> Face:
        raise NotImplementedError

    def same_face(self, x, y) -> bool:
        return self.face_of(x) == self.face_of(y)

    def face_extremes(self, face: Face) -> np.ndarray:
        raise NotImplementedError

    def boundary_sample(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def sample_interior(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def chart_coords(self, points) -> np.ndarray:
        return self.chart.coords(self.lift(points))


class Ellipsoid(ConvexDomain):
    """{[x] : B(x, x) > 0} for a symmetric form B of signature (1, d-1)."""

    kind = "ellipsoid"
    strictly_convex = True

    def __init__(self, form):
        B = np.array(form, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] < 2:
            raise InvalidDomain("ellipsoid form must be a square matrix of size >= 2")
        if not np.allclose(B, B.T, atol=1e-12 * np.abs(B).max()):
            raise InvalidDomain("ellipsoid form must be symmetric")
        B = 0.5 * (B + B.T)
        w, U = np.linalg.eigh(B)
        scale = np.abs(w).max()
        w = w / scale
        if not (np.sum(w > 1e-12) == 1 and np.sum(w < -1e-12) == B.shape[0] - 1):
            raise InvalidDomain("form must have signature (1, d-1)")
        self.form = B / scale
        order = np.argsort(-w)
        self._eig = w[order]
        self._U = U[:, order]
        u0 = self._U[:, 0]
        if u0[np.argmax(np.abs(u0))] < 0:
            u0 = -u0
            self._U[:, 0] = u0
        super().__init__(B.shape[0], AffineChart(u0))
        # boundary points in eigen-frame: u0/sqrt(l0) + sum w_i u_i / sqrt(|l_i|), |w| = 1
        self._u0 = self._U[:, 0] / np.sqrt(self._eig[0])
        self._frame = self._U[:, 1:] / np.sqrt(-self._eig[1:])

    def __repr__(self):
        return f"Ellipsoid(dim={self.dim})"

    @classmethod
    def ball(cls, n: int = 2) -> "Ellipsoid":
        """The Beltrami-Klein unit ball in the standard chart of P(R^{n+1})."""
        return cls(np.diag([1.0] + [-1.0] * n))

    def _levels(self, V):
        return np.einsum("ij,jk,ik->i", V, self.form, V)

    @property
    def center(self):
        return self.chart.lift(self._u0)

    def _roots(self, P, D):
        B = self.form
        bpp = np.einsum("ij,jk,ik->i", P, B, P)
        bpd = np.einsum("ij,jk,ik->i", P, B, D)
        bdd = np.einsum("ij,jk,ik->i", D, B, D)
        disc = bpd * bpd - bpp * bdd
        with np.errstate(invalid="ignore", divide="ignore"):
            sq = np.sqrt(disc)
            q = -(bpd + np.where(bpd >= 0, 1.0, -1.0) * sq)
            r1 = q / bdd
            r2 = np.where(q != 0, bpp / q, 0.0)
        lo, hi = np.minimum(r1, r2), np.maximum(r1, r2)
        bad = ~(disc >= 0) | ~(bdd < 0)
        lo[bad] = np.nan
        hi[bad] = np.nan
        return lo, hi

    def _chord(self, P, D, ignore=None):
        return self._roots(P, D)

    def chord_pair(self, P, Q, ignore=None):
        D = Q - P
        ta, tb = self._roots(P, D)
        sa, sb = self._roots(Q, D)
        return ta, tb, sa, sb

    def face_of(self, x) -> Face:
        v = _vec(x)
        m = self.contains(v)
        if m is Membership.OUTSIDE:
            raise OutsidePoint(f"{as_point(v)!r} is outside the domain")
        if m is Membership.INTERIOR:
            return Face("domain", (), np.eye(self.dim), self.dim - 1)
        p = as_point(v).coords
        return Face("point", tuple(p), p[:, None].copy(), 0)

    def face_extremes(self, face: Face) -> np.ndarray:
        if face.kind == "point":
            return self.lift([np.asarray(face.signature)])
        raise ValueError("the whole ellipsoid has no extreme point set of finite size")

    def boundary_sample(self, n: int) -> np.ndarray:
        k = self.dim - 1
        if k == 1:
            W = np.array([[-1.0], [1.0]])[: max(n, 0)]
        elif k == 2:
            th = 2.0 * np.pi * np.arange(n) / n
            W = np.stack([np.cos(th), np.sin(th)], axis=1)
        else:
            rng = np.random.default_rng(settings().seed)
            W = rng.normal(size=(n, k))
            W /= np.linalg.norm(W, axis=1)[:, None]
        V = self._u0 + W @ self._frame.T
        return self.lift(V)

    def sample_interior(self, n, rng, max_radius: float = 0.999):
        k = self.dim - 1
        W = rng.normal(size=(n, k))
        W /= np.linalg.norm(W, axis=1)[:, None]
        r = max_radius * rng.random(n) ** (1.0 / k)
        return self.lift(self._u0 + (W * r[:, None]) @ self._frame.T)

    def preserved_form(self) -> np.ndarray:
        return self.form


class _FacetDomain(ConvexDomain):
    """Shared machinery for domains cut out by finitely many linear inequalities."""

    def _setup(self, lifts: np.ndarray, facets: np.ndarray, span: np.ndarray | None):
        self.vertices = lifts
        self.facets = facets
        self.span = span  # orthonormal basis of the span when lower dimensional

    def _levels(self, V):
        lv = (V @ self.facets.T).min(axis=1)
        if self.span is not None:
            resid = np.linalg.norm(V - (V @ self.span) @ self.span.T, axis=1)
            lv = np.where(resid > tolerances().geo, -resid, lv)
        return lv

    @property
    def center(self):
        return self.vertices.mean(axis=0)

    def _bounds(self, P, D, ignore):
        F = self.facets
        if ignore:
            keep = np.ones(F.shape[0], dtype=bool)
            keep[list(ignore)] = False
            F = F[keep]
        fP = P @ F.T
        fD = D @ F.T
        thr = 1e-13 * np.sqrt(np.einsum("ij,ij->i", D, D))[:, None]
        up = fD > thr
        down = fD < -thr
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = -fP / fD
        lo = np.where(up, ratio, -np.inf).max(axis=1)
        hi = np.where(down, ratio, np.inf).min(axis=1)
        bad = ~np.isfinite(lo) | ~np.isfinite(hi) | (lo > hi + 1e-12)
        # a flat direction inside an inactive facet must respect it
        flat = ~(up | down) & (fP < -tolerances().geo)
        bad |= flat.any(axis=1)
        lo[bad] = np.nan
        hi[bad] = np.nan
        return lo, hi

    def _chord(self, P, D, ignore=None):
        return self._bounds(P, D, ignore)

    def chord_pair(self, P, Q, ignore=None):
        D = Q - P
        ta, tb = self._bounds(P, D, ignore)
        sa, sb = self._bounds(Q, D, ignore)
        return ta, tb, sa, sb

    def face_of(self, x) -> Face:
        v = _vec(x)
        m = self.contains(v)
        if m is Membership.OUTSIDE:
            raise OutsidePoint(f"{as_point(v)!r} is outside the domain")
        full = np.eye(self.dim) if self.span is None else self.span
        top = full.shape[1] - 1
        if m is Membership.INTERIOR:
            return Face("domain", (), full, top)
        u = v / np.linalg.norm(v)
        u = u * np.sign(u @ self.chart.covector)
        active = tuple(int(i) for i in np.flatnonzero(u @ self.facets.T <= tolerances().geo))
        # span of the face: vectors of the domain span annihilated by the active facets
        coeffs = null_space(self.facets[list(active)] @ full)
        basis = full @ coeffs
        return Face("facets", active, basis, basis.shape[1] - 1)

    def face_extremes(self, face: Face) -> np.ndarray:
        if face.kind == "domain":
            return self.vertices.copy()
        if face.kind != "facets":
            raise ValueError("foreign face")
        vals = self.vertices @ self.facets[list(face.signature)].T
        scale = np.linalg.norm(self.vertices, axis=1)[:, None]
        keep = np.all(np.abs(vals) <= tolerances().geo * scale, axis=1)
        return self.vertices[keep]


def _dedupe_rows(M: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    out = []
    for row in M:
        if not any(np.linalg.norm(row - r) <= tol for r in out):
            out.append(row)
    return np.array(out)


def _lifts_from_vertices(vertices, dim_hint=None) -> np.ndarray:
    V = np.array([np.asarray(_vec(v), dtype=float) for v in vertices])
    if V.ndim != 2:
        raise InvalidDomain("vertices must be a list of coordinate vectors")
    return V


class Polytope(_FacetDomain):
    """Convex hull of finitely many points with nonempty interior.

    Vertices are homogeneous vectors whose signs are taken as given (use
    `Polytope.from_chart` for affine input). Non-extreme points are dropped.
    """

    kind = "polytope"

    def __init__(self, vertices):
        V = _lifts_from_vertices(vertices)
        d = V.shape[1]
        U = V / np.linalg.norm(V, axis=1)[:, None]
        c = U.sum(axis=0)
        if np.linalg.norm(c) == 0:
            raise InvalidDomain("vertices do not lie in a common affine chart")
        c /= np.linalg.norm(c)
        if np.any(U @ c <= tolerances().chart_margin):
            raise InvalidDomain("vertices do not lie strictly inside a common affine chart")
        chart = AffineChart(c)
        super().__init__(d, chart)
        L = chart.lift(V)
        if d == 2:
            Y = chart.coords(L)[:, 0]
            L = L[[int(np.argmin(Y)), int(np.argmax(Y))]]
            if np.linalg.norm(L[0] - L[1]) < tolerances().chart_margin:
                raise InvalidDomain("polytope has empty interior")
            facets = np.linalg.inv(L.T)
        else:
            Y = chart.coords(L)
            try:
                hull = ConvexHull(Y)
            except QhullError as exc:
                raise InvalidDomain(f"polytope has empty interior: {exc}") from None
            L = L[np.sort(hull.vertices)] if d > 3 else L[hull.vertices]
            eq = hull.equations  # normal . y + offset <= 0 inside
            eq = _dedupe_rows(eq)
            normals, offs = eq[:, :-1], eq[:, -1]
            # homogeneous covector phi with phi(x) >= 0 inside for chart-positive x
            # (chart lifts x have coords frame^T x, since the frame is orthogonal to c)
            facets = -(normals @ chart.frame.T) - offs[:, None] * c[None, :]
        facets = facets / np.linalg.norm(facets, axis=1)[:, None]
        self._setup(L, facets, None)
        self._order2d = d == 3

    @classmethod
    def from_chart(cls, points) -> "Polytope":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(np.hstack([np.ones((pts.shape[0], 1)), pts]))

    @classmethod
    def square(cls) -> "Polytope":
        return cls.from_chart([[1, 1], [-1, 1], [-1, -1], [1, -1]])

    def __repr__(self):
        return f"Polytope(dim={self.dim}, vertices={len(self.vertices)}, facets={len(self.facets)})"

    def boundary_sample(self, n: int) -> np.ndarray:
        if self.dim == 2:
            return self.vertices[: max(n, 0)].copy()
        if self._order2d:
            ring = np.vstack([self.vertices, self.vertices[:1]])
            seg = np.linalg.norm(np.diff(ring, axis=0), axis=1)
            cum = np.concatenate([[0.0], np.cumsum(seg)])
            s = cum[-1] * np.arange(n) / n
            k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
            lam = ((s - cum[k]) / seg[k])[:, None]
            return (1 - lam) * ring[k] + lam * ring[k + 1]
        rng = np.random.default_rng(settings().seed)
        out = []
        for i in rng.integers(0, len(self.facets), size=n):
            face = Face("facets", (int(i),), np.empty((0, 0)), 0)
            ext = self.face_extremes(face)
            w = rng.dirichlet(np.ones(len(ext)))
            out.append(w @ ext)
        return np.array(out)

    def sample_interior(self, n, rng):
        W = rng.dirichlet(np.ones(len(self.vertices)), size=n)
        return W @ self.vertices


class Simplex(_FacetDomain):
    """A projective k-simplex: the positive hull of k+1 independent vectors.

    When k < d-1 the simplex is open in its span and membership includes a
    span-residual test.
    """

    kind = "simplex"

    def __init__(self, vertices):
        V = _lifts_from_vertices(vertices)
        k1, d = V.shape
        if k1 < 2 or k1 > d:
            raise InvalidDomain("a simplex needs between 2 and d vertices")
        if np.linalg.svd(V, compute_uv=False)[-1] <= tolerances().alg * np.linalg.norm(V):
            raise DependentVertices("simplex vertices are projectively dependent")
        U = V / np.linalg.norm(V, axis=1)[:, None]
        c = U.sum(axis=0)
        c /= np.linalg.norm(c)
        if np.any(U @ c <= tolerances().chart_margin):
            raise InvalidDomain("vertices do not lie strictly inside a common affine chart")
        chart = AffineChart(c)
        super().__init__(d, chart)
        L = chart.lift(V)
        facets = np.linalg.pinv(L.T)  # rows: barycentric coordinate functionals
        span = None
        if k1 < d:
            q, _ = np.linalg.qr(L.T)
            span = q
            facets = facets @ (span @ span.T)
        facets = facets / np.linalg.norm(facets, axis=1)[:, None]
        self._setup(L, facets, span)
        self.k = k1 - 1

    @classmethod
    def standard(cls, k: int = 2) -> "Simplex":
        return cls(np.eye(k + 1))

    def __repr__(self):
        return f"Simplex(k={self.k}, dim={self.dim})"

    def barycentric(self, points) -> np.ndarray:
        """Positive coordinates with respect to the chart-lifted vertices."""
        P = self.lift(points)
        lam, *_ = np.linalg.lstsq(self.vertices.T, P.T, rcond=None)
        return lam.T

    def boundary_sample(self, n: int) -> np.ndarray:
        rng = np.random.default_rng(settings().seed)
        out = []
        for i in range(n):
            skip = i % (self.k + 1)
            w = rng.dirichlet(np.ones(self.k))
            w = np.insert(w, skip, 0.0)
            out.append(w @ self.vertices)
        return np.array(out)

    def sample_interior(self, n, rng):
        W = rng.dirichlet(np.ones(self.k + 1), size=n)
        return W @ self.vertices


# --------------------------------------------------------------------------
# convex subsets


class ConvexSubset:
    """ConvHull(generators) intersected with the domain, or the whole domain.

    Generators are points of the closure; the subset must meet the domain.
    """

    def __init__(self, ambient: ConvexDomain, generators=(), interior_basepoint=None, whole=False):
        self.ambient = ambient
        self.whole = bool(whole)
        if self.whole:
            self.generators = ()
            self.lifts = np.empty((0, ambient.dim))
            base = ambient.center if interior_basepoint is None else _vec(interior_basepoint)
            self.interior_basepoint = HomogeneousPoint(base)
            return
        gens = tuple(as_point(g) for g in generators)
        if not gens:
            raise EmptySubset("a convex subset needs at least one generator")
        L = ambient.lift(gens)
        if np.any(np.isnan(L)) or np.any(ambient.classify_many(L) == 2):
            raise OutsidePoint("a generator lies outside the closure of the domain")
        self.generators = gens
        self.lifts = L
        base = L.mean(axis=0) if interior_basepoint is None else ambient.lift([_vec(interior_basepoint)])[0]
        if not ambient.strictly_inside([base])[0]:
            raise EmptySubset("the convex hull does not meet the domain")
        self.interior_basepoint = HomogeneousPoint(base)

    @classmethod
    def whole_domain(cls, ambient: ConvexDomain) -> "ConvexSubset":
        return cls(ambient, whole=True)

    @property
    def size(self) -> int:
        return len(self.generators)

    def __repr__(self):
        if self.whole:
            return f"ConvexSubset(whole {self.ambient!r})"
        return f"ConvexSubset({self.size} generators in {self.ambient!r})"

    def image(self, matrix) -> "ConvexSubset":
        """Image under a projective map (given as a matrix) preserving the ambient domain."""
        M = np.asarray(getattr(matrix, "matrix", matrix), dtype=float)
        if self.whole:
            return self
        gens = self.lifts @ M.T
        base = self.ambient.lift([self.interior_basepoint.coords @ M.T])[0]
        return ConvexSubset(self.ambient, [HomogeneousPoint(g) for g in gens], base)

    def hull_contains(self, p, tol=None) -> bool:
        """Membership of p in the closure of the subset."""
        tol = tolerances().geo if tol is None else tol
        if self.whole:
            return self.ambient.contains(p) is not Membership.OUTSIDE
        P = self.ambient.lift([_vec(p)])[0]
        if np.any(np.isnan(P)):
            return False
        A = np.vstack([self.lifts.T, np.ones((1, self.size))])
        b = np.concatenate([P, [1.0]])
        _, resid = nnls(A, b)
        return bool(resid <= tol * max(1.0, np.linalg.norm(b)))


class SimplexCandidate:
    """A projective simplex inside a domain, given by its vertices."""

    def __init__(self, ambient: ConvexDomain, vertices):
        self.ambient = ambient
        self.vertices = tuple(as_point(v) for v in vertices)
        self.lifts = ambient.lift(self.vertices)
        if np.linalg.svd(self.lifts, compute_uv=False)[-1] <= tolerances().alg * np.linalg.norm(self.lifts):
            raise DependentVertices("simplex vertices are projectively dependent")

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1

    def as_subset(self) -> ConvexSubset:
        return ConvexSubset(self.ambient, self.vertices)

    def coordinates(self, points) -> np.ndarray:
        P = self.ambient.lift(points)
        lam, *_ = np.linalg.lstsq(self.lifts.T, P.T, rcond=None)
        return lam.T

    def __repr__(self):
        return f"SimplexCandidate(dim={self.dimension})"


# --------------------------------------------------------------------------
# operations


def contains(domain: ConvexDomain, p) -> Membership:
    return domain.contains(p)


def line_boundary_intersection(domain: ConvexDomain, p, q):
    return domain.line_boundary_intersection(p, q)


def face_of(domain: ConvexDomain, x) -> Face:
    return domain.face_of(x)


def same_face(domain: ConvexDomain, x, y) -> bool:
    return domain.same_face(x, y)


def segment_in_boundary(domain: ConvexDomain, x, y, depth=None) -> bool:
    """Dyadic midpoint refinement: all 2**depth + 1 samples of [x, y] are boundary points."""
    depth = settings().boundary_depth if depth is None else depth
    X, Y = domain.lift([_vec(x), _vec(y)])
    t = np.linspace(0.0, 1.0, 2**depth + 1)[:, None]
    pts = (1 - t) * X + t * Y
    return bool(np.all(domain.classify_many(pts) == 1))


def _boundary_groups(domain: ConvexDomain, L: np.ndarray, max_size: int):
    """Subsets (as index tuples, size >= 2) of boundary lifts whose hull lies in the boundary."""
    m = len(L)
    if domain.strictly_convex or m < 2:
        return []
    ii, jj = np.triu_indices(m, 1)
    mids = 0.5 * (L[ii] + L[jj])
    on = domain.classify_many(mids) == 1
    adj = {i: set() for i in range(m)}
    groups = []
    for i, j in zip(ii[on], jj[on]):
        adj[int(i)].add(int(j))
        adj[int(j)].add(int(i))
        groups.append((int(i), int(j)))
    size = 3
    current = groups
    while size <= max_size and current:
        nxt = []
        for g in current:
            common = set.intersection(*(adj[i] for i in g))
            for k in sorted(common):
                if k > g[-1]:
                    cand = g + (k,)
                    if domain.classify_many([L[list(cand)].mean(axis=0)])[0] == 1:
                        nxt.append(cand)
        groups.extend(nxt)
        current = nxt
        size += 1
    return groups


def ideal_boundary_sample(C: ConvexSubset, n: int) -> np.ndarray:
    """Points of the ideal boundary closure(C) & boundary(domain), as chart lifts.

    The ideal boundary of a finitely generated hull is the union of the hulls
    of those generator subsets that lie in a common boundary face; boundary
    generators are always returned, further samples are spread over the
    boundary sub-hulls.
    """
    dom = C.ambient
    if C.whole:
        return dom.boundary_sample(n)
    codes = dom.classify_many(C.lifts)
    B = C.lifts[codes == 1]
    if len(B) == 0:
        raise BoundedSubset("the subset has no ideal points")
    groups = _boundary_groups(dom, B, max_size=min(dom.dim - 1, 4))
    extra = max(0, n - len(B))
    out = [B]
    if groups and extra:
        per = max(1, extra // len(groups))
        rng = np.random.default_rng(settings().seed)
        for g in groups:
            if len(g) == 2:
                t = (np.arange(1, per + 1) / (per + 1))[:, None]
                out.append((1 - t) * B[g[0]] + t * B[g[1]])
            else:
                W = rng.dirichlet(np.ones(len(g)), size=per)
                out.append(W @ B[list(g)])
    pts = np.vstack(out)
    keep = dom.classify_many(pts) == 1
    return pts[keep]


def is_properly_embedded(C: ConvexSubset, B: ConvexSubset) -> bool:
    """B is properly embedded in C iff the ideal boundary of B lies in that of C."""
    if B.whole and not C.whole:
        raise NotASubset("the whole domain is not contained in a proper subset")
    for g in B.generators:
        if not C.hull_contains(g):
            raise NotASubset(f"generator {g!r} of B is not in the closure of C")
    try:
        ideal = ideal_boundary_sample(B, 4 * max(1, B.size))
    except BoundedSubset:
        return True
    dom = C.ambient
    on_boundary = dom.classify_many(ideal) == 1
    return bool(on_boundary.all() and all(C.hull_contains(p) for p in ideal))


def detect_properly_embedded_simplex(domain: ConvexDomain, vertices):
    """Return a `SimplexCandidate` if the vertices span a properly embedded simplex, else None.

    Every proper face of the simplex with at least two vertices must lie in
    the boundary (edges by dyadic refinement, higher faces by their
    barycenters) and the open simplex must lie in the domain.
    """
    S = SimplexCandidate(domain, vertices)
    L = S.lifts
    if len(L) < 2 or np.any(domain.classify_many(L) != 1):
        return None
    for i, j in itertools.combinations(range(len(L)), 2):
        if not segment_in_boundary(domain, L[i], L[j]):
            return None
    for size in range(3, len(L)):
        for sub in itertools.combinations(range(len(L)), size):
            if domain.classify_many([L[list(sub)].mean(axis=0)])[0] != 1:
                return None
    if domain.classify_many([L.mean(axis=0)])[0] != 0:
        return None
    return S


def cluster_ids(coords: np.ndarray, radius: float) -> np.ndarray:
    """Greedy order-preserving clustering: each row gets the index of the first earlier representative within ``radius``."""
    n = len(coords)
    ids = np.full(n, -1, dtype=int)
    if n == 0:
        return ids
    tree = cKDTree(coords)
    for i in range(n):
        if ids[i] >= 0:
            continue
        ids[i] = i
        for j in tree.query_ball_point(coords[i], radius):
            if ids[j] < 0:
                ids[j] = i
    return ids


def face_labels(domain: ConvexDomain, points, resolution: float | None = None) -> list:
    """Hashable labels with equal labels exactly for points in the same open face.

    Singleton faces are identified by clustering the points at ``resolution``
    (chart units), so labels are only comparable within one call.
    """
    resolution = tolerances().limit_merge if resolution is None else resolution
    L = domain.lift(points)
    faces = [domain.face_of(p) for p in L]
    point_rows = [i for i, f in enumerate(faces) if f.kind == "point"]
    labels = [("domain",) if f.kind == "domain" else ("facets",) + tuple(f.signature) for f in faces]
    if point_rows:
        ids = cluster_ids(domain.chart.coords(L[point_rows]), resolution)
        for i, cid in zip(point_rows, ids):
            labels[i] = ("point", int(point_rows[cid]))
    return labels
