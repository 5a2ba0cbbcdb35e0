"""Projective linear algebra: points, maps, charts, cross ratios and limits of maps.

Points of P(R^d) and elements of PGL_d(R) / P(End(R^d)) are stored through a
canonical representative: unit Euclidean (resp. Frobenius) norm and the first
entry that is not negligibly small made positive. All objects are immutable.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import null_space

from .config import tolerances
from .errors import (
    DegenerateConfiguration,
    HilbertLabError,
    KernelPoint,
    NotCollinear,
    NotConverged,
    NotInvertible,
)

_EPS = np.finfo(float).eps


def canonicalize(v) -> np.ndarray:
    """Canonical representative of the projective class of ``v``.

    Idempotent bit-for-bit: an already canonical array is returned unchanged.
    """
    v = np.array(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise HilbertLabError("non-finite homogeneous coordinates")
    n = np.linalg.norm(v)
    if n == 0.0:
        raise HilbertLabError("the zero vector has no projective class")
    if abs(n - 1.0) > 4 * _EPS:
        v = v / n
    flat = v.reshape(-1)
    big = np.flatnonzero(np.abs(flat) > tolerances().alg)
    lead = big[0] if big.size else int(np.argmax(np.abs(flat)))
    if flat[lead] < 0:
        v = -v
    return v


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class HomogeneousPoint:
    """A point [v] of P(R^d)."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        object.__setattr__(self, "coords", _frozen(canonicalize(coords)))

    def __setattr__(self, name, value):
        raise AttributeError("HomogeneousPoint is immutable")

    @classmethod
    def from_chart(cls, xs) -> "HomogeneousPoint":
        """The point [1 : x_1 : ... : x_n] of the standard chart x_0 = 1."""
        return cls(np.concatenate([[1.0], np.asarray(xs, dtype=float)]))

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def chart(self) -> np.ndarray:
        """Coordinates in the standard chart x_0 = 1."""
        if abs(self.coords[0]) < tolerances().alg:
            raise HilbertLabError("point lies on the hyperplane at infinity of the standard chart")
        return self.coords[1:] / self.coords[0]

    def distance(self, other: "HomogeneousPoint") -> float:
        return angular_distance(self, other)

    def isclose(self, other, tol=None) -> bool:
        tol = tolerances().alg if tol is None else tol
        o = as_point(other).coords
        return bool(min(np.linalg.norm(self.coords - o), np.linalg.norm(self.coords + o)) <= tol)

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPoint):
            return NotImplemented
        return self.dim == other.dim and self.isclose(other)

    __hash__ = None

    def __repr__(self):
        body = ":".join(f"{c:.6g}" for c in self.coords)
        return f"HomogeneousPoint([{body}])"


def as_point(p) -> HomogeneousPoint:
    return p if isinstance(p, HomogeneousPoint) else HomogeneousPoint(p)


def angular_distance(p, q) -> float:
    """Angle between the lines [p] and [q]; a Riemannian distance on P(R^d)."""
    u, v = as_point(p).coords, as_point(q).coords
    chord = min(np.linalg.norm(u - v), np.linalg.norm(u + v))
    return float(2.0 * np.arcsin(min(1.0, chord / 2.0)))


class ProjectiveMap:
    """An element [g] of PGL_d(R)."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, check: bool = True):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise HilbertLabError("projective maps need a square matrix")
        m = canonicalize(m)
        if check:
            s = np.linalg.svd(m, compute_uv=False)
            if s[-1] <= tolerances().alg * s[0]:
                raise NotInvertible(f"matrix is singular (condition ratio {s[-1] / s[0]:.3g})")
        object.__setattr__(self, "matrix", _frozen(m))

    def __setattr__(self, name, value):
        raise AttributeError("ProjectiveMap is immutable")

    @classmethod
    def identity(cls, d: int) -> "ProjectiveMap":
        return cls(np.eye(d))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, p) -> HomogeneousPoint:
        return HomogeneousPoint(self.matrix @ as_point(p).coords)

    def apply_many(self, vs: np.ndarray) -> np.ndarray:
        """Apply to rows of ``vs`` (raw lifts, not canonicalized)."""
        return np.asarray(vs, dtype=float) @ self.matrix.T

    def __matmul__(self, other: "ProjectiveMap") -> "ProjectiveMap":
        return ProjectiveMap(self.matrix @ other.matrix, check=False)

    def inverse(self) -> "ProjectiveMap":
        return ProjectiveMap(np.linalg.inv(self.matrix), check=False)

    def isclose(self, other: "ProjectiveMap", tol=None) -> bool:
        tol = tolerances().alg if tol is None else tol
        a, b = self.matrix, other.matrix
        return bool(min(np.linalg.norm(a - b), np.linalg.norm(a + b)) <= tol)

    def __eq__(self, other):
        if not isinstance(other, ProjectiveMap):
            return NotImplemented
        return self.dim == other.dim and self.isclose(other)

    __hash__ = None

    def __repr__(self):
        return f"ProjectiveMap({np.array2string(self.matrix, precision=4)})"


class EndomorphismClass:
    """A point [T] of P(End(R^d)); T may be singular.

    Singular values below ``alg * sigma_1`` are treated as zero, so the stored
    matrix, its kernel and its image are mutually consistent.
    """

    __slots__ = ("matrix", "kernel_basis", "image_basis")

    def __init__(self, matrix):
        m = canonicalize(np.array(matrix, dtype=float))
        u, s, vt = np.linalg.svd(m)
        rank = int(np.sum(s > tolerances().alg * s[0]))
        s = np.where(np.arange(s.size) < rank, s, 0.0)
        m = canonicalize((u * s) @ vt)
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "image_basis", _frozen(u[:, :rank]))
        object.__setattr__(self, "kernel_basis", _frozen(vt[rank:].T))

    def __setattr__(self, name, value):
        raise AttributeError("EndomorphismClass is immutable")

    @property
    def rank(self) -> int:
        return self.image_basis.shape[1]

    def in_kernel(self, p, tol=None) -> bool:
        tol = tolerances().alg if tol is None else tol
        v = as_point(p).coords
        return bool(np.linalg.norm(self.matrix @ v) <= tol * np.linalg.norm(self.matrix, 2))

    def __repr__(self):
        return f"EndomorphismClass(rank={self.rank}, {np.array2string(self.matrix, precision=4)})"


class AffineChart:
    """The affine chart {x : covector . x = 1} with an orthonormal frame of its directions."""

    __slots__ = ("covector", "origin", "frame")

    def __init__(self, covector):
        c = np.array(covector, dtype=float)
        n = np.linalg.norm(c)
        if n == 0.0:
            raise HilbertLabError("chart covector must be nonzero")
        c = c / n
        e0 = np.zeros_like(c)
        e0[0] = 1.0
        if np.allclose(c, e0, atol=1e-14):
            frame = np.eye(c.size)[:, 1:]
        else:
            frame = null_space(c[None, :])
        object.__setattr__(self, "covector", _frozen(c))
        object.__setattr__(self, "origin", _frozen(c.copy()))
        object.__setattr__(self, "frame", _frozen(frame))

    def __setattr__(self, name, value):
        raise AttributeError("AffineChart is immutable")

    def lift(self, vs) -> np.ndarray:
        """Scale rows of ``vs`` onto the affine hyperplane covector . x = 1."""
        vs = np.asarray(vs, dtype=float)
        return vs / (vs @ self.covector)[..., None]

    def contains(self, p, margin=0.0) -> bool:
        v = as_point(p).coords
        return bool(abs(v @ self.covector) > margin)

    def coords(self, vs) -> np.ndarray:
        """Coordinates of the lifted rows in the chart frame."""
        return (self.lift(vs) - self.origin) @ self.frame

    def from_coords(self, ys) -> np.ndarray:
        return self.origin + np.asarray(ys, dtype=float) @ self.frame.T


def _collinear_ratio(vs: np.ndarray) -> float:
    s = np.linalg.svd(np.asarray(vs, dtype=float), compute_uv=False)
    return float(s[2] / s[0]) if s.size > 2 else 0.0


def cross_ratio(a, x, y, b) -> float:
    """[a, x, y, b] = |x - b||y - a| / (|x - a||y - b|) for collinear points.

    Computed chart-free from coordinates in the basis (a, b) of the plane the
    four points span; equals the affine expression in any chart containing them.
    """
    pts = [as_point(p).coords for p in (a, x, y, b)]
    if _collinear_ratio(np.stack(pts)) >= tolerances().collinear:
        raise NotCollinear("the four points do not lie on a projective line")
    va, vx, vy, vb = pts
    basis = np.stack([va, vb], axis=1)
    if np.linalg.svd(basis, compute_uv=False)[1] < tolerances().alg:
        raise DegenerateConfiguration("a and b coincide")
    (ax, bx), (ay, by) = np.linalg.lstsq(basis, np.stack([vx, vy], axis=1), rcond=None)[0].T
    if abs(bx) < tolerances().alg or abs(ay) < tolerances().alg:
        raise DegenerateConfiguration("x coincides with a or y coincides with b")
    return float(abs(ax * by) / abs(bx * ay))


def limit_of_maps(sequence) -> EndomorphismClass:
    """Limit in P(End(R^d)) of a sequence of projective maps (or matrices).

    Requires the last successive difference of canonical matrices to be below
    the Cauchy threshold ``conv``.
    """
    mats = [canonicalize(g.matrix if isinstance(g, ProjectiveMap) else g) for g in sequence]
    if not mats:
        raise NotConverged("empty sequence")
    if len(mats) == 1:
        return EndomorphismClass(mats[0])
    last_step = np.linalg.norm(mats[-1] - mats[-2])
    if last_step >= tolerances().conv:
        raise NotConverged(f"successive difference {last_step:.3g} exceeds {tolerances().conv:g}")
    return EndomorphismClass(mats[-1])


def apply_endo(T: EndomorphismClass, p) -> HomogeneousPoint:
    """The induced map P(R^d) - P(ker T) -> P(R^d)."""
    if T.in_kernel(p):
        raise KernelPoint(f"{as_point(p)!r} lies in P(ker T)")
    return HomogeneousPoint(T.matrix @ as_point(p).coords)
