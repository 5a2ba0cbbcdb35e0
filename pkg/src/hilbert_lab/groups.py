"""Finitely generated groups of projective automorphisms acting on a domain.

Words use one letter per generator: ``a, b, c, ...`` for the generators and
the matching upper-case letter for their inverses (involutions have no
separate inverse letter). Orbits are enumerated breadth-first over reduced
words in (length, lexicographic) order; words whose product matrix was
already seen are dropped, so every group element appears once under its
first word.
"""
from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .config import parallel_map, settings, tolerances
from .domain import ConvexDomain, ConvexSubset, Ellipsoid, _vec
from .errors import (
    AxisMissesDomain,
    BadSignature,
    DomainNotPreserved,
    EmptyLimitSet,
    NotConverged,
    NotInterior,
    NotProximal,
    PingPongFails,
    RelationViolated,
    WordLimitExceeded,
)
from .metric import _golden, hilbert_distance, pair_distances
from .projective import EndomorphismClass, HomogeneousPoint, ProjectiveMap, limit_of_maps


def _normalize(M: np.ndarray) -> np.ndarray:
    """Frobenius-normalize a stack of matrices (no sign convention)."""
    n = np.linalg.norm(M.reshape(M.shape[0], -1), axis=1)
    return M / n[:, None, None]


def _canonical_stack(M: np.ndarray) -> np.ndarray:
    """Canonical representatives (unit norm, first significant entry positive) of stacked matrices."""
    M = _normalize(M)
    flat = M.reshape(M.shape[0], -1)
    big = np.abs(flat) > tolerances().alg
    lead = np.argmax(big, axis=1)
    sign = np.sign(flat[np.arange(len(flat)), lead])
    sign[sign == 0] = 1.0
    return M * sign[:, None, None]


def _as_matrix(g) -> np.ndarray:
    return np.asarray(getattr(g, "matrix", g), dtype=float)


class GeneratorSet:
    """Generators of a subgroup of Aut(domain), validated to preserve the domain."""

    def __init__(self, generators, domain: ConvexDomain, validate: bool = True, samples: int = 64):
        self.domain = domain
        self.generators = tuple(g if isinstance(g, ProjectiveMap) else ProjectiveMap(g) for g in generators)
        if len(self.generators) > 26:
            raise ValueError("at most 26 generators are supported")
        for g in self.generators:
            if g.dim != domain.dim:
                raise DomainNotPreserved("generator size does not match the domain dimension")
        self.involution = tuple(
            (g @ g).isclose(ProjectiveMap.identity(domain.dim), tolerances().relation) for g in self.generators
        )
        letters, mats = [], []
        for i, g in enumerate(self.generators):
            letters.append(string.ascii_lowercase[i])
            mats.append(g.matrix)
            if not self.involution[i]:
                letters.append(string.ascii_uppercase[i])
                mats.append(g.inverse().matrix)
        self.letters = tuple(letters)
        self.letter_matrices = np.array(mats).reshape(len(mats), domain.dim, domain.dim)
        if validate:
            self._validate(samples)

    @classmethod
    def trivial(cls, domain: ConvexDomain) -> "GeneratorSet":
        return cls([], domain)

    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        return f"GeneratorSet({len(self)} generators on {self.domain!r})"

    def inverse_letter(self, letter: str) -> str:
        i = string.ascii_lowercase.index(letter.lower())
        return letter if self.involution[i] else letter.swapcase()

    def word_matrix(self, word: str) -> np.ndarray:
        M = np.eye(self.domain.dim)
        for ch in word:
            M = M @ self.letter_matrices[self.letters.index(ch)]
            M /= np.linalg.norm(M)
        return M

    def element(self, word: str) -> "GroupElement":
        return GroupElement(word, ProjectiveMap(self.word_matrix(word), check=False))

    def _validate(self, samples: int):
        dom = self.domain
        rng = np.random.default_rng(settings().seed)
        inner = dom.sample_interior(samples, rng)
        outer = dom.boundary_sample(samples)
        for letter, M in zip(self.letters, self.letter_matrices):
            if not np.all(dom.strictly_inside(inner @ M.T)):
                raise DomainNotPreserved(f"generator {letter!r} moves interior points out of the domain")
            if not np.all(dom.classify_many(outer @ M.T) == 1):
                raise DomainNotPreserved(f"generator {letter!r} does not preserve the boundary")


@dataclass(frozen=True)
class GroupElement:
    word: str
    matrix: ProjectiveMap

    def __len__(self):
        return len(self.word)


@dataclass
class OrbitResult:
    elements: list
    orbit_points: np.ndarray  # chart lifts of elements[i] . basepoint
    word_length_histogram: dict
    basepoint: HomogeneousPoint
    matrices: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.elements)


def _keys(C: np.ndarray, grid: float):
    """Primary quantization keys plus alternates for entries sitting on a cell boundary."""
    scaled = C.reshape(len(C), -1) / grid
    base = np.round(scaled).astype(np.int64)
    frac = scaled - np.floor(scaled)
    edgy = np.abs(frac - 0.5) < 1e-3
    out = []
    for row, e, s in zip(base, edgy, scaled):
        if not e.any():
            out.append([row.tobytes()])
            continue
        idx = np.flatnonzero(e)
        alts = []
        for choice in itertools.product((0, 1), repeat=min(len(idx), 6)):
            r = row.copy()
            for k, c in zip(idx, choice):
                r[k] = int(np.floor(s[k])) + c
            alts.append(r.tobytes())
        out.append(alts)
    return out


def _expand(args):
    parents, letters, mats = args
    P = parents[:, None] @ mats[letters][:, None]
    P = P[:, 0]
    return _normalize(P)


def enumerate_orbit(gens: GeneratorSet, basepoint, max_word_len: int) -> OrbitResult:
    """Breadth-first enumeration of distinct group elements up to a word length."""
    cfg = settings()
    if max_word_len > cfg.word_cap:
        raise WordLimitExceeded(f"word length {max_word_len} exceeds the cap {cfg.word_cap}")
    if max_word_len < 0:
        raise ValueError("word length must be nonnegative")
    dom = gens.domain
    base = dom.lift([_vec(basepoint)])[0]
    if np.any(np.isnan(base)) or not dom.strictly_inside([base])[0]:
        raise NotInterior("basepoint must lie in the domain")
    d = dom.dim
    grid = tolerances().dedup
    words = [""]
    mats = [np.eye(d) / np.sqrt(d)]
    seen = {}
    for k in _keys(_canonical_stack(np.array(mats)), grid)[0]:
        seen[k] = 0
    frontier = [0]
    nletters = len(gens.letters)
    inv = [gens.letters.index(gens.inverse_letter(ch)) for ch in gens.letters]
    for length in range(1, max_word_len + 1):
        cand_parent, cand_letter = [], []
        for idx in frontier:
            w = words[idx]
            last = gens.letters.index(w[-1]) if w else None
            for j in range(nletters):
                if last is not None and inv[last] == j:
                    continue
                cand_parent.append(idx)
                cand_letter.append(j)
        if not cand_parent:
            break
        if len(words) + len(cand_parent) > cfg.max_elements * 4:
            raise WordLimitExceeded("orbit enumeration exceeds the memory guard")
        parents = np.array(mats)[cand_parent]
        letters = np.array(cand_letter)
        chunks = np.array_split(np.arange(len(letters)), max(1, min(len(letters) // 4096, 64)))
        pieces = parallel_map(_expand, [(parents[c], letters[c], gens.letter_matrices) for c in chunks])
        products = np.concatenate(pieces)
        keys = _keys(_canonical_stack(products), grid)
        new_frontier = []
        for p, j, M, ks in zip(cand_parent, cand_letter, products, keys):
            if any(k in seen for k in ks):
                continue
            words.append(words[p] + gens.letters[j])
            mats.append(M)
            seen[ks[0]] = len(words) - 1
            new_frontier.append(len(words) - 1)
            if len(words) > cfg.max_elements:
                raise WordLimitExceeded(f"orbit enumeration exceeds {cfg.max_elements} elements")
        frontier = new_frontier
    M = _canonical_stack(np.array(mats))
    elements = [GroupElement(w, ProjectiveMap(m, check=False)) for w, m in zip(words, M)]
    pts = dom.lift(M @ base)
    hist = {}
    for w in words:
        hist[len(w)] = hist.get(len(w), 0) + 1
    return OrbitResult(elements, pts, hist, HomogeneousPoint(base), M)


def translation_distance(dom: ConvexDomain, g, p) -> float:
    """d(p, g p)."""
    M = _as_matrix(g)
    return hilbert_distance(dom, p, M @ _vec(p))


def _top_eigen(M: np.ndarray):
    """Batched leading eigenvector and gap |l1/l2|; nan gap when the leading eigenvalue is not real and simple."""
    w, V = np.linalg.eig(M)
    order = np.argsort(-np.abs(w), axis=-1)
    w = np.take_along_axis(w, order, axis=-1)
    lead = np.take_along_axis(V, order[:, None, :], axis=-1)[:, :, 0]
    a1, a2 = np.abs(w[:, 0]), np.abs(w[:, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        gap = a1 / a2
    real = np.abs(w[:, 0].imag) <= tolerances().alg * a1
    gap = np.where(real, gap, np.nan)
    vec = np.real(lead * np.exp(-1j * np.angle(lead[np.arange(len(lead)), np.argmax(np.abs(lead), axis=1)]))[:, None])
    return vec, gap


def attracting_fixed_point(g):
    """(attracting fixed point, spectral gap |l1/l2|) of a proximal element."""
    M = _as_matrix(g)
    vec, gap = _top_eigen(M[None])
    if not np.isfinite(gap[0]) and not np.isinf(gap[0]):
        raise NotProximal("leading eigenvalue is not real")
    if not gap[0] > 1.0 + tolerances().prox:
        raise NotProximal(f"spectral gap {gap[0]:.6g} too small")
    return HomogeneousPoint(vec[0]), float(gap[0])


def axis_of(dom: ConvexDomain, g) -> ConvexSubset:
    """The segment between the repelling and attracting fixed points of g."""
    M = _as_matrix(g)
    plus, _ = attracting_fixed_point(M)
    minus, _ = attracting_fixed_point(np.linalg.inv(M))
    L = dom.lift([plus.coords, minus.coords])
    if np.any(np.isnan(L)) or np.any(dom.classify_many(L) == 2):
        raise AxisMissesDomain("fixed points lie outside the closed domain")
    on = dom.classify_many(L) == 1
    L[on] = dom.radial_boundary(L[on])
    mid = 0.5 * (L[0] + L[1])
    if dom.classify_many([mid])[0] != 0:
        raise AxisMissesDomain("the line through the fixed points misses the domain")
    image = dom.lift([M @ mid])[0]
    if np.linalg.svd(np.stack([L[0], L[1], image]), compute_uv=False)[-1] > tolerances().geo * 10:
        raise AxisMissesDomain("the axis is not invariant")
    return ConvexSubset(dom, [HomogeneousPoint(L[0]), HomogeneousPoint(L[1])], mid)


@dataclass
class LimitSetApprox:
    points: np.ndarray  # chart lifts on the boundary
    provenance: list  # "AttractingEigenvector" | "OrbitAccumulation"
    gaps: list  # spectral gap for eigenvector points, None otherwise
    words: list

    def __len__(self):
        return len(self.points)

    def as_points(self):
        return [HomogeneousPoint(p) for p in self.points]


def _dedupe(points: np.ndarray, radius: float) -> np.ndarray:
    """Indices of a greedy (order-preserving) radius-net of ``points``."""
    if len(points) == 0:
        return np.array([], dtype=int)
    tree = cKDTree(points)
    kept = np.zeros(len(points), dtype=bool)
    for i in range(len(points)):
        near = tree.query_ball_point(points[i], radius)
        if not any(kept[j] for j in near):
            kept[i] = True
    return np.flatnonzero(kept)


def limit_set_approx(gens: GeneratorSet, basepoint, max_word_len: int, orbit: OrbitResult | None = None) -> LimitSetApprox:
    """Attracting fixed points of proximal elements plus orbit points accumulating on the boundary."""
    dom = gens.domain
    orbit = enumerate_orbit(gens, basepoint, max_word_len) if orbit is None else orbit
    tol = tolerances()
    pts, prov, gaps, words = [], [], [], []
    if len(orbit) > 1:
        vec, gap = _top_eigen(orbit.matrices[1:])
        ok = np.isfinite(gap) & (gap > 1.0 + tol.prox) | np.isinf(gap)
        L = dom.lift(vec[ok])
        good = ~np.isnan(L).any(axis=1)
        L = L[good]
        idx = np.flatnonzero(ok)[good]
        near = dom.chart_gap(L) < tol.acc if len(L) else np.zeros(0, bool)
        snapped = dom.radial_boundary(L[near]) if near.any() else np.empty((0, dom.dim))
        for p, i in zip(snapped, idx[near]):
            pts.append(p)
            prov.append("AttractingEigenvector")
            gaps.append(float(gap[i]))
            words.append(orbit.elements[i + 1].word)
    O = orbit.orbit_points
    acc = dom.chart_gap(O) < tol.acc
    if acc.any():
        for p, i in zip(dom.radial_boundary(O[acc]), np.flatnonzero(acc)):
            pts.append(p)
            prov.append("OrbitAccumulation")
            gaps.append(None)
            words.append(orbit.elements[i].word)
    if not pts:
        return LimitSetApprox(np.empty((0, dom.dim)), [], [], [])
    P = np.array(pts)
    keep = _dedupe(dom.chart.coords(P), tol.limit_merge)
    P = P[keep]
    return LimitSetApprox(P, [prov[i] for i in keep], [gaps[i] for i in keep], [words[i] for i in keep])


def convex_core_approx(gens: GeneratorSet, max_word_len: int, basepoint=None) -> ConvexSubset:
    """Convex hull of the approximate limit set."""
    base = gens.domain.center if basepoint is None else basepoint
    limit = limit_set_approx(gens, base, max_word_len)
    if len(limit) == 0:
        raise EmptyLimitSet("no limit points found")
    return ConvexSubset(gens.domain, limit.as_points())


# --------------------------------------------------------------------------
# convergence dynamics


@dataclass
class ConvergenceReport:
    x: HomogeneousPoint
    y: HomogeneousPoint
    T: EndomorphismClass
    image_in_face_span: bool
    kernel_misses_domain: bool
    y_in_kernel: bool
    bounded_approach: bool
    approach_sup: float
    image_in_face: bool | None
    image_onto_face: bool | None

    @property
    def passed(self) -> bool:
        core = self.image_in_face_span and self.kernel_misses_domain and self.y_in_kernel
        if self.bounded_approach:
            return bool(core and self.image_in_face and self.image_onto_face)
        return bool(core)


def _orbit_limit(dom, mats, p0):
    pts = dom.lift(np.array(mats) @ p0)
    last = pts[-1]
    if np.any(np.isnan(last)) or not dom.chart_gap([last])[0] < tolerances().acc:
        raise NotConverged("orbit of the basepoint does not reach the boundary")
    return dom.radial_boundary([last])[0], pts


def _ray_distance(dom, Z, P0, X, depth=30.0):
    """min over the geodesic ray [P0, X) of d(z, .), for each row z, parametrized by Hilbert depth."""
    D = X - P0
    ta, tb = dom.chord(P0[None], D[None])

    def ray(delta):
        em1 = np.expm1(2.0 * delta)
        t = tb * (-ta) * em1 / (tb + (em1 + 1.0) * (-ta))
        return P0 + t[:, None] * D

    n = len(Z)
    _, vals = _golden(lambda s: pair_distances(dom, Z, ray(s)), np.zeros(n), np.full(n, depth))
    return vals


def check_convergence_dynamics(dom: ConvexDomain, sequence, p0, bound: float = 3.0, samples: int = 400) -> ConvergenceReport:
    """Check the structure of a limit T of a divergent sequence of automorphisms.

    (i) image(T) lies in the span of the open face of x = lim g_n p0,
    (ii) P(ker T) misses the domain, (iii) y = lim g_n^{-1} p0 lies in P(ker T),
    and, when g_n p0 stays within ``bound`` of the ray [p0, x),
    (iv) T maps the domain into F(x) and onto it up to chart resolution 0.05.
    """
    mats = [_as_matrix(g) for g in sequence]
    T = limit_of_maps(mats)
    P0 = dom.lift([_vec(p0)])[0]
    X, fwd = _orbit_limit(dom, mats, P0)
    # inverses lose all precision once the condition number approaches 1/eps
    invertible = [np.linalg.inv(m) for m in mats if np.linalg.cond(m) < 1e12]
    if not invertible:
        raise NotConverged("no term of the sequence is safely invertible")
    Y, _ = _orbit_limit(dom, invertible, P0)
    alg = tolerances().alg
    face = dom.face_of(X)
    span = face.span_basis
    resid = T.image_basis - span @ (np.linalg.pinv(span) @ T.image_basis)
    image_ok = bool(np.linalg.norm(resid) <= max(alg, 1e-8))

    rng = np.random.default_rng(settings().seed)
    K = T.kernel_basis
    if K.shape[1] == 0:
        kernel_ok = True
    else:
        W = rng.normal(size=(samples, K.shape[1]))
        kv = W @ K.T
        kernel_ok = bool(not np.any(dom.classify_many(np.vstack([kv, -kv])) == 0))
    y_ok = T.in_kernel(Y, tol=1e-7)

    # distance from g_n p0 to the ray [p0, x)
    resolvable = dom.strictly_inside(fwd) & (dom.chart_gap(fwd) > 1e-10)
    sup = float(np.max(_ray_distance(dom, fwd[resolvable], P0, X))) if resolvable.any() else 0.0
    bounded = bool(np.isfinite(sup) and sup <= bound)
    in_face = onto = None
    if bounded:
        inner = dom.sample_interior(samples, rng)
        imgs = inner @ T.matrix.T
        in_face = all(dom.face_of(v) == face for v in imgs)
        if face.kind == "point" or face.dimension == 0:
            onto = bool(in_face)
        else:
            ext = dom.face_extremes(face)
            targets = rng.dirichlet(np.ones(len(ext)), size=200) @ ext
            got = dom.chart.coords(dom.lift(imgs))
            tree = cKDTree(got)
            dist, _ = tree.query(dom.chart.coords(targets))
            onto = bool(np.all(dist <= 0.05))
    return ConvergenceReport(
        HomogeneousPoint(X), HomogeneousPoint(Y), T, image_ok, kernel_ok, y_ok, bounded, sup, in_face, onto
    )


# --------------------------------------------------------------------------
# built-in example groups


def boost_matrix(t: float, angle: float = 0.0) -> np.ndarray:
    """Hyperbolic translation of length t along the diameter at ``angle`` in the Klein disk."""
    c, s = np.cos(angle), np.sin(angle)
    R = np.array([[1.0, 0, 0], [0, c, -s], [0, s, c]])
    A = np.array([[np.cosh(t), np.sinh(t), 0.0], [np.sinh(t), np.cosh(t), 0.0], [0.0, 0.0, 1.0]])
    return R @ A @ R.T


def boost(t: float, angle: float = 0.0, domain: ConvexDomain | None = None) -> GeneratorSet:
    dom = Ellipsoid.ball(2) if domain is None else domain
    return GeneratorSet([boost_matrix(t, angle)], dom)


def schottky_threshold(angle: float) -> float:
    """Smallest translation length for which two boosts with axes at ``angle`` play ping-pong."""
    theta = min(angle % np.pi, np.pi - angle % np.pi)
    c = np.cos(theta / 2.0)
    return float("inf") if c >= 1.0 else float(2.0 * np.arctanh(c))


def _free_up_to(letter_mats: np.ndarray, inverse_of: list, length: int, tol: float) -> bool:
    d = letter_mats.shape[1]
    ident = np.eye(d) / np.sqrt(d)
    frontier = [(np.eye(d), -1)]
    for _ in range(length):
        nxt = []
        for M, last in frontier:
            for j in range(len(letter_mats)):
                if last >= 0 and inverse_of[last] == j:
                    continue
                P = M @ letter_mats[j]
                P /= np.linalg.norm(P)
                if min(np.linalg.norm(P - ident), np.linalg.norm(P + ident)) <= tol:
                    return False
                nxt.append((P, j))
        frontier = nxt
    return True


def schottky_pso21(t: float, angle: float) -> GeneratorSet:
    """Two boosts of length t whose axes cross at the center of the Klein disk at ``angle``."""
    if not t > schottky_threshold(angle):
        raise PingPongFails(f"t = {t} does not exceed the ping-pong threshold {schottky_threshold(angle):.6g}")
    gens = GeneratorSet([boost_matrix(t), boost_matrix(t, angle)], Ellipsoid.ball(2))
    inv = [gens.letters.index(gens.inverse_letter(ch)) for ch in gens.letters]
    if not _free_up_to(gens.letter_matrices, inv, 6, tolerances().free_check):
        raise PingPongFails("a nontrivial reduced word of length <= 6 is the identity")
    return gens


def coxeter_gram(m) -> np.ndarray:
    """Gram matrix G_ij = -cos(pi / m_ij) from a symmetric matrix of orders (m_ii ignored; inf allowed)."""
    m = np.asarray(m, dtype=float)
    G = -np.cos(np.pi / m)
    G[np.isinf(m)] = -1.0
    np.fill_diagonal(G, 1.0)
    return G


def triangle_group_gram(p: int, q: int, r: int) -> np.ndarray:
    """Gram matrix of the (p, q, r) triangle reflection group (m_12 = p, m_13 = q, m_23 = r)."""
    return coxeter_gram([[1, p, q], [p, 1, r], [q, r, 1]])


def coxeter_generators(gram, reflections=None):
    """Reflections in the faces of a Coxeter simplex, acting on the projectivized cone of -gram.

    Returns ``(GeneratorSet, Ellipsoid)``. ``reflections`` optionally selects a
    subset of the mirrors.
    """
    G = np.array(gram, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or not np.allclose(G, G.T):
        raise BadSignature("Gram matrix must be square and symmetric")
    w = np.linalg.eigvalsh(G)
    n = G.shape[0]
    if not (np.sum(w < -1e-12) == 1 and np.sum(w > 1e-12) == n - 1):
        raise BadSignature("Gram matrix does not have signature (d-1, 1); no invariant ellipsoid")
    dom = Ellipsoid(-G)
    idx = range(n) if reflections is None else list(reflections)
    mats = []
    for i in idx:
        e = np.zeros(n)
        e[i] = 1.0
        mats.append(np.eye(n) - 2.0 * np.outer(e, G[i]) / G[i, i])
    relation = tolerances().relation
    for a in range(len(mats)):
        if np.linalg.norm(mats[a] @ mats[a] - np.eye(n)) > relation:
            raise RelationViolated(f"reflection {a} is not an involution")
    idx = list(idx)
    for a, b in itertools.combinations(range(len(mats)), 2):
        c = -G[idx[a], idx[b]]
        if c >= 1.0:
            continue
        m = np.pi / np.arccos(c)
        if abs(m - round(m)) > 1e-6:
            continue
        P = np.linalg.matrix_power(mats[a] @ mats[b], int(round(m)))
        if np.linalg.norm(P - np.eye(n)) > relation:
            raise RelationViolated(f"(s{a} s{b})^{int(round(m))} differs from the identity")
    return GeneratorSet(mats, dom), dom


def projective_identity_defect(M) -> float:
    """Distance of [M] from [Id], measured after scaling both to the size of Id."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    U = M / np.linalg.norm(M) * np.sqrt(n)
    return float(min(np.linalg.norm(U - np.eye(n)), np.linalg.norm(U + np.eye(n))))


def coxeter_relations_residual(gram, gens: GeneratorSet) -> float:
    """Largest projective deviation of s_i^2 and (s_i s_j)^{m_ij} from the identity."""
    G = np.asarray(gram, dtype=float)
    mats = [g.matrix for g in gens.generators]
    worst = max(projective_identity_defect(m @ m) for m in mats)
    for a, b in itertools.combinations(range(len(mats)), 2):
        c = -G[a, b]
        if c >= 1.0:
            continue
        m = int(round(np.pi / np.arccos(c)))
        worst = max(worst, projective_identity_defect(np.linalg.matrix_power(mats[a] @ mats[b], m)))
    return worst
