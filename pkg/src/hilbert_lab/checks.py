"""Randomized fixtures and check runners shared by the `checks` command and the test suites.

Each runner returns a plain dict with a ``passed`` flag and the numbers
behind it; failing items carry a ``witnesses`` list.
"""
from __future__ import annotations

import numpy as np

from .config import settings, tolerances
from .domain import ConvexDomain, ConvexSubset, Ellipsoid, Membership, detect_properly_embedded_simplex
from .errors import HilbertLabError
from .groups import check_convergence_dynamics, coxeter_relations_residual
from .metric import check_hull_hausdorff_bound, check_segment_hausdorff_bound, check_segment_hausdorff_bounds
from .peripheral import PeripheralFamily, check_projection_observation, closest_point_projection
from .quotient import check_conditions


def random_face_point(dom: ConvexDomain, rng, kind: str):
    """A random point of a random face of the given kind ("interior" or "boundary")."""
    if kind == "interior":
        return dom.sample_interior(1, rng)[0]
    B = dom.boundary_sample(64)
    return B[rng.integers(len(B))] if isinstance(dom, Ellipsoid) else _interior_of_face(dom, B[rng.integers(len(B))], rng)


def _interior_of_face(dom, x, rng):
    ext = dom.face_extremes(dom.face_of(x))
    return rng.dirichlet(np.ones(len(ext))) @ ext


def partner_in_face(dom: ConvexDomain, x, rng):
    """Another random point of the open face of x."""
    face = dom.face_of(x)
    if face.kind == "domain":
        return dom.sample_interior(1, rng)[0]
    if face.kind == "point" or face.dimension == 0:
        return dom.lift([x])[0]
    ext = dom.face_extremes(face)
    return rng.dirichlet(np.ones(len(ext))) @ ext


def random_segment_quadruples(dom: ConvexDomain, n: int, rng):
    """n quadruples (p1, p2, q1, q2) with p_i, q_i in a common face and both open segments in the domain."""
    out = []
    kinds = ("interior", "boundary")
    while len(out) < n:
        p1 = random_face_point(dom, rng, kinds[rng.integers(2)])
        p2 = random_face_point(dom, rng, kinds[rng.integers(2)])
        q1, q2 = partner_in_face(dom, p1, rng), partner_in_face(dom, p2, rng)
        mids = dom.lift([0.5 * (p1 + p2), 0.5 * (q1 + q2)])
        if np.all(dom.classify_many(mids) == 0):
            out.append((p1, p2, q1, q2))
    return out


def random_hull_fixture(dom: ConvexDomain, m: int, rng):
    """(qs, ps, z): m pairs sharing faces, and z in the relative interior of ConvHull(ps)."""
    while True:
        ps = [random_face_point(dom, rng, ("interior", "boundary")[rng.integers(2)]) for _ in range(m)]
        qs = [partner_in_face(dom, p, rng) for p in ps]
        z = dom.lift([np.mean(ps, axis=0)])[0]
        if dom.contains(z) is Membership.INTERIOR and dom.contains(np.mean(qs, axis=0)) is Membership.INTERIOR:
            return qs, ps, z


def _bound_result(name, items):
    bad = [i for i, c in enumerate(items) if not c.ok]
    return {
        "type": name,
        "passed": not bad,
        "count": len(items),
        "max_excess": max(c.lhs - c.rhs for c in items) if items else 0.0,
        "witnesses": [{"index": i, "lhs": items[i].lhs, "rhs": items[i].rhs} for i in bad],
    }


def run_check(scene, spec: dict) -> dict:
    """Run one parsed check item against a scene."""
    dom = scene.domain
    kind = spec["type"]
    if kind == "segment_hausdorff":
        c = check_segment_hausdorff_bound(dom, spec["p1"], spec["p2"], spec["q1"], spec["q2"])
        return _bound_result(kind, [c])
    if kind == "segment_suite":
        rng = np.random.default_rng(spec.get("seed", settings().seed))
        quads = random_segment_quadruples(dom, spec.get("count", 100), rng)
        return _bound_result(kind, check_segment_hausdorff_bounds(dom, quads))
    if kind == "hull_hausdorff":
        return _bound_result(kind, [check_hull_hausdorff_bound(dom, spec["qs"], spec["ps"], spec["z"])])
    if kind == "convergence":
        if "matrices" in spec:
            seq = spec["matrices"]
        else:
            a = np.array(spec["diag_exponents"])
            seq = [np.diag(np.exp(n * a)) for n in range(1, spec.get("terms", 30) + 1)]
        p0 = spec.get("p0", scene.basepoint)
        rep = check_convergence_dynamics(dom, seq, p0)
        return {
            "type": kind,
            "passed": rep.passed,
            "image_in_face_span": rep.image_in_face_span,
            "kernel_misses_domain": rep.kernel_misses_domain,
            "y_in_kernel": rep.y_in_kernel,
            "bounded_approach": rep.bounded_approach,
            "approach_sup": rep.approach_sup,
            "image_in_face": rep.image_in_face,
            "image_onto_face": rep.image_onto_face,
            "witnesses": [] if rep.passed else [{"x": rep.x.coords.tolist(), "y": rep.y.coords.tolist()}],
        }
    if kind == "projection":
        X = scene.subsets[spec["subset"]]
        res = closest_point_projection(dom, X, spec["point"])
        obs = check_projection_observation(dom, X, spec["point"], scene.gens if len(scene.gens) else None)
        return {
            "type": kind,
            "passed": obs.passed,
            "value": res.value,
            "minimizer": dom.chart.coords(dom.lift([res.minimizer.coords]))[0].tolist(),
            "subsegment_defect": obs.subsegment_defect,
            "equivariance_defect": obs.equivariance_defect,
            "witnesses": [] if obs.passed else [{"subsegment_ok": obs.subsegment_ok, "equivariance_ok": obs.equivariance_ok}],
        }
    if kind == "simplex":
        found = detect_properly_embedded_simplex(dom, spec["vertices"]) is not None
        expect = spec.get("expect", True)
        return {"type": kind, "passed": found == expect, "found": found, "expected": expect,
                "witnesses": [] if found == expect else [{"found": found}]}
    if kind == "coxeter_relations":
        if scene.gram is None:
            raise HilbertLabError("coxeter_relations needs Coxeter generators")
        res = coxeter_relations_residual(scene.gram, scene.gens)
        ok = res <= tolerances().relation
        return {"type": kind, "passed": bool(ok), "residual": res, "witnesses": [] if ok else [{"residual": res}]}
    if kind == "conditions":
        fam = None
        if scene.family is not None:
            fam = PeripheralFamily(scene.family["representatives"], scene.gens, scene.family["word_len"], scene.basepoint)
        C = scene.subsets.get("C") or ConvexSubset.whole_domain(dom)
        rep = check_conditions(dom, C, fam, spec.get("r", 0.5), spec.get("D", 4.0), spec.get("samples", 64))
        return {
            "type": kind,
            "passed": rep.cond1_ok and rep.cond2_ok,
            "cond1_ok": rep.cond1_ok,
            "cond2_ok": rep.cond2_ok,
            "boundary_pairs": rep.boundary_pairs,
            "cond2_max_diameter": rep.cond2_max_diameter,
            "witnesses": rep.witnesses,
        }
    raise HilbertLabError(f"unknown check {kind!r}")
