"""JSON scene files: domain, generators, points, subsets, family and command parameters.

A scene document looks like::

    {
      "schema": 1,
      "domain": {"ellipsoid": {"form": [[1, 0, 0], [0, -1, 0], [0, 0, -1]]}},
      "generators": {"schottky_pso21": {"t": 2.0, "angle": 1.5707963267948966}},
      "points": [[0, 0], [0.5, 0]],
      "family": {"representatives": [{"axis": "abAB"}], "word_len": 6},
      "parameters": {"word_len": 3, "r": 0.5, "window": 6.0}
    }

Points with d - 1 entries are chart coordinates of the domain; points with
d entries are homogeneous coordinates. Every error names the JSON path of
the offending value.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

from .config import Settings, Tolerances
from .domain import ConvexDomain, ConvexSubset, Ellipsoid, Polytope, Simplex
from .errors import HilbertLabError, ParseError, ValidationError
from .groups import GeneratorSet, axis_of, boost_matrix, coxeter_generators, coxeter_gram, schottky_pso21, triangle_group_gram
from .projective import HomogeneousPoint

SCHEMA_VERSION = 1

_TOP_KEYS = {"schema", "domain", "generators", "basepoint", "points", "subsets", "family", "parameters", "tolerances", "checks", "overlays"}
_PARAM_KEYS = {"word_len", "r", "D", "window", "seed", "samples", "family_word_len"}
_OVERLAYS = {"orbit", "limitset", "family", "quotient"}
_CHECK_KEYS = {
    "segment_hausdorff": {"p1", "p2", "q1", "q2"},
    "segment_suite": {"count", "seed"},
    "hull_hausdorff": {"qs", "ps", "z"},
    "convergence": {"matrices", "diag_exponents", "terms", "p0"},
    "projection": {"subset", "point"},
    "simplex": {"vertices", "expect"},
    "coxeter_relations": set(),
    "conditions": {"r", "D", "samples"},
}


@dataclass
class Scene:
    document: dict
    domain: ConvexDomain
    gens: GeneratorSet
    basepoint: HomogeneousPoint
    points: list = field(default_factory=list)
    subsets: dict = field(default_factory=dict)
    family: dict | None = None  # {"representatives": [ConvexSubset], "word_len": int}
    parameters: dict = field(default_factory=dict)
    overrides: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    overlays: list = field(default_factory=list)
    gram: np.ndarray | None = None


def _matrix(value, path, size=None):
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(path, "expected a matrix of numbers") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ParseError(path, "expected a square matrix")
    if size is not None and M.shape[0] != size:
        raise ValidationError(path, f"expected a {size}x{size} matrix")
    if not np.all(np.isfinite(M)):
        raise ValidationError(path, "matrix entries must be finite")
    return M


def _number(value, path, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(path, "expected a number")
    if kind is int and float(value) != int(value):
        raise ParseError(path, "expected an integer")
    return kind(value)


def _object(value, path, allowed):
    if not isinstance(value, dict):
        raise ParseError(path, "expected an object")
    extra = sorted(set(value) - set(allowed))
    if extra:
        raise ParseError(f"{path}.{extra[0]}", "unknown key")
    return value


def _single(value, path, allowed):
    _object(value, path, allowed)
    if len(value) != 1:
        raise ParseError(path, f"expected exactly one of {sorted(allowed)}")
    (name, body), = value.items()
    return name, body


def _point(value, path, dom: ConvexDomain) -> HomogeneousPoint:
    try:
        v = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(path, "expected a list of numbers") from None
    if v.ndim != 1:
        raise ParseError(path, "expected a flat list of numbers")
    if len(v) == dom.dim - 1:
        v = dom.chart.from_coords(v)
    elif len(v) != dom.dim:
        raise ValidationError(path, f"points need {dom.dim - 1} chart or {dom.dim} homogeneous coordinates")
    try:
        return HomogeneousPoint(v)
    except HilbertLabError as exc:
        raise ValidationError(path, str(exc)) from None


def _domain(value, path):
    name, body = _single(value, path, {"ellipsoid", "polytope", "simplex"})
    sub = f"{path}.{name}"
    try:
        if name == "ellipsoid":
            _object(body, sub, {"form"})
            return Ellipsoid(_matrix(body.get("form"), f"{sub}.form"))
        _object(body, sub, {"vertices"})
        verts = body.get("vertices")
        if not isinstance(verts, list) or not verts:
            raise ParseError(f"{sub}.vertices", "expected a nonempty list of points")
        V = np.array(verts, dtype=float)
        return Polytope(V) if name == "polytope" else Simplex(V)
    except (ParseError, ValidationError):
        raise
    except (HilbertLabError, ValueError, TypeError) as exc:
        raise ValidationError(sub, str(exc)) from None


def _generators(value, path, dom):
    """Returns (GeneratorSet, domain, gram). Named constructors may supply the domain."""
    gram = None
    if isinstance(value, list):
        if dom is None:
            raise ValidationError("$.domain", "explicit generator matrices need a domain")
        mats = []
        for i, m in enumerate(value):
            M = _matrix(m, f"{path}[{i}]", dom.dim)
            if abs(np.linalg.det(M)) <= 1e-12 * max(1.0, np.abs(M).max()) ** dom.dim:
                raise ValidationError(f"{path}[{i}]", "matrix is not invertible")
            mats.append(M)
        try:
            return GeneratorSet(mats, dom), dom, gram
        except HilbertLabError as exc:
            raise ValidationError(path, str(exc)) from None
    name, body = _single(value, path, {"schottky_pso21", "coxeter", "boost"})
    sub = f"{path}.{name}"
    try:
        if name == "schottky_pso21":
            _object(body, sub, {"t", "angle"})
            gens = schottky_pso21(_number(body.get("t"), f"{sub}.t"), _number(body.get("angle"), f"{sub}.angle"))
        elif name == "boost":
            _object(body, sub, {"t", "angle"})
            M = boost_matrix(_number(body.get("t"), f"{sub}.t"), _number(body.get("angle", 0.0), f"{sub}.angle"))
            gens = GeneratorSet([M], dom if dom is not None else Ellipsoid.ball(2))
        else:
            _object(body, sub, {"gram", "orders", "triangle", "reflections"})
            if "gram" in body:
                gram = _matrix(body["gram"], f"{sub}.gram")
            elif "orders" in body:
                gram = coxeter_gram(_matrix(body["orders"], f"{sub}.orders"))
            elif "triangle" in body:
                p, q, r = (_number(x, f"{sub}.triangle[{i}]", int) for i, x in enumerate(body["triangle"]))
                gram = triangle_group_gram(p, q, r)
            else:
                raise ParseError(sub, "expected one of gram, orders, triangle")
            gens, _ = coxeter_generators(gram, body.get("reflections"))
    except (ParseError, ValidationError):
        raise
    except HilbertLabError as exc:
        raise ValidationError(sub, str(exc)) from None
    if dom is not None and gens.domain is not dom:
        try:
            gens = GeneratorSet(gens.generators, dom)
        except HilbertLabError as exc:
            raise ValidationError(sub, str(exc)) from None
    return gens, gens.domain, gram


def _subset(value, path, dom, gens):
    if isinstance(value, dict) and "axis" in value:
        _object(value, path, {"axis"})
        word = value["axis"]
        if not isinstance(word, str) or any(ch not in gens.letters for ch in word):
            raise ValidationError(f"{path}.axis", "expected a word in the generator letters")
        try:
            return axis_of(dom, gens.word_matrix(word))
        except HilbertLabError as exc:
            raise ValidationError(f"{path}.axis", str(exc)) from None
    _object(value, path, {"generators", "basepoint"})
    pts = value.get("generators")
    if not isinstance(pts, list) or not pts:
        raise ParseError(f"{path}.generators", "expected a nonempty list of points")
    P = [_point(p, f"{path}.generators[{i}]", dom) for i, p in enumerate(pts)]
    base = _point(value["basepoint"], f"{path}.basepoint", dom) if "basepoint" in value else None
    try:
        return ConvexSubset(dom, P, base)
    except HilbertLabError as exc:
        raise ValidationError(path, str(exc)) from None


def _checks(value, path, dom, subsets):
    if not isinstance(value, list):
        raise ParseError(path, "expected a list of checks")
    out = []
    for i, item in enumerate(value):
        name, body = _single(item, f"{path}[{i}]", set(_CHECK_KEYS))
        sub = f"{path}[{i}].{name}"
        _object(body, sub, _CHECK_KEYS[name])
        spec = {"type": name}
        for key, v in body.items():
            kp = f"{sub}.{key}"
            if key in ("p1", "p2", "q1", "q2", "z", "point", "p0"):
                spec[key] = _point(v, kp, dom)
            elif key in ("qs", "ps", "vertices"):
                if not isinstance(v, list):
                    raise ParseError(kp, "expected a list of points")
                spec[key] = [_point(p, f"{kp}[{j}]", dom) for j, p in enumerate(v)]
            elif key == "matrices":
                if not isinstance(v, list):
                    raise ParseError(kp, "expected a list of matrices")
                spec[key] = [_matrix(m, f"{kp}[{j}]", dom.dim) for j, m in enumerate(v)]
            elif key == "diag_exponents":
                spec[key] = [_number(x, f"{kp}[{j}]") for j, x in enumerate(v)]
            elif key in ("count", "seed", "terms", "samples"):
                spec[key] = _number(v, kp, int)
            elif key in ("r", "D"):
                spec[key] = _number(v, kp)
            elif key == "expect":
                if not isinstance(v, bool):
                    raise ParseError(kp, "expected true or false")
                spec[key] = v
            elif key == "subset":
                if v not in subsets:
                    raise ValidationError(kp, f"unknown subset {v!r}")
                spec[key] = v
        out.append(spec)
    return out


def parse_scene(text: str) -> Scene:
    """Parse and validate a JSON scene document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"$ (line {exc.lineno}, column {exc.colno})", exc.msg) from None
    _object(doc, "$", _TOP_KEYS)
    if doc.get("schema") != SCHEMA_VERSION:
        raise ParseError("$.schema", f"expected schema version {SCHEMA_VERSION}")
    dom = _domain(doc["domain"], "$.domain") if "domain" in doc else None
    if "generators" in doc:
        gens, dom, gram = _generators(doc["generators"], "$.generators", dom)
    else:
        if dom is None:
            raise ParseError("$", "a scene needs a domain or named generators")
        gens, gram = GeneratorSet.trivial(dom), None
    base = _point(doc["basepoint"], "$.basepoint", dom) if "basepoint" in doc else HomogeneousPoint(dom.center)
    pts = doc.get("points", [])
    if not isinstance(pts, list):
        raise ParseError("$.points", "expected a list of points")
    points = [_point(p, f"$.points[{i}]", dom) for i, p in enumerate(pts)]
    raw = doc.get("subsets", {})
    if not isinstance(raw, dict):
        raise ParseError("$.subsets", "expected an object of named subsets")
    subsets = {name: _subset(body, f"$.subsets.{name}", dom, gens) for name, body in raw.items()}
    family = None
    if "family" in doc:
        fam = _object(doc["family"], "$.family", {"representatives", "word_len"})
        reps = fam.get("representatives")
        if not isinstance(reps, list) or not reps:
            raise ParseError("$.family.representatives", "expected a nonempty list")
        members = []
        for i, rep in enumerate(reps):
            rp = f"$.family.representatives[{i}]"
            if isinstance(rep, str):
                if rep not in subsets:
                    raise ValidationError(rp, f"unknown subset {rep!r}")
                members.append(subsets[rep])
            else:
                members.append(_subset(rep, rp, dom, gens))
        family = {"representatives": members, "word_len": _number(fam.get("word_len", 0), "$.family.word_len", int)}
    params = _object(doc.get("parameters", {}), "$.parameters", _PARAM_KEYS)
    parameters = {}
    for key, v in params.items():
        parameters[key] = _number(v, f"$.parameters.{key}", int if key in ("word_len", "seed", "samples", "family_word_len") else float)
    overrides = {}
    known = {f.name: f.type for f in dataclasses.fields(Tolerances) + dataclasses.fields(Settings)}
    for key, v in _object(doc.get("tolerances", {}), "$.tolerances", known).items():
        overrides[key] = _number(v, f"$.tolerances.{key}", int if known[key] in (int, "int") else float)
    checks = _checks(doc.get("checks", []), "$.checks", dom, subsets)
    overlays = doc.get("overlays", [])
    if not isinstance(overlays, list):
        raise ParseError("$.overlays", "expected a list")
    for i, o in enumerate(overlays):
        if o not in _OVERLAYS:
            raise ParseError(f"$.overlays[{i}]", f"unknown overlay {o!r}")
    return Scene(doc, dom, gens, base, points, subsets, family, parameters, overrides, checks, list(overlays), gram)


def load_scene(path) -> Scene:
    with open(path, encoding="utf-8") as fh:
        return parse_scene(fh.read())
