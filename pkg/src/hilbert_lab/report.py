"""Command dispatch and JSON reports.

Reports are serialized with sorted keys and every float written with 17
significant digits, so identical inputs produce byte-identical files.
Wall-clock timing is only included on request because it breaks that.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .checks import run_check
from .config import as_dict, override, settings
from .domain import ConvexSubset, ideal_boundary_sample
from .errors import HilbertLabError, UnknownCommand, UnsupportedPlotDimension
from .groups import convex_core_approx, enumerate_orbit, limit_set_approx
from .metric import hilbert_distance
from .peripheral import PeripheralFamily, strong_isolation_report
from .quotient import boundary_sample, build_quotient
from .svg import emit_svg

COMMANDS = ("distance", "orbit", "limitset", "core", "isolation", "quotient", "checks", "plot")
EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2

DEFAULT_WORD_LEN = 3


@dataclass
class Report:
    command: str
    config: dict
    results: dict
    passed: bool
    witnesses: list = field(default_factory=list)
    timing: float | None = None
    overlays: dict = field(default_factory=dict, repr=False)

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_FAIL

    def as_dict(self) -> dict:
        out = {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "passed": self.passed,
            "exit_code": self.exit_code,
            "witnesses": self.witnesses,
        }
        if self.timing is not None:
            out["timing_seconds"] = self.timing
        return out

    def to_json(self) -> str:
        return dumps(self.as_dict()) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _encode(obj, indent, level) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return '"nan"'
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return "%.17g" % obj
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, dict)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_encode(k, indent, level + 1)}: {_encode(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with sorted keys and 17-significant-digit floats (non-finite floats as strings)."""
    return _encode(_plain(obj), indent, 0)


def _family(scene, word_len=None):
    if scene.family is None:
        raise HilbertLabError("this command needs a family in the scene")
    n = scene.family["word_len"] if word_len is None else word_len
    return PeripheralFamily(scene.family["representatives"], scene.gens, n, scene.basepoint)


def _core(scene, word_len):
    if "C" in scene.subsets:
        return scene.subsets["C"]
    if len(scene.gens) == 0:
        return ConvexSubset.whole_domain(scene.domain)
    return convex_core_approx(scene.gens, word_len, scene.basepoint)


def _coords(dom, L):
    return dom.chart.coords(L) if len(L) else np.zeros((0, dom.dim - 1))


def _distance(scene, p):
    pts = scene.points
    if len(pts) < 2:
        raise HilbertLabError("distance needs at least two points")
    n = len(pts)
    M = [[hilbert_distance(scene.domain, pts[i], pts[j]) if i != j else 0.0 for j in range(n)] for i in range(n)]
    res = {"points": _coords(scene.domain, scene.domain.lift([q.coords for q in pts])), "distances": M}
    if n == 2:
        res["distance"] = M[0][1]
    return res, True, [], {"points": scene.domain.lift([q.coords for q in pts])}


def _orbit(scene, p):
    orb = enumerate_orbit(scene.gens, scene.basepoint, p["word_len"])
    res = {
        "size": len(orb),
        "word_length_histogram": {str(k): v for k, v in sorted(orb.word_length_histogram.items())},
        "words": [e.word for e in orb.elements],
        "points": _coords(scene.domain, orb.orbit_points),
    }
    return res, True, [], {"orbit": orb.orbit_points}


def _limitset(scene, p):
    ls = limit_set_approx(scene.gens, scene.basepoint, p["word_len"])
    dom = scene.domain
    res = {
        "count": len(ls),
        "points": _coords(dom, ls.points),
        "provenance": {k: ls.provenance.count(k) for k in sorted(set(ls.provenance))},
        "max_level": float(np.abs(dom.levels(ls.points)).max()) if len(ls) else 0.0,
    }
    return res, True, [], {"limitset": ls.points}


def _core_cmd(scene, p):
    C = _core(scene, p["word_len"])
    if C.whole:
        return {"whole_domain": True}, True, [], {}
    res = {"whole_domain": False, "generators": _coords(scene.domain, C.lifts), "size": C.size}
    return res, True, [], {"limitset": C.lifts}


def _isolation(scene, p):
    fam = _family(scene, p.get("family_word_len"))
    rep = strong_isolation_report(scene.domain, fam, p["r"], p["window"], scene.basepoint)
    res = {
        "r": rep.r,
        "window": rep.window,
        "D1_hat": rep.D1_hat,
        "translates": len(fam),
        "unresolved_translates": fam.unresolved,
        "translates_in_window": rep.translates_in_window,
        "saturated_pairs": len(rep.saturated_pairs),
        "pairs_measured": len(rep.pair_diameters),
    }
    wit = [{"pair": list(k)} for k in rep.saturated_pairs]
    return res, rep.isolated_at_window_scale, wit, {"family": [t.subset.lifts for t in fam.translates]}


def _quotient(scene, p):
    dom = scene.domain
    fam = _family(scene, p.get("family_word_len")) if scene.family is not None else None
    C = _core(scene, p["word_len"])
    extra = [g for X in scene.family["representatives"] for g in ideal_boundary_sample(X, 8)] if fam is not None else []
    sample = boundary_sample(dom, C, fam, p["samples"], extra)
    q = build_quotient(sample, fam, scene.gens if len(scene.gens) else None, classify=len(scene.gens) > 0)
    res = {
        "sample_size": len(sample),
        "classes": len(q),
        "class_of": q.class_of,
        "class_labels": q.class_labels,
        "label_counts": {k: q.class_labels.count(k) for k in ("Conical", "Peripheral", "Unknown")},
        "class_translates": [t if t is None else fam.translates[t].word + ":" + str(fam.translates[t].representative) for t in q.class_translates],
        "adjacency": [list(e) for e in q.adjacency],
        "points": _coords(dom, sample.points),
        "membership_conflicts": sample.conflicts,
    }
    wit = [{"conflicting_point": i} for i in sample.conflicts]
    return res, not sample.conflicts, wit, {"quotient": (sample.points, q.class_of)}


def _checks(scene, p):
    out = [run_check(scene, spec) for spec in scene.checks]
    wit = [{"check": i, "type": r["type"], "witnesses": r["witnesses"]} for i, r in enumerate(out) if not r["passed"]]
    return {"checks": out, "count": len(out)}, not wit, wit, {}


def _plot(scene, p):
    if scene.domain.dim != 3:
        raise UnsupportedPlotDimension(f"plots need a 2-dimensional chart, got {scene.domain.dim - 1}")
    overlays = {}
    if scene.points:
        overlays["points"] = scene.domain.lift([q.coords for q in scene.points])
    for name in scene.overlays:
        if name == "orbit":
            overlays.update(_orbit(scene, p)[3])
        elif name == "limitset":
            overlays.update(_limitset(scene, p)[3])
        elif name == "family":
            overlays.update(_isolation_overlay(scene, p))
        elif name == "quotient":
            overlays.update(_quotient(scene, p)[3])
    res = {"overlays": sorted(overlays)}
    return res, True, [], overlays


def _isolation_overlay(scene, p):
    fam = _family(scene, p.get("family_word_len"))
    return {"family": [t.subset.lifts for t in fam.translates]}


_DISPATCH = {
    "distance": _distance,
    "orbit": _orbit,
    "limitset": _limitset,
    "core": _core_cmd,
    "isolation": _isolation,
    "quotient": _quotient,
    "checks": _checks,
    "plot": _plot,
}


def resolve_parameters(scene, word_len=None, r=None, window=None, seed=None) -> dict:
    """Command parameters: explicit arguments, then scene values, then defaults."""
    sp = scene.parameters
    p = {
        "word_len": word_len if word_len is not None else sp.get("word_len", DEFAULT_WORD_LEN),
        "r": r if r is not None else sp.get("r", 0.5),
        "window": window if window is not None else sp.get("window", settings().window),
        "seed": seed if seed is not None else sp.get("seed", scene.overrides.get("seed", settings().seed)),
        "samples": sp.get("samples", 64),
    }
    if "family_word_len" in sp:
        p["family_word_len"] = sp["family_word_len"]
    if "D" in sp:
        p["D"] = sp["D"]
    return p


def run_command(scene, command: str, word_len=None, r=None, window=None, seed=None, timing: bool = False) -> Report:
    """Run ``command`` on a parsed scene and collect a Report."""
    if command not in _DISPATCH:
        raise UnknownCommand(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    p = resolve_parameters(scene, word_len, r, window, seed)
    kw = dict(scene.overrides)
    kw["seed"] = p["seed"]
    kw["window"] = p["window"]
    with override(**kw):
        t0 = time.perf_counter()
        results, passed, witnesses, overlays = _DISPATCH[command](scene, p)
        elapsed = time.perf_counter() - t0
        config = as_dict()
    config["parameters"] = p
    return Report(command, config, results, bool(passed), witnesses, elapsed if timing else None, overlays)


def report_svg(scene, report: Report) -> str:
    return emit_svg(scene, report.overlays)
