"""Numerical tolerances and run-wide settings.

All tolerances live in one frozen `Tolerances` record so that a report can
echo every threshold that influenced its numbers. Computations read the
active record through `tolerances()`; scenes override it with `override()`.
"""
import contextlib
import contextvars
import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # relative threshold for algebraic identities (projective equality, rank)
    alg: float = 1e-9
    # Cauchy threshold for sequences of normalized matrices
    conv: float = 1e-10
    # membership classification margin
    geo: float = 1e-7
    # collinearity: sigma_3 / sigma_1 of the stacked point matrix
    collinear: float = 1e-8
    # chart validation margin at domain construction
    chart_margin: float = 1e-6
    # optimizer accuracy for distances to convex subsets
    opt: float = 1e-6
    # slack for sampled Hausdorff inequalities
    samp: float = 5e-3
    # relative spectral gap required for proximality
    prox: float = 1e-6
    # chart distance under which an orbit point counts as accumulating
    acc: float = 1e-4
    # quantization grid for orbit deduplication
    dedup: float = 1e-8
    # resolution for merging limit points
    limit_merge: float = 1e-6
    # chart distance for quotient adjacency edges
    adj: float = 1e-2
    # word-length tolerance for the free-group sanity check
    free_check: float = 1e-6
    # Coxeter relations and involutions
    relation: float = 1e-8


@dataclass(frozen=True)
class Settings:
    """Sampling sizes and search parameters (not tolerances, but echoed)."""

    segment_samples: int = 200
    hull_samples: int = 2000
    multistarts: int = 8
    seed: int = 0
    boundary_depth: int = 6
    window: float = 6.0
    word_cap: int = 10
    max_elements: int = 1_000_000
    ray_depths: int = 8
    conical_grid: int = 32
    conical_depth: float = 8.0
    golden_iters: int = 64
    segment_cap: float = 10.0


_TOL = contextvars.ContextVar("hilbert_lab_tolerances", default=Tolerances())
_SET = contextvars.ContextVar("hilbert_lab_settings", default=Settings())


def tolerances() -> Tolerances:
    return _TOL.get()


def settings() -> Settings:
    return _SET.get()


@contextlib.contextmanager
def override(**kwargs):
    """Temporarily replace tolerance or settings fields by name."""
    tol_fields = {f.name for f in dataclasses.fields(Tolerances)}
    set_fields = {f.name for f in dataclasses.fields(Settings)}
    unknown = set(kwargs) - tol_fields - set_fields
    if unknown:
        raise KeyError(f"unknown configuration keys: {sorted(unknown)}")
    tol = dataclasses.replace(tolerances(), **{k: v for k, v in kwargs.items() if k in tol_fields})
    sets = dataclasses.replace(settings(), **{k: v for k, v in kwargs.items() if k in set_fields})
    t1, t2 = _TOL.set(tol), _SET.set(sets)
    try:
        yield tol, sets
    finally:
        _TOL.reset(t1)
        _SET.reset(t2)


def worker_count() -> int:
    """Worker cap from HILBERT_LAB_THREADS (default 1)."""
    raw = os.environ.get("HILBERT_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Order-preserving map, threaded when HILBERT_LAB_THREADS > 1."""
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) < 2:
        return [fn(it) for it in items]

    # contextvars do not propagate into pool threads on their own
    ctx = contextvars.copy_context()
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda it: ctx.copy().run(fn, it), items))


def as_dict() -> dict:
    return {
        "tolerances": dataclasses.asdict(tolerances()),
        "settings": dataclasses.asdict(settings()),
        "threads": worker_count(),
    }
