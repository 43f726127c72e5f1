"""
Identity registry and runner.

An :class:`IdentityCheck` names an identity, a parameter grid and a
tolerance. Its recipe maps one grid point to ``(lhs, rhs)``, ``(lhs, rhs, scale)`` or
``(lhs, rhs, scale, note)``; with a scale the relative error is measured
against ``max(|rhs|, scale)``, which is how vanishing right-hand sides are
handled, and a note is copied into the result message.
Candidate checks carry several recipes (variants) of which exactly one is
expected to hold; the runner reports the one that does.
"""

import enum
import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Tuple

__all__ = [
    "Category",
    "Status",
    "Tolerance",
    "IdentityCheck",
    "CheckResult",
    "Report",
    "SkipPoint",
    "UnknownCheck",
    "register",
    "registry",
    "run_check",
    "run_suite",
    "ALL",
    "MANDATORY",
]

ALL = "all"
MANDATORY = "mandatory"


class Category(enum.Enum):
    MANDATORY = "MANDATORY"
    EXTENDED = "EXTENDED"
    CANDIDATE = "CANDIDATE"


class Status(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIP = "SKIP"
    ADJUDICATED = "ADJUDICATED"


class SkipPoint(Exception):
    """Raised by a recipe when a grid point does not apply."""


class UnknownCheck(LookupError):
    def __init__(self, name, valid):
        super().__init__(f"unknown check {name!r}; valid names: {', '.join(valid)}")
        self.name = name
        self.valid = tuple(valid)


@dataclass(frozen=True)
class Tolerance:
    abs: float
    rel: float

    def __post_init__(self):
        if not (math.isfinite(self.abs) and math.isfinite(self.rel)):
            raise ValueError("tolerances must be finite")
        if self.abs < 0 or self.rel < 0:
            raise ValueError("tolerances must be non-negative")


Recipe = Callable[[dict], tuple]


@dataclass(frozen=True)
class IdentityCheck:
    """One registered identity.

    ``axes`` maps parameter names to value tuples; the grid is their product
    in the given order, filtered by ``where``. ``points`` replaces the product
    by an explicit list. Exactly one of ``recipe`` and ``variants`` is set.
    """

    name: str
    paper_ref: str
    axes: Tuple[Tuple[str, tuple], ...]
    tolerance: Tolerance
    category: Category
    recipe: Optional[Recipe] = None
    variants: Optional[Tuple[Tuple[str, Recipe], ...]] = None
    where: Optional[Callable[[dict], bool]] = None
    points: Optional[Tuple[dict, ...]] = None
    note: str = ""

    def __post_init__(self):
        if (self.recipe is None) == (self.variants is None):
            raise ValueError(f"{self.name}: give either a recipe or variants")
        if self.category is Category.CANDIDATE and len(self.variants or ()) < 2:
            raise ValueError(f"{self.name}: candidate checks need at least two variants")

    def grid(self, overrides=None):
        """Parameter dicts in deterministic order."""
        overrides = dict(overrides or {})
        if "points" in overrides:
            return [dict(p) for p in overrides["points"]]
        if self.points is not None and not any(k in overrides for k, _ in self.axes):
            return [dict(p) for p in self.points]
        names = [k for k, _ in self.axes]
        values = [tuple(overrides.get(k, v)) for k, v in self.axes]
        out = []
        for combo in itertools.product(*values):
            p = dict(zip(names, combo))
            if self.where is None or self.where(p):
                out.append(p)
        return out


@dataclass(frozen=True)
class CheckResult:
    name: str
    params: dict
    lhs_value: float
    rhs_value: float
    abs_err: float
    rel_err: float
    tol_abs: float
    tol_rel: float
    status: Status
    runtime_ms: float
    paper_ref: str = ""
    category: Category = Category.MANDATORY
    variant: Optional[str] = None
    variant_errors: Mapping[str, float] = field(default_factory=dict)
    message: str = ""
    index: int = 0

    @property
    def passed(self):
        return self.status in (Status.PASS, Status.ADJUDICATED)


@dataclass(frozen=True)
class Report:
    results: Tuple[CheckResult, ...]
    selection: object
    workers: int

    @property
    def summary(self):
        counts = {"pass": 0, "fail": 0, "skip": 0, "adjudicated": 0}
        for r in self.results:
            counts[r.status.value.lower()] += 1
        return counts

    @property
    def gating_failures(self):
        """Failures that count against the exit status (not EXTENDED)."""
        return [r for r in self.results
                if r.status is Status.FAIL and r.category is not Category.EXTENDED]

    @property
    def ok(self):
        return not self.gating_failures


_REGISTRY: Dict[str, IdentityCheck] = {}


def register(name, paper_ref, axes, tol_abs=0.0, tol_rel=0.0, category=Category.MANDATORY,
             where=None, points=None, variants=None, note=""):
    """Decorator registering ``fn`` as the recipe of a check.

    For candidate checks call with ``variants={name: recipe, ...}`` directly
    (no decorator use).
    """
    if name in _REGISTRY:
        raise ValueError(f"duplicate check name {name!r}")
    axes = tuple((k, tuple(v)) for k, v in dict(axes).items())
    points = tuple(points) if points is not None else None
    tol = Tolerance(tol_abs, tol_rel)

    def add(recipe):
        _REGISTRY[name] = IdentityCheck(
            name, paper_ref, axes, tol, Category(category), recipe,
            tuple(variants.items()) if variants else None, where, points, note)
        return recipe

    if variants is not None:
        add(None)
        return None
    return add


def registry():
    """All registered checks keyed by name (sorted)."""
    from . import checks_index, checks_ortho, checks_wilson  # noqa: F401  (registration)
    return dict(sorted(_REGISTRY.items()))


def _errors(lhs, rhs, scale):
    abs_err = abs(lhs - rhs)
    den = abs(rhs) if scale is None else max(abs(rhs), abs(scale))
    if abs_err == 0:
        rel_err = 0.0
    elif den == 0 or not math.isfinite(den):
        rel_err = math.inf if math.isfinite(abs_err) else math.nan
    else:
        rel_err = abs_err / den
    return float(abs_err), float(rel_err)


def _passes(abs_err, rel_err, tol):
    # NaN compares false, so a non-finite side never passes
    return abs_err <= tol.abs or rel_err <= tol.rel


def _evaluate(recipe, p):
    out = recipe(dict(p))
    lhs, rhs = float(out[0]), float(out[1])
    scale = float(out[2]) if len(out) > 2 and out[2] is not None else None
    note = str(out[3]) if len(out) > 3 else ""
    return lhs, rhs, scale, note


def _one_point(check, tol, i, p):
    t0 = time.perf_counter()
    common = dict(name=check.name, params=p, tol_abs=tol.abs, tol_rel=tol.rel,
                  paper_ref=check.paper_ref, category=check.category, index=i)
    try:
        if check.recipe is not None:
            lhs, rhs, scale, note = _evaluate(check.recipe, p)
            ae, re_ = _errors(lhs, rhs, scale)
            status = Status.PASS if _passes(ae, re_, tol) else Status.FAIL
            return CheckResult(lhs_value=lhs, rhs_value=rhs, abs_err=ae, rel_err=re_,
                               status=status, runtime_ms=_ms(t0), message=note, **common)
        rows = []
        for vname, recipe in check.variants:
            lhs, rhs, scale, _ = _evaluate(recipe, p)
            ae, re_ = _errors(lhs, rhs, scale)
            rows.append((vname, lhs, rhs, ae, re_, _passes(ae, re_, tol)))
        good = [r for r in rows if r[5]]
        errs = {r[0]: r[4] for r in rows}
        if len(good) == 1:
            pick, status, msg = good[0], Status.ADJUDICATED, ""
        else:
            finite = [r for r in rows if math.isfinite(r[4])] or rows
            pick = min(finite, key=lambda r: r[4])
            status = Status.FAIL
            msg = ("no variant holds" if not good
                   else "several variants hold: " + ", ".join(r[0] for r in good))
        return CheckResult(lhs_value=pick[1], rhs_value=pick[2], abs_err=pick[3], rel_err=pick[4],
                           status=status, runtime_ms=_ms(t0), variant=pick[0],
                           variant_errors=errs, message=msg, **common)
    except SkipPoint as exc:
        return CheckResult(lhs_value=math.nan, rhs_value=math.nan, abs_err=math.nan,
                           rel_err=math.nan, status=Status.SKIP, runtime_ms=_ms(t0),
                           message=str(exc), **common)
    except Exception as exc:  # failures are data
        return CheckResult(lhs_value=math.nan, rhs_value=math.nan, abs_err=math.nan,
                           rel_err=math.nan, status=Status.FAIL, runtime_ms=_ms(t0),
                           message=f"{type(exc).__name__}: {exc}", **common)


def _ms(t0):
    return 1e3 * (time.perf_counter() - t0)


def run_check(name, overrides=None):
    """Evaluate check ``name`` on its grid; one :class:`CheckResult` per point.

    ``overrides`` may replace grid axes (``{"x": (1.0,)}``), give explicit
    ``points``, or set ``tol_abs`` / ``tol_rel``.
    """
    reg = registry()
    if name not in reg:
        raise UnknownCheck(name, reg)
    check = reg[name]
    overrides = dict(overrides or {})
    tol = check.tolerance
    if "tol_abs" in overrides or "tol_rel" in overrides:
        tol = Tolerance(float(overrides.pop("tol_abs", tol.abs)),
                        float(overrides.pop("tol_rel", tol.rel)))
    return [_one_point(check, tol, i, p) for i, p in enumerate(check.grid(overrides))]


def _select(selection, reg):
    if selection == ALL:
        return list(reg)
    if selection == MANDATORY:
        return [k for k, c in reg.items() if c.category is not Category.EXTENDED]
    names = [selection] if isinstance(selection, str) else list(selection)
    for n in names:
        if n not in reg:
            raise UnknownCheck(n, reg)
    return sorted(set(names))


def _run_named(args):
    name, overrides = args
    return run_check(name, overrides)


def default_workers():
    """Worker count from KLORTH_WORKERS, else 1."""
    try:
        return max(1, int(os.environ.get("KLORTH_WORKERS", "1")))
    except ValueError:
        return 1


def run_suite(selection=MANDATORY, workers=None, overrides=None):
    """Run a selection of checks: ``ALL``, ``MANDATORY`` or a list of names.

    ``MANDATORY`` means every check that gates the exit status, i.e. all but
    EXTENDED ones. ``overrides`` maps check names to per-check overrides (see
    :func:`run_check`). With ``workers > 1`` checks run in a process pool;
    results are ordered by (name, grid index) either way.
    """
    reg = registry()
    names = _select(selection, reg)
    overrides = overrides or {}
    workers = default_workers() if workers is None else max(1, int(workers))
    tasks = [(n, overrides.get(n)) for n in names]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_named, tasks))
    else:
        chunks = [_run_named(t) for t in tasks]
    results = sorted((r for c in chunks for r in c), key=lambda r: (r.name, r.index))
    return Report(tuple(results), selection, workers)
