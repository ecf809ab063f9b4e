"""Warping functions phi(r) for metrics dr^2 + phi(r)^2 g_N."""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .expr import (DomainError, Expr, compile_expr, derivative, log_plateau, parse,
                   smooth_plateau, to_text)

__all__ = [
    "WarpFn", "Check", "ValidationReport", "warp_from_expr", "eval_warp",
    "smooth_bump", "builtin_catalog", "get_warp", "power_beta", "bump_counterexample",
    "validate_warp", "load_warp_file", "EPS_MONO",
]

EPS_MONO = 1e-12
DEFAULT_FLOOR = 1e-6

Fn = Callable[[float], float]


@dataclass(frozen=True)
class WarpFn:
    """A warping function with exact first and second derivatives.

    ``beta`` is a declared upper bound for phi'; ``domain_floor`` is the
    radius below which :func:`eval_warp` substitutes the vertex series
    ``phi ~ r``.
    """

    name: str
    value: Fn
    d1: Fn
    d2: Fn
    beta: Optional[float] = None
    domain_floor: float = DEFAULT_FLOOR
    expr: Optional[Expr] = None
    formula: str = ""
    anchor: str = ""
    series: Optional[Callable[[float], tuple[float, float, float]]] = field(default=None, compare=False)

    def __call__(self, r: float) -> float:
        return self.value(r)


def warp_from_expr(name: str, text_or_expr, beta: Optional[float] = None,
                   domain_floor: float = DEFAULT_FLOOR, anchor: str = "") -> WarpFn:
    """Build a :class:`WarpFn` from an expression; derivatives are symbolic."""
    e = parse(text_or_expr) if isinstance(text_or_expr, str) else text_or_expr
    de = derivative(e)
    dde = derivative(de)
    if beta is not None and beta < 0:
        raise ValueError("beta must be nonnegative")
    return WarpFn(
        name=name, value=compile_expr(e), d1=compile_expr(de), d2=compile_expr(dde),
        beta=beta, domain_floor=domain_floor, expr=e, formula=to_text(e), anchor=anchor,
    )


def eval_warp(w: WarpFn, r: float) -> tuple[float, float, float]:
    """Return (phi, phi', phi'') at ``r > 0``."""
    if not r > 0:
        raise DomainError(f"warp {w.name} evaluated at r={r!r}; need r > 0")
    if r < w.domain_floor:
        if w.series is not None:
            return w.series(r)
        return r, 1.0, 0.0
    return w.value(r), w.d1(r), w.d2(r)


def smooth_bump(x: float) -> float:
    """Bump equal to 1 on [-1, 1], supported in [-2, 2], 1/2 at +-3/2."""
    return smooth_plateau(x, 0.0, 1.0, 2.0)


# --------------------------------------------------------------------------
# catalog


def power_beta(beta0: float = 0.5) -> WarpFn:
    """phi = r on (0, 1], 1 + (r^b - 1)/b for r >= 2, smooth monotone blend between.

    The tail is tangent to r at r = 1 and concave, so phi' <= 1 throughout.
    """
    if not 0.0 < beta0 <= 1.0:
        raise ValueError("power_beta needs 0 < beta0 <= 1")
    b = float(beta0)
    text = f"(1 - step(r; 1, 2))*r + step(r; 1, 2)*(1 + (r^{b!r} - 1)/{b!r})"
    return warp_from_expr(f"power_beta({b:g})", text, beta=1.0, anchor="power-tail warp")


def _bump_terms(r: float):
    """Active terms of the bump counterexample at r.

    Linear terms carry (psi, psi', psi''); exponential terms carry
    (log psi, psi'/psi, psi''/psi) so that e^r psi never underflows.
    """
    out = []
    k = round(r / 6.0)
    if k >= 0 and abs(r - 6 * k) < 2.0:
        x = r - 6 * k
        out.append(("lin", smooth_plateau(x, 0, 1, 2), smooth_plateau(x, 0, 1, 2, 1),
                    smooth_plateau(x, 0, 1, 2, 2)))
    k = round((r - 3.0) / 6.0)
    if k >= 0 and abs(r - 6 * k - 3) < 2.0:
        out.append(("exp",) + log_plateau(r - 6 * k - 3, 0, 1, 2))
    return out


def _exp_psi(r: float, log_psi: float, factor: float) -> float:
    # e^r psi * factor, overflowing to +-inf only when the product does
    if factor == 0.0 or log_psi == -math.inf:
        return 0.0
    try:
        return math.copysign(math.exp(r + log_psi + math.log(abs(factor))), factor)
    except OverflowError:
        return math.copysign(math.inf, factor)


def _bump_order(r: float, order: int) -> float:
    total = 0.0
    for kind, p0, p1, p2 in _bump_terms(r):
        if kind == "lin":
            total += (r * p0, p0 + r * p1, 2 * p1 + r * p2)[order]
        else:
            total += _exp_psi(r, p0, (1.0, 1.0 + p1, 1.0 + 2 * p1 + p2)[order])
    return total


def bump_counterexample() -> WarpFn:
    """phi = sum_k r psi(r - 6k) + sum_k e^r psi(r - 6k - 3), lazily truncated.

    At most one term of each sum is nonzero at any r.  Values overflow to
    ``inf`` beyond r ~ 709 where the exponential bump is active.
    """
    return WarpFn(
        name="bump_counterexample",
        value=lambda r: _bump_order(r, 0),
        d1=lambda r: _bump_order(r, 1),
        d2=lambda r: _bump_order(r, 2),
        beta=None,
        formula="sum_k r*bump(r - 6k; 0, 1, 2) + sum_k exp(r)*bump(r - 6k - 3; 0, 1, 2)",
        anchor="doubling counterexample",
    )


def _catalog_entries() -> list[WarpFn]:
    return [
        warp_from_expr("euclidean", "r", beta=1.0, anchor="flat space"),
        warp_from_expr("half_sin", "(r + sin(r))/2", beta=1.0, anchor="half-sine example"),
        power_beta(0.5),
        warp_from_expr("r_log_r", "r + step(r; 1, e)*(r*log(r) - r)",
                       anchor="strong Liouville counterexample"),
        bump_counterexample(),
    ]


def builtin_catalog() -> list[WarpFn]:
    return _catalog_entries()


def get_warp(name: str) -> WarpFn:
    """Catalog lookup; ``power_beta(b)`` takes its exponent inline."""
    key = name.strip()
    if key.startswith("power_beta"):
        arg = key[len("power_beta"):].strip()
        if not arg:
            return power_beta(0.5)
        if not (arg.startswith("(") and arg.endswith(")")):
            raise KeyError(name)
        return power_beta(float(arg[1:-1]))
    for w in _catalog_entries():
        if w.name == key:
            return w
    raise KeyError(f"unknown warp {name!r}; known: "
                   + ", ".join(w.name for w in _catalog_entries()))


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    worst_r: float
    worst_value: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    warp: str
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _safe(f: Fn, r: float) -> float:
    try:
        return f(r)
    except DomainError:
        return math.nan


def validate_warp(w: WarpFn, r_max: float, samples: int = 256) -> ValidationReport:
    """Check positivity, phi(r)/r -> 1 at the vertex, phi' >= 0 and phi' <= beta."""
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    if samples < 16:
        raise ValueError("need at least 16 samples")
    grid = np.geomspace(min(1e-4, r_max / 10), r_max, samples)
    vals = np.array([_safe(w.value, r) for r in grid])
    d1 = np.array([_safe(w.d1, r) for r in grid])
    checks = []

    bad = ~(vals > 0)
    i = int(np.argmax(bad)) if bad.any() else int(np.argmin(vals))
    checks.append(Check("positive", not bad.any(), float(grid[i]), float(vals[i]),
                        "phi > 0 on sampled grid"))

    ratios = [(r, _safe(w.value, r) / r) for r in (1e-4, 1e-6)]
    errs = [(r, abs(q - 1.0) if math.isfinite(q) else math.inf) for r, q in ratios]
    r_bad, e_bad = max(errs, key=lambda t: t[1])
    checks.append(Check("vertex_limit", e_bad <= 0.01, r_bad, e_bad,
                        "|phi(r)/r - 1| <= 1% at r = 1e-4, 1e-6"))

    finite = np.isfinite(d1)
    i = int(np.argmin(np.where(finite, d1, -np.inf)))
    ok = bool(finite.all() and d1.min() >= -EPS_MONO)
    checks.append(Check("monotone", ok, float(grid[i]), float(d1[i]), "phi' >= -1e-12"))

    if w.beta is not None:
        i = int(np.argmax(np.where(finite, d1, np.inf)))
        ok = bool(finite.all() and d1.max() <= w.beta + EPS_MONO)
        checks.append(Check("beta_bound", ok, float(grid[i]), float(d1[i]),
                            f"phi' <= beta = {w.beta:g}"))
    return ValidationReport(w.name, tuple(checks))


# --------------------------------------------------------------------------
# warp definition files


def load_warp_file(path) -> list[WarpFn]:
    """Read warp definitions from an INI-style file.

    Each section defines one warp with keys ``expr`` (required), ``name``
    (defaults to the section title), ``beta`` and ``domain_floor``.
    """
    cp = configparser.ConfigParser(interpolation=None)
    text = Path(path).read_text()
    cp.read_string(text)
    out = []
    for section in cp.sections():
        sec = cp[section]
        if "expr" not in sec:
            raise ValueError(f"[{section}] is missing 'expr'")
        beta = sec.get("beta")
        out.append(warp_from_expr(
            sec.get("name", section), sec["expr"],
            beta=float(beta) if beta not in (None, "", "none") else None,
            domain_floor=float(sec.get("domain_floor", DEFAULT_FLOOR)),
            anchor=sec.get("anchor", "user"),
        ))
    return out
