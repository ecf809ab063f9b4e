"""Barriers for the radial p-Laplacian.

With g(r) = r log(r/R) the comparison function is z = g^(p-1) and the
barrier is h = integral_{R e}^r z^(-1/(p-1)) = integral 1/g, which equals
log log(r/R) for every p.  The checks here test the curvature inequalities
that make h a p-supersolution outside the ball of radius R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .expr import compile_expr, derivative, parse
from .quadrature import simpson_log
from .warp import WarpFn, eval_warp

__all__ = [
    "BarrierSpec", "ConditionVerdict", "NotApplicable", "radial_p_laplacian", "neg_z_ratio",
    "neg_z_ratio_symbolic", "check_condition", "curvature_bound", "verify_inequality_chain",
    "sturm_check", "barrier_p_laplacian", "verify_supersolution", "remark_check",
]


class NotApplicable(ValueError):
    """A hypothesis of the comparison argument fails on the requested range."""


@dataclass(frozen=True)
class BarrierSpec:
    p: float
    R: float = 1.0

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("barriers need p >= 2")
        if not self.R > 0:
            raise ValueError("R must be positive")

    @property
    def r0(self) -> float:
        """Base point of h, where log(r/R) = 1."""
        return self.R * math.e

    def _g(self, r: float) -> tuple[float, float, float]:
        if not r > self.R:
            raise ValueError(f"r={r!r} must exceed R={self.R!r}")
        L = math.log(r / self.R)
        return r * L, L + 1.0, 1.0 / r

    def z(self, r: float) -> float:
        return self._g(r)[0] ** (self.p - 1)

    def dz(self, r: float) -> float:
        g, g1, _ = self._g(r)
        return (self.p - 1) * g ** (self.p - 2) * g1

    def log_dz(self, r: float) -> float:
        """z'/z."""
        g, g1, _ = self._g(r)
        return (self.p - 1) * g1 / g

    def h(self, r: float) -> float:
        """Closed form log log(r/R)."""
        return math.log(math.log(r / self.R))

    def h_quad(self, r: float, tol: float = 1e-12) -> float:
        """h by quadrature of z^(-1/(p-1)) from r0."""
        e = -1.0 / (self.p - 1)
        return simpson_log(lambda s: self.z(s) ** e, self.r0, r, tol=tol, rel_tol=tol)

    def dh(self, r: float) -> tuple[float, float]:
        """(h', h'') = (1/g, -g'/g^2)."""
        g, g1, _ = self._g(r)
        return 1.0 / g, -g1 / (g * g)


@dataclass(frozen=True)
class ConditionVerdict:
    which: str
    holds_on: tuple[tuple[float, bool], ...]
    margin: float

    @property
    def holds(self) -> bool:
        return all(ok for _, ok in self.holds_on)


def radial_p_laplacian(w: WarpFn, du: Callable[[float], float], ddu: Callable[[float], float],
                       p: float, r: float) -> float:
    """|u'|^(p-2) [(p-1) u'' + (phi'/phi) u'] for radial u."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    phi, d1, _ = eval_warp(w, r)
    u1, u2 = du(r), ddu(r)
    if u1 == 0.0:
        if p == 2:
            return u2
        if p > 2:
            return 0.0
        raise ValueError("p-Laplacian is singular at a critical point for p < 2")
    return abs(u1) ** (p - 2) * ((p - 1) * u2 + d1 / phi * u1)


def neg_z_ratio(spec: BarrierSpec, r: float) -> float:
    """-z''/z = -(p-1) [(p-2) ((L+1)/(r L))^2 + 1/(r^2 L)] with L = log(r/R)."""
    if not r > spec.R:
        raise ValueError("r must exceed R")
    L = math.log(r / spec.R)
    p = spec.p
    return -(p - 1) * ((p - 2) * ((L + 1) / (r * L)) ** 2 + 1.0 / (r * r * L))


def neg_z_ratio_symbolic(spec: BarrierSpec) -> Callable[[float], float]:
    """-z''/z from symbolic differentiation of the parsed z."""
    z = parse(f"(r*log(r/{spec.R!r}))^{spec.p - 1!r}")
    f = compile_expr(z)
    f2 = compile_expr(derivative(derivative(z)))
    return lambda r: -f2(r) / f(r)


def curvature_bound(p: float, which: str) -> Callable[[float], float]:
    """Lower curvature bound of condition (i) or (ii)."""
    if which == "i":
        return lambda r: -(p - 1) / (r * r * math.log(r))
    if which == "ii":
        return lambda r: -(p - 1) * (p - 2) / (r * r)
    raise ValueError("which must be 'i' or 'ii'")


def _samples(r_range: Sequence[float], samples: int) -> np.ndarray:
    lo, hi = float(r_range[0]), float(r_range[1])
    if not 0 < lo < hi:
        raise ValueError("need 0 < r_lo < r_hi")
    return np.geomspace(lo, hi, samples)


def check_condition(curvature: Callable[[float], float], p: float, which: str,
                    r_range: Sequence[float], samples: int = 64, R: float = 1.0) -> ConditionVerdict:
    """Compare K(r) with bound (i) -(p-1)/(r^2 log r) or (ii) -(p-1)(p-2)/r^2."""
    if p < 2:
        raise ValueError("p must be at least 2")
    if samples < 64:
        raise ValueError("need at least 64 samples")
    if r_range[0] <= max(R, 1.0):
        raise ValueError("r_range must lie beyond max(R, 1)")
    bound = curvature_bound(p, which)
    rows = []
    margin = math.inf
    for r in _samples(r_range, samples):
        K, b = curvature(r), bound(r)
        d = K - b
        margin = min(margin, d)
        rows.append((float(r), d >= -1e-12 * max(abs(K), abs(b), 1e-300)))
    return ConditionVerdict(which, tuple(rows), float(margin))


def verify_inequality_chain(p: float, R: float, r_range: Sequence[float],
                            samples: int = 512) -> float:
    """Largest relative violation of the two bounds on -z''/z.

    (a) -z''/z <= -(p-1)/(r^2 log r), needs R >= 1;
    (b) -z''/z <= -(p-1)(p-2)/r^2.
    Each violation is scaled by max(|lhs|, |rhs|); 0 means both hold.
    """
    if p < 2 or R < 1:
        raise ValueError("need p >= 2 and R >= 1")
    if r_range[0] <= R * (1 + 1e-3):
        raise ValueError("r_range must start beyond R(1 + 1e-3)")
    spec = BarrierSpec(p, R)
    bound_a = curvature_bound(p, "i")
    bound_b = curvature_bound(p, "ii")
    worst = 0.0
    for r in _samples(r_range, samples):
        lhs = neg_z_ratio(spec, r)
        for rhs in (bound_a(r), bound_b(r)):
            scale = max(abs(lhs), abs(rhs))
            if scale > 0:
                worst = max(worst, (lhs - rhs) / scale)
    return worst


HYPOTHESIS_SLACK = 1e-10


def sturm_check(w: WarpFn, spec: BarrierSpec, a: float, r_max: float,
                samples: int = 512) -> float:
    """min over [a, r_max] of z'/z - phi'/phi, once K >= -z''/z is confirmed there."""
    if not a > spec.R:
        raise ValueError("a must exceed R")
    rs = _samples((a, r_max), samples)
    for r in rs:
        phi, _, dd = eval_warp(w, r)
        K = -dd / phi
        bound = neg_z_ratio(spec, r)
        if K < bound - HYPOTHESIS_SLACK * max(abs(K), abs(bound)):
            raise NotApplicable(f"curvature {K:.6g} < -z''/z = {bound:.6g} at r={r:.6g}")
    slack = math.inf
    for r in rs:
        phi, d1, _ = eval_warp(w, r)
        slack = min(slack, spec.log_dz(r) - d1 / phi)
    return float(slack)


def barrier_p_laplacian(w: WarpFn, spec: BarrierSpec, rs) -> tuple[np.ndarray, np.ndarray]:
    """Delta_p h at each r with the natural scale |h'|^(p-2) ((p-1)|h''| + |phi'/phi| |h'|)."""
    p = spec.p
    vals, scales = [], []
    for r in rs:
        h1, h2 = spec.dh(r)
        phi, d1, _ = eval_warp(w, r)
        q = d1 / phi
        f = abs(h1) ** (p - 2)
        vals.append(f * ((p - 1) * h2 + q * h1))
        scales.append(f * ((p - 1) * abs(h2) + abs(q) * abs(h1)))
    return np.array(vals), np.array(scales)


def verify_supersolution(w: WarpFn, spec: BarrierSpec, a: float, r_max: float,
                         samples: int = 512) -> float:
    """max over samples of Delta_p h / scale; <= 0 means h is a p-supersolution there."""
    slack = sturm_check(w, spec, a, r_max, samples)
    if slack < -1e-10:
        raise NotApplicable(f"Sturm comparison fails on [{a:g}, {r_max:g}] (slack {slack:.3g})")
    rs = _samples((a, r_max), samples)
    vals, scales = barrier_p_laplacian(w, spec, rs)
    return float(np.max(vals / scales))


def remark_check(p: float, r_range: Sequence[float], samples: int = 64) -> bool:
    """(p-2) > 1/log r on samples, i.e. the bound in (ii) dominates the one in (i)."""
    if not p > 2:
        raise ValueError("needs p > 2")
    if r_range[0] <= math.exp(1.0 / (p - 2)):
        raise ValueError(f"r_range must start beyond e^(1/(p-2)) = {math.exp(1 / (p - 2)):.6g}")
    return bool(all((p - 2) > 1.0 / math.log(r) for r in _samples(r_range, samples)))
