"""Cones over a link N: eigen-data, curvature, ball volumes and doubling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .expr import DomainError
from .quadrature import simpson
from .warp import WarpFn, eval_warp

__all__ = [
    "ConeSpec", "sphere_eigendata", "sphere_volume", "radial_curvature", "ball_volume",
    "DoublingReport", "doubling_ratios", "total_curvature_2d", "TotalCurvature",
]


def sphere_volume(dim: int) -> float:
    """Volume of the unit round sphere S^dim."""
    k = dim + 1
    return 2.0 * math.pi ** (k / 2) / math.gamma(k / 2)


def sphere_eigendata(n: int, m: int) -> tuple[int, int]:
    """Eigenvalue lambda_m^2 and multiplicity on the round S^(n-1)."""
    if n < 2 or m < 0:
        raise ValueError("need n >= 2 and m >= 0")
    lam_sq = m * (m + n - 2)
    if m == 0:
        return 0, 1
    # harmonic homogeneous polynomials of degree m in n variables
    mult = math.comb(m + n - 1, n - 1) - (math.comb(m + n - 3, n - 1) if m >= 2 else 0)
    return lam_sq, mult


@dataclass(frozen=True)
class ConeSpec:
    """Dimension, warp and link spectrum of a cone.

    ``link=None`` is the round sphere.  A custom link is a sequence of
    ``(lambda_sq, multiplicity)`` for m = 1, 2, ... in strictly increasing
    order; the constant eigenfunction (m = 0) is implicit.
    """

    n: int
    warp: WarpFn
    link: Optional[tuple[tuple[float, int], ...]] = None
    link_volume: Optional[float] = field(default=None)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("cone dimension must be at least 2")
        if self.link is not None:
            link = tuple((float(l), int(k)) for l, k in self.link)
            prev = 0.0
            for lam_sq, mult in link:
                if not lam_sq > prev or mult < 1:
                    raise ValueError("link eigenvalues must be positive, strictly increasing, "
                                     "with positive multiplicities")
                prev = lam_sq
            object.__setattr__(self, "link", link)
            if self.link_volume is None:
                raise ValueError("a custom link needs its volume")
        elif self.link_volume is None:
            object.__setattr__(self, "link_volume", sphere_volume(self.n - 1))
        if not self.link_volume > 0:
            raise ValueError("link_volume must be positive")

    @property
    def round_link(self) -> bool:
        return self.link is None

    @property
    def max_mode(self) -> Optional[int]:
        return None if self.link is None else len(self.link)

    def eigendata(self, m: int) -> tuple[float, int]:
        if self.link is None:
            return sphere_eigendata(self.n, m)
        if m == 0:
            return 0.0, 1
        if not 1 <= m <= len(self.link):
            raise IndexError(f"link spectrum has {len(self.link)} modes, asked for m={m}")
        return self.link[m - 1]


def radial_curvature(w: WarpFn, r: float) -> float:
    """Sectional curvature -phi''/phi of planes containing d/dr."""
    phi, _, dd = eval_warp(w, r)
    if not phi > 0:
        raise DomainError(f"phi({r!r}) = {phi!r} is not positive")
    return -dd / phi


def _density(c: ConeSpec):
    w, k = c.warp, c.n - 1

    def f(s: float) -> float:
        if s <= 0.0:
            return 0.0
        return eval_warp(w, s)[0] ** k
    return f


def ball_volume(c: ConeSpec, R: float, tol: float = 1e-10) -> float:
    """link_volume * integral_0^R phi^(n-1), to mixed tolerance ``tol``."""
    if not R > 0 or not tol > 0:
        raise ValueError("need R > 0 and tol > 0")
    return c.link_volume * simpson(_density(c), 0.0, R, tol=tol, rel_tol=tol)


@dataclass(frozen=True)
class DoublingReport:
    rows: tuple[tuple[float, float, float, float], ...]  # (R, vol_R, vol_2R, ratio)
    verdict: str  # "Bounded" | "Unbounded"
    kappa: float  # max ratio seen

    @property
    def ratios(self) -> list[float]:
        return [row[3] for row in self.rows]


def doubling_ratios(c: ConeSpec, R_list: Sequence[float], tol: float = 1e-10) -> DoublingReport:
    """Vol(B_2R)/Vol(B_R) for each R.

    The verdict is ``Unbounded`` when the ratio climbs past ten times its
    first value along the list, otherwise ``Bounded`` with kappa = max ratio.
    """
    Rs = [float(R) for R in R_list]
    if not Rs:
        raise ValueError("R_list is empty")
    if any(b <= a for a, b in zip(Rs, Rs[1:])) or Rs[0] <= 0:
        raise ValueError("R_list must be positive and increasing")
    f = _density(c)
    rows = []
    for R in Rs:
        # integrate [0, R] and [R, 2R] separately: the second piece dominates
        # for fast-growing warps and deserves its own relative tolerance
        v1 = c.link_volume * simpson(f, 0.0, R, tol=tol, rel_tol=tol)
        v2 = v1 + c.link_volume * simpson(f, R, 2 * R, tol=tol, rel_tol=tol)
        rows.append((R, v1, v2, v2 / v1))
    ratios = [row[3] for row in rows]
    kappa = max(ratios)
    verdict = "Unbounded" if kappa > 10.0 * ratios[0] else "Bounded"
    return DoublingReport(tuple(rows), verdict, kappa)


@dataclass(frozen=True)
class TotalCurvature:
    value: float
    diverges: bool
    slope: float  # growth per unit r of the running value over the last decade


def total_curvature_2d(w: WarpFn, r_max: float, tol: float = 1e-9,
                       slope_threshold: float = 1e-3) -> TotalCurvature:
    """2*pi * integral_0^r_max |phi''| for a surface, with a divergence flag.

    dA = phi dr dtheta and K = -phi''/phi, so |K| dA integrates to 2*pi |phi''|.
    """
    if not r_max > 1:
        raise ValueError("r_max must exceed 1")
    f = lambda s: abs(eval_warp(w, s)[2]) if s > 0 else abs(eval_warp(w, 1e-300)[2])
    # unit panels keep oscillating integrands resolved
    edges = [0.0] + [float(k) for k in range(1, int(math.floor(r_max)) + 1)]
    if edges[-1] < r_max:
        edges.append(r_max)
    r_tail = r_max / 10.0
    total = 0.0
    at_tail = None
    for a, b in zip(edges, edges[1:]):
        if a < r_tail < b:
            total += simpson(f, a, r_tail, tol=tol)
            at_tail = total
            total += simpson(f, r_tail, b, tol=tol)
        else:
            total += simpson(f, a, b, tol=tol)
            if b == r_tail:
                at_tail = total
    if at_tail is None:
        at_tail = 0.0
    value = 2 * math.pi * total
    slope = 2 * math.pi * (total - at_tail) / (r_max - r_tail)
    return TotalCurvature(value, slope > slope_threshold, slope)
