"""Liouville and strong-Liouville diagnostics built on the Riccati bounds.

Writing phi_m = B exp(integral lambda^2 x / phi^(n-1)) turns the radial
equation into the Riccati equation

    x' + (lambda^2 / phi^(n-1)) x^2 = phi^(n-3).

When phi' <= beta, k phi^(n-2) is a subsolution as long as
k beta (n-2) + lambda^2 k^2 <= 1, which gives x >= k phi^(n-2) with k the
positive root, and hence phi_m >= B exp(lambda^2 k integral 1/phi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import ConeSpec
from .modes import GrowthFit, fit_growth, integrate_mode
from .quadrature import cumulative
from .warp import eval_warp

__all__ = [
    "NotApplicable", "riccati_coefficient_a", "riccati_bound_coefficient",
    "growth_rate_coefficient", "corollary_dimension_threshold", "minimal_dimension",
    "min_growth_exponent", "verify_riccati_lower_bound", "verify_sqrt_inequality",
    "LiouvilleVerdict", "liouville_verdict", "SlpReport", "slp_dimension",
]


class NotApplicable(ValueError):
    """The hypotheses of a bound are not met for the given input."""


def _sqrt1p_minus_1(v: float) -> float:
    # sqrt(1+v) - 1 without cancellation for small v
    return v / (math.sqrt(1.0 + v) + 1.0)


def _check_args(n: int, beta: float, lam: float) -> float:
    if n < 3:
        raise NotApplicable("the Riccati coefficient needs n >= 3; surfaces use the closed form")
    if not beta > 0 or not lam > 0:
        raise ValueError("beta and lambda must be positive")
    return beta * (n - 2)


def riccati_coefficient_a(n: int, beta: float, lam: float) -> float:
    """a = (lambda / (2 beta (n-2))) [sqrt(1 + 4 lambda^2/(beta^2 (n-2)^2)) - 1].

    This is the coefficient as usually printed.  It is increasing in lambda
    but does not bound x_m / phi^(n-2) from below; for that use
    :func:`riccati_bound_coefficient`.
    """
    c = _check_args(n, beta, lam)
    return lam / (2.0 * c) * _sqrt1p_minus_1(4.0 * lam * lam / (c * c))


def riccati_bound_coefficient(n: int, beta: float, lam: float) -> float:
    """k with x_m >= k phi^(n-2): the positive root of lambda^2 k^2 + beta (n-2) k = 1."""
    c = _check_args(n, beta, lam)
    return 2.0 / (c * (math.sqrt(1.0 + 4.0 * lam * lam / (c * c)) + 1.0))


def growth_rate_coefficient(n: int, beta: float, lam: float) -> float:
    """lambda^2 k: phi_m grows at least like exp(lambda^2 k integral_1^r 1/phi).

    Tends to lambda as beta (n-2) -> 0, matching the surface case.
    """
    c = _check_args(n, beta, lam)
    return 0.5 * c * _sqrt1p_minus_1(4.0 * lam * lam / (c * c))


def corollary_dimension_threshold(beta: float) -> float:
    """Smallest real n with 4(n-1) <= beta^2 (n-2)^2, i.e. 4 lambda_1^2 <= (beta (n-2))^2."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    s = 1.0 + 1.0 / (beta * beta)
    return 2.0 * s + 2.0 * math.sqrt(s * s - s)


def minimal_dimension(beta: float) -> int:
    return math.ceil(corollary_dimension_threshold(beta) - 1e-12)


def min_growth_exponent(n: int, beta: float) -> float:
    """Polynomial rate (n-1) / (sqrt(2) beta^2 (n-2)) that non-constant harmonic functions must beat."""
    if n < minimal_dimension(beta):
        raise NotApplicable(
            f"n={n} is below the dimension threshold {corollary_dimension_threshold(beta):.6g} "
            f"for beta={beta:g}")
    return (n - 1) / (math.sqrt(2.0) * beta * beta * (n - 2))


def verify_riccati_lower_bound(c: ConeSpec, m_max: int, r_max: float = 100.0,
                               coefficient: str = "bound", r_min: float = 1.0,
                               tol: float = 1e-10) -> float:
    """min over modes 1..m_max and samples in [r_min, r_max] of x_m - k_m phi^(n-2).

    ``coefficient="bound"`` uses :func:`riccati_bound_coefficient`;
    ``"printed"`` uses :func:`riccati_coefficient_a`, which the flat cone
    already violates.  Samples start at r = 1 because the startup value of
    x near the vertex is not pinned down by the comparison argument.
    """
    if c.warp.beta is None:
        raise NotApplicable(f"warp {c.warp.name} declares no bound beta on phi'")
    if c.n < 3:
        raise NotApplicable("needs n >= 3")
    coef_fn = {"bound": riccati_bound_coefficient, "printed": riccati_coefficient_a}[coefficient]
    worst = math.inf
    for m in range(1, m_max + 1):
        mode = integrate_mode(c, m, r_max, tol)
        k = coef_fn(c.n, c.warp.beta, math.sqrt(mode.lambda_sq))
        sel = mode.grid >= r_min * (1 - 1e-12)
        phi = np.array([eval_warp(c.warp, r)[0] for r in mode.grid[sel]])
        slack = mode.x[sel] - k * phi ** (c.n - 2)
        worst = min(worst, float(slack.min()))
    return worst


def verify_sqrt_inequality(samples: int = 10_000) -> float:
    """max over a uniform grid on [0, 1] of x/(2 sqrt 2) - (sqrt(1+x) - 1); should be <= 0."""
    if samples < 100:
        raise ValueError("need at least 100 samples")
    x = np.linspace(0.0, 1.0, samples)
    gap = x / (2.0 * math.sqrt(2.0)) - x / (np.sqrt(1.0 + x) + 1.0)
    return float(gap.max())


# --------------------------------------------------------------------------
# divergence of integral 1/phi


@dataclass(frozen=True)
class LiouvilleVerdict:
    """Evidence on whether integral_1^inf 1/phi diverges.

    ``growth_class`` is how I(r) = integral_1^r 1/phi behaves over the last
    two decades: ``log`` (a + b log r), ``power`` (a + b r^alpha,
    alpha > 0), ``loglog`` (a + b log log r) or ``bounded`` (alpha < 0).
    ``A_samples`` holds A(r) = exp(coef * I(r)), the growth every
    non-constant harmonic function must exceed, when such a bound applies.
    """

    integral_diverges: bool
    growth_class: str
    alpha: float
    fit_residual: float
    r_samples: tuple[float, ...]
    integral_samples: tuple[float, ...]
    A_coefficient: Optional[float]
    A_samples: Optional[tuple[float, ...]]
    min_growth_poly: Optional[float]
    notes: tuple[str, ...] = field(default=())


_ALPHAS = np.round(np.arange(-300, 301) / 100.0, 2)
ALPHA_LOG = 0.02


def _fit(feat: np.ndarray, I: np.ndarray) -> tuple[float, float]:
    A = np.column_stack([np.ones_like(feat), feat])
    coef, *_ = np.linalg.lstsq(A, I, rcond=None)
    dev = I - A @ coef
    return float(np.sqrt(np.mean(dev * dev))), float(np.max(np.abs(dev)))


def _classify_tail(rs: np.ndarray, I: np.ndarray) -> tuple[str, float, float]:
    """Pick the model family with the smallest RMS deviation.

    Returns (class, alpha, max deviation relative to the spread of I).
    """
    scale = max(1.0, float(np.ptp(I)))
    best = (math.inf, 0.0, 0.0)
    for alpha in _ALPHAS:
        feat = np.log(rs) if alpha == 0 else (rs ** alpha - 1.0) / alpha
        rms, worst = _fit(feat, I)
        if rms < best[0]:
            best = (rms, float(alpha), worst)
    rms_ll, worst_ll = _fit(np.log(np.log(rs)), I)
    rms, alpha, worst = best
    if rms_ll < rms:
        return "loglog", math.nan, worst_ll / scale
    if abs(alpha) <= ALPHA_LOG:
        return "log", alpha, worst / scale
    return ("power" if alpha > 0 else "bounded"), alpha, worst / scale


def liouville_verdict(c: ConeSpec, r_max: float = 1e4, per_decade: int = 16,
                      tol: float = 1e-9, tail_samples: int = 256) -> LiouvilleVerdict:
    """Classify the tail of integral_1^r 1/phi and attach the growth floor A(r)."""
    if r_max < 1e3:
        raise ValueError("r_max must be at least 1e3")
    decades = math.log10(r_max)
    count = max(2, int(round(decades * per_decade)) + 1)
    rs = np.geomspace(1.0, r_max, count)
    inv = lambda s: 1.0 / eval_warp(c.warp, s)[0]
    tail_rs = np.geomspace(r_max / 100.0, r_max, tail_samples)
    # one pass over the merged grid; the warp may be expensive to integrate
    merged = np.union1d(rs, tail_rs)
    I_all = np.asarray(cumulative(inv, merged, tol=tol, log=True, start=1.0))
    I = I_all[np.searchsorted(merged, rs)]
    tail_I = I_all[np.searchsorted(merged, tail_rs)]
    cls, alpha, res = _classify_tail(tail_rs, tail_I)
    diverges = cls != "bounded"

    notes = []
    coef = None
    if c.n == 2:
        coef = 1.0
        notes.append("surface: mode 1 is exp(integral 1/phi) exactly")
    elif c.warp.beta is not None:
        lam1 = math.sqrt(c.eigendata(1)[0])
        coef = growth_rate_coefficient(c.n, c.warp.beta, lam1)
        notes.append(f"A(r) uses lambda_1^2 k_1 = {coef:.12g} from the Riccati subsolution")
    else:
        notes.append("no declared beta: Riccati growth floor unavailable")
    A = None
    if coef is not None:
        with np.errstate(over="ignore"):
            A = tuple(float(v) for v in np.exp(coef * I))

    mgp = None
    if c.n >= 3 and c.warp.beta is not None:
        try:
            mgp = min_growth_exponent(c.n, c.warp.beta)
        except NotApplicable as exc:
            notes.append(str(exc))
    if not diverges:
        notes.append("integral 1/phi appears bounded: this criterion gives no Liouville certificate")
    return LiouvilleVerdict(
        integral_diverges=diverges, growth_class=cls, alpha=float(alpha), fit_residual=res,
        r_samples=tuple(float(r) for r in rs), integral_samples=tuple(float(v) for v in I),
        A_coefficient=coef, A_samples=A, min_growth_poly=mgp, notes=tuple(notes),
    )


# --------------------------------------------------------------------------
# strong Liouville


@dataclass(frozen=True)
class SlpReport:
    """Count of harmonic functions with growth at most r^d among examined modes.

    ``verdict`` is ``Finite`` (some examined mode outgrows r^d, so the count
    is complete), ``InfiniteEvidence`` (every examined mode stays below r^d
    and phi/r keeps increasing) or ``Inconclusive``.
    """

    d: float
    counted_dim: int
    truncation_m: int
    verdict: str
    rows: tuple[tuple[int, float, int, GrowthFit], ...]  # (m, lambda_sq, multiplicity, fit)
    guidance: str = ""

    @property
    def exponents(self) -> list[float]:
        return [row[3].exponent for row in self.rows]


EXPONENT_SLACK = 1e-6


def slp_dimension(c: ConeSpec, d: float, m_max: int, r_max: float = 1e6,
                  window: Optional[tuple[float, float]] = None, tol: float = 1e-10) -> SlpReport:
    """Fit modes 1..m_max and count those growing no faster than r^d."""
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    if not d > 0:
        raise ValueError("d must be positive")
    if c.max_mode is not None and m_max > c.max_mode:
        raise ValueError(f"link spectrum only has {c.max_mode} modes")
    window = window or (r_max / 1000.0, r_max)
    rows = []
    count = 1
    for m in range(1, m_max + 1):
        mode = integrate_mode(c, m, r_max, tol)
        fit = fit_growth(mode, window)
        lam_sq, mult = c.eigendata(m)
        rows.append((m, float(lam_sq), int(mult), fit))
        if fit.exponent <= d + EXPONENT_SLACK:
            count += mult
    if any(row[3].exponent > d + EXPONENT_SLACK for row in rows):
        return SlpReport(d, count, m_max, "Finite", tuple(rows))

    rs = np.geomspace(window[0], window[1], 32)
    ratio = np.array([eval_warp(c.warp, r)[0] / r for r in rs])
    growing = bool(np.all(np.diff(ratio) >= 0) and ratio[-1] > ratio[0] * (1 + 1e-3))
    if growing:
        return SlpReport(d, count, m_max, "InfiniteEvidence", tuple(rows),
                         "every examined mode grows slower than r^d while phi/r increases")
    return SlpReport(d, count, m_max, "Inconclusive", tuple(rows),
                     "no examined mode exceeds r^d; raise m_max")
