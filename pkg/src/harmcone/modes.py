"""Radial modes of the cone Laplacian and their growth.

A harmonic function on the cone separates as phi_m(r) f(omega) with f an
eigenfunction of the link.  The radial factor solves

    phi_m'' + (n-1) (phi'/phi) phi_m' - (lambda^2/phi^2) phi_m = 0.

Modes grow super-polynomially on some warps, so everything here lives in
log space.  With t = log r the state is (L, w) where L = log phi_m and
w = r phi_m'/phi_m; both stay moderate for any growth rate.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import ConeSpec
from .ode import StepBudgetError, StepSizeError, dopri45
from .quadrature import cumulative, simpson_log, simpson
from .warp import WarpFn, eval_warp

__all__ = [
    "ModeError", "RadialMode", "GrowthFit", "indicial_exponent", "integrate_mode",
    "integrate_modes", "mode_2d_closed_form", "inverse_warp_integral", "fit_growth",
    "output_grid", "R_START", "POINTS_PER_DECADE",
]

R_START = 1e-3
POINTS_PER_DECADE = 64
W_NOISE = 1e-6
MAX_STEPS = 200_000
GROWTH_CLASSES = ("Polynomial", "LogPower", "ExpIntegral")


class ModeError(RuntimeError):
    """Integration of a radial mode failed; ``r`` is where it happened."""

    def __init__(self, msg: str, r: float):
        super().__init__(f"{msg} at r={r:.6g}")
        self.r = r


def indicial_exponent(n: int, lambda_sq: float) -> float:
    """Nonnegative root of gamma(gamma-1) + (n-1) gamma = lambda^2."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if lambda_sq < 0:
        raise ValueError("lambda_sq must be nonnegative")
    b = n - 2
    disc = math.sqrt(b * b + 4.0 * lambda_sq)
    # conjugate form avoids cancellation when lambda is small against n
    return 2.0 * lambda_sq / (b + disc) if lambda_sq else 0.0


def output_grid(r_max: float, points_per_decade: int = POINTS_PER_DECADE,
                r_start: float = R_START) -> np.ndarray:
    """Log-spaced samples 10**(k/ppd) from r_start to r_max (r_max appended if off-grid)."""
    lo = round(math.log10(r_start) * points_per_decade)
    hi = math.floor(math.log10(r_max) * points_per_decade + 1e-9)
    grid = [10.0 ** (k / points_per_decade) for k in range(lo, hi + 1)]
    if grid[-1] < r_max * (1 - 1e-12):
        grid.append(float(r_max))
    return np.array(grid)


@dataclass(frozen=True, eq=False)
class RadialMode:
    """Samples of one radial mode, normalized so phi_m(1) = 1.

    ``w`` is the logarithmic derivative r phi_m'/phi_m and ``x`` the
    Riccati variable y phi^(n-1)/lambda^2 with y = phi_m'/phi_m.
    """

    m: int
    n: int
    lambda_sq: float
    gamma: float
    grid: np.ndarray
    log_phi: np.ndarray
    w: np.ndarray
    x: np.ndarray
    warp: WarpFn

    @property
    def r_start(self) -> float:
        return float(self.grid[0])

    @property
    def r_max(self) -> float:
        return float(self.grid[-1])

    @property
    def y(self) -> np.ndarray:
        return self.w / self.grid

    tol: float = 1e-10

    def _state_at(self, r: float) -> tuple[float, float]:
        """(log phi_m, w) at r, re-integrating from the nearest grid node below."""
        if not r > 0:
            raise ValueError("r must be positive")
        grid = self.grid
        if r < grid[0]:
            return float(self.log_phi[0] + self.gamma * math.log(r / grid[0])), self.gamma
        if r > grid[-1] * (1 + 1e-12):
            raise ValueError(f"r={r!r} beyond integrated range {grid[-1]!r}")
        i = min(bisect.bisect_right(grid, r) - 1, len(grid) - 1)
        if abs(r - grid[i]) <= 1e-14 * r:
            return float(self.log_phi[i]), float(self.w[i])
        rhs = _mode_rhs(self.n, self.warp, self.lambda_sq)
        t0 = math.log(grid[i])
        (state,) = dopri45(rhs, t0, [float(self.log_phi[i]), float(self.w[i])], [math.log(r)],
                          rtol=self.tol, atol=self.tol * 1e-2, h0=1e-3)
        return float(state[0]), float(state[1])

    def log_phi_at(self, r: float) -> float:
        """log phi_m(r); off-grid values come from a short integration, not interpolation."""
        return self._state_at(r)[0]

    def w_at(self, r: float) -> float:
        """r phi_m'(r)/phi_m(r)."""
        return self._state_at(r)[1]


def _mode_rhs(n: int, warp: WarpFn, lam_sq: float):
    """Right-hand side in t = log r for the state (log phi_m, r phi_m'/phi_m)."""
    nm1 = n - 1

    def rhs(t, s):
        r = math.exp(t)
        phi, d1, _ = eval_warp(warp, r)
        if not math.isfinite(phi) or not math.isfinite(d1):
            raise ModeError("warp or its derivative overflows double precision", r)
        q = r / phi
        # the exact flow keeps w >= 0 (w' = lambda^2 q^2 > 0 at w = 0); where phi
        # decreases, w = 0 repels and roundoff below it would otherwise grow
        w = max(s[1], 0.0)
        return [w, w + lam_sq * q * q - w * w - nm1 * (d1 * q) * w]

    return rhs


def integrate_mode(c: ConeSpec, m: int, r_max: float, tol: float = 1e-10,
                   points_per_decade: int = POINTS_PER_DECADE,
                   r_start: float = R_START) -> RadialMode:
    """Integrate mode ``m`` of cone ``c`` from the vertex out to ``r_max``."""
    if m < 1:
        raise ValueError("mode index must be at least 1")
    if not r_max > 1:
        raise ValueError("r_max must exceed 1")
    lam_sq, _ = c.eigendata(m)
    n, warp = c.n, c.warp
    gamma = indicial_exponent(n, lam_sq)
    nm1 = n - 1
    rhs = _mode_rhs(n, warp, lam_sq)

    # steps may overshoot w = 0 slightly; only a macroscopic sign change is an error
    w_floor = -W_NOISE

    def guard(t, s):
        if not (s[1] >= w_floor and math.isfinite(s[0])):
            raise ModeError(f"mode {m}: log-derivative left [0, inf) (w={s[1]!r})", math.exp(t))

    grid = output_grid(r_max, points_per_decade, r_start)
    ts = [math.log(r) for r in grid]
    t0 = ts[0]
    try:
        states = dopri45(rhs, t0, [gamma * t0, gamma], ts, rtol=tol, atol=tol * 1e-2,
                         h0=1e-3, check=guard, max_steps=MAX_STEPS)
    except StepSizeError as exc:
        raise ModeError(f"mode {m}: step size underflow", math.exp(exc.t)) from exc
    except StepBudgetError as exc:
        raise ModeError(f"mode {m}: integration stalled (more than {MAX_STEPS} steps)",
                        math.exp(exc.t)) from exc
    except ZeroDivisionError as exc:
        raise ModeError(f"mode {m}: warp vanished", math.nan) from exc

    L = np.array([s[0] for s in states])
    w = np.array([s[1] for s in states])
    i1 = int(np.argmin(np.abs(grid - 1.0)))
    L = L - L[i1]
    w = np.maximum(w, 0.0)
    phi = np.array([eval_warp(warp, r)[0] for r in grid])
    with np.errstate(divide="ignore", over="ignore"):
        log_x = np.log(w) - np.log(grid) + nm1 * np.log(phi) - math.log(lam_sq)
        x = np.exp(log_x)
    return RadialMode(m, n, float(lam_sq), gamma, grid, L, w, x, warp, tol)


def integrate_modes(c: ConeSpec, ms: Sequence[int], r_max: float, tol: float = 1e-10,
                    points_per_decade: int = POINTS_PER_DECADE) -> list[RadialMode]:
    return [integrate_mode(c, m, r_max, tol, points_per_decade) for m in ms]


def inverse_warp_integral(w: WarpFn, r: float, tol: float = 1e-11, base: float = 1.0) -> float:
    """integral_base^r ds / phi(s), negative for r < base."""
    if not r > 0:
        raise ValueError("r must be positive")
    f = lambda s: 1.0 / eval_warp(w, s)[0]
    return simpson_log(f, base, r, tol=tol)


def mode_2d_closed_form(w: WarpFn, m: int, r: float, tol: float = 1e-11) -> float:
    """log phi_m(r) = m * integral_1^r 1/phi for a surface."""
    if m < 1:
        raise ValueError("mode index must be at least 1")
    return m * inverse_warp_integral(w, r, tol)


# --------------------------------------------------------------------------
# growth fitting


@dataclass(frozen=True)
class GrowthFit:
    """Best growth model for log phi_m over ``fit_window``.

    ``kind`` is Polynomial (log phi ~ d log r), LogPower (~ q log log r) or
    ExpIntegral (~ c integral 1/phi); ``coef`` is d, q or c.  ``exponent``
    is the polynomial order this implies: d, 0 for log powers, and the
    local slope d log phi / d log r at the window end for ExpIntegral.
    ``ambiguous`` is set when another class fits about as well; the
    per-class residuals are kept in ``residuals``.
    """

    kind: str
    coef: float
    fit_window: tuple[float, float]
    residual: float
    slope_drift: float
    exponent: float
    ambiguous: bool = False
    alternatives: tuple[str, ...] = ()
    residuals: tuple[tuple[str, float, float], ...] = ()  # (kind, coef, residual)

    def label(self) -> str:
        sym = {"Polynomial": "d", "LogPower": "q", "ExpIntegral": "c"}[self.kind]
        return f"{self.kind}({sym}={self.coef:.6g})"


TIE_RATIO = 1.05
MIN_FIT_SAMPLES = 16


def _lsq(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float, float]:
    A = np.column_stack([np.ones_like(xs), xs])
    (a, b), *_ = np.linalg.lstsq(A, ys, rcond=None)
    res = float(np.max(np.abs(ys - (a + b * xs))))
    return float(a), float(b), res


def fit_growth(mode: RadialMode, window: tuple[float, float]) -> GrowthFit:
    """Fit log phi_m on ``window`` against the three growth classes.

    Classes whose residual is within 5% of the best (or below a small
    absolute floor) count as ties.  Among ties the simpler description wins
    in the order Polynomial, LogPower, ExpIntegral, since the exp-integral
    model reproduces the other two exactly on flat and r log r tails.
    """
    r_lo, r_hi = float(window[0]), float(window[1])
    if r_hi < 10 * r_lo * (1 - 1e-12):
        raise ValueError("fit window must span at least a decade")
    g = mode.grid
    if r_lo < g[0] * (1 - 1e-12) or r_hi > g[-1] * (1 + 1e-12):
        raise ValueError(f"window {window!r} outside integrated range [{g[0]:g}, {g[-1]:g}]")
    sel = (g >= r_lo * (1 - 1e-12)) & (g <= r_hi * (1 + 1e-12))
    if sel.sum() < MIN_FIT_SAMPLES:
        raise ValueError(f"only {int(sel.sum())} samples in window; need {MIN_FIT_SAMPLES}")
    rs = g[sel]
    L = mode.log_phi[sel]
    logr = np.log(rs)
    feats = {"Polynomial": logr}
    if r_lo > 1.0:
        feats["LogPower"] = np.log(logr)
    # running integral of 1/phi, anchored at the first sample
    inv = cumulative(lambda s: 1.0 / eval_warp(mode.warp, s)[0], rs, tol=1e-11, log=True)
    feats["ExpIntegral"] = np.asarray(inv)

    results = {}
    half = len(rs) // 2
    for kind, xs in feats.items():
        a, b, res = _lsq(xs, L)
        _, b1, _ = _lsq(xs[:half], L[:half])
        _, b2, _ = _lsq(xs[half:], L[half:])
        results[kind] = (b, res, b2 - b1)

    best = min(res for _, res, _ in results.values())
    floor = 1e-4 * max(1.0, float(L.max() - L.min()))
    limit = max(TIE_RATIO * best, floor)
    tied = [k for k in GROWTH_CLASSES if k in results and results[k][1] <= limit]
    kind = tied[0]
    coef, res, drift = results[kind]
    if kind == "Polynomial":
        exponent = coef
    elif kind == "LogPower":
        exponent = 0.0
    else:
        exponent = float(mode.w[sel][-1])
    return GrowthFit(
        kind=kind, coef=float(coef), fit_window=(r_lo, r_hi), residual=float(res),
        slope_drift=float(drift), exponent=float(exponent), ambiguous=len(tied) > 1,
        alternatives=tuple(k for k in tied if k != kind),
        residuals=tuple((k, float(v[0]), float(v[1])) for k, v in results.items()),
    )
