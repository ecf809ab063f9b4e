"""The verification suite behind ``harmcone verify``.

Every check reproduces one quantitative claim at desk scale and reports
the measured value next to its threshold.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import ConeSpec, ball_volume, doubling_ratios
from .liouville import (corollary_dimension_threshold, minimal_dimension, riccati_coefficient_a,
                        slp_dimension, verify_riccati_lower_bound, verify_sqrt_inequality)
from .modes import fit_growth, integrate_mode
from .pbarrier import (BarrierSpec, barrier_p_laplacian, verify_inequality_chain,
                       verify_supersolution)
from .quadrature import cumulative
from .spectral import BoundaryData, extend_harmonic, fd_oracle
from .warp import WarpFn, builtin_catalog, eval_warp, get_warp, validate_warp, warp_from_expr

__all__ = ["CheckResult", "SuiteCheck", "CHECKS", "CHECKSETS", "run_suite"]

CHECKSETS = ("warp", "geometry", "modes", "liouville", "spectral", "pbarrier")


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    anchor: str
    status: str  # PASS | FAIL | SKIP
    measured: float
    threshold: float
    detail: str = ""
    seconds: float = 0.0


@dataclass(frozen=True)
class SuiteCheck:
    check_id: str
    checkset: str
    anchor: str
    run: Callable[[], tuple[float, float, bool, str]]


# --------------------------------------------------------------------------
# individual checks; each returns (measured, threshold, passed, detail)


def euler_exactness():
    worst = 0.0
    for n in (2, 3, 4, 7):
        cone = ConeSpec(n, get_warp("euclidean"))
        for m in range(1, 9):
            mode = integrate_mode(cone, m, 100.0)
            exact = mode.gamma * math.log(100.0)
            worst = max(worst, abs(mode.log_phi[-1] - exact) / exact)
    return worst, 1e-8, worst <= 1e-8, "max relative error of log phi_m(100), n in {2,3,4,7}, m<=8"


def closed_form_2d():
    worst = 0.0
    for name in ("half_sin", "r_log_r"):
        w = get_warp(name)
        cone = ConeSpec(2, w)
        for m in range(1, 6):
            mode = integrate_mode(cone, m, 100.0)
            sel = mode.grid >= 2.0 * (1 - 1e-12)
            rs = mode.grid[sel]
            if m == 1:
                inv = np.asarray(cumulative(lambda s: 1.0 / eval_warp(w, s)[0], rs,
                                            tol=1e-12, log=True, start=1.0))
            err = np.abs(np.expm1(mode.log_phi[sel] - m * inv))
            worst = max(worst, float(err.max()))
    return worst, 1e-6, worst <= 1e-6, "relative error of phi_m vs exp(m int 1/phi) on [2, 100]"


def riccati_bound():
    worst = math.inf
    for name in ("half_sin", "power_beta(0.5)"):
        for n in range(3, 11):
            worst = min(worst, verify_riccati_lower_bound(ConeSpec(n, get_warp(name)), 10, 100.0))
    return worst, -1e-9, worst >= -1e-9, "min of x_m - k_m phi^(n-2) on [1, 100], n=3..10, m<=10"


def dimension_threshold():
    t = corollary_dimension_threshold(1.0)
    err = abs(t - (4 + 2 * math.sqrt(2)))
    ok = err <= 1e-12 and minimal_dimension(1.0) == 7
    return err, 1e-12, ok, f"threshold {t:.15g}, minimal integer n = {minimal_dimension(1.0)}"


def quadratic_growth():
    mode = integrate_mode(ConeSpec(2, get_warp("half_sin")), 1, 1e4)
    fit = fit_growth(mode, (1e3, 1e4))
    d = fit.exponent
    return d, 2.0, 1.9 <= d <= 2.1, f"{fit.label()} on [1e3, 1e4]; accepted range [1.9, 2.1]"


def doubling_counterexample():
    rep = doubling_ratios(ConeSpec(2, get_warp("bump_counterexample")), [6.0, 12.0, 18.0])
    margins = []
    for k, ratio in zip((1, 2, 3), rep.ratios):
        margins.append(ratio / (math.exp(6 * k - 7) * (math.e - 1)))
    flat = 0.0
    for n in (2, 3, 4, 7):
        c = ConeSpec(n, get_warp("euclidean"))
        for R in (1.0, 5.0, 25.0):
            flat = max(flat, abs(ball_volume(c, 2 * R) / ball_volume(c, R) / 2 ** n - 1))
    ok = min(margins) >= 1.0 and flat <= 1e-9
    return min(margins), 1.0, ok, (f"min ratio / lower bound over k=1..3; "
                                   f"flat control error {flat:.3g}; verdict {rep.verdict}")


def slp_failure():
    rep = slp_dimension(ConeSpec(3, get_warp("r_log_r")), 1.0, 12, 1e6, (1e3, 1e6))
    kinds = [row[3].kind for row in rep.rows]
    n_log = sum(k == "LogPower" for k in kinds)
    ok = n_log == 12 and rep.verdict == "InfiniteEvidence"
    return float(n_log), 12.0, ok, f"modes fitting LogPower; verdict {rep.verdict}"


def spectral_oracle():
    flat = get_warp("euclidean")
    data = BoundaryData(1.0, 0.0, ((1, 1.0, 0.0),))
    errs = []
    for N in (128, 256):
        f = fd_oracle(flat, data, N, N)
        errs.append(float(np.max(np.abs(f.values - np.outer(f.r_grid, np.cos(f.theta_grid))))))
    hs = get_warp("half_sin")
    data10 = BoundaryData(10.0, 0.0, ((1, 1.0, 0.0),))
    f = fd_oracle(hs, data10, 256, 256)
    s = extend_harmonic(hs, data10, f.r_grid, f.theta_grid)
    diff = float(np.max(np.abs(f.values - s.values)))
    ok = errs[0] <= 5e-3 and errs[1] <= 0.35 * errs[0] and diff <= 1e-2
    return diff, 1e-2, ok, (f"flat error {errs[0]:.3g} -> {errs[1]:.3g} "
                            f"(ratio {errs[1] / errs[0]:.3f}); half_sin spectral vs FD {diff:.3g}")


def barrier_closed_form():
    spec = BarrierSpec(2.0, 1.0)
    rs = np.geomspace(3.0, 1e6, 64)
    err = max(abs(spec.h_quad(r) - math.log(math.log(r))) for r in rs)
    tail = np.geomspace(1e3, 1e6, 64)
    ratio = np.array([spec.h_quad(r) / math.log(math.log(r)) for r in tail])
    drift = float((ratio.max() - ratio.min()) / abs(ratio.mean()))
    ok = err <= 1e-8 and drift <= 0.05
    return err, 1e-8, ok, f"h vs log log r on [3, 1e6]; h/log log r drift {drift:.3g} on [1e3, 1e6]"


def inequality_chains():
    worst = 0.0
    for p in (2.0, 2.5, 3.0, 4.0):
        for R in (1.0, 2.0):
            worst = max(worst, verify_inequality_chain(p, R, (R * 1.1, 1e4), 512))
    return worst, 1e-12, worst <= 1e-12, "relative violation of both chains, p in {2,2.5,3,4}, R in {1,2}"


def supersolution():
    flat = get_warp("euclidean")
    worst = -math.inf
    for p in (2.0, 3.0):
        worst = max(worst, verify_supersolution(flat, BarrierSpec(p, 1.0), math.e, 100.0))
    border = 0.0
    for p in (2.0, 3.0):
        z = warp_from_expr("z", f"(r*log(r))^{p - 1:g}")
        rs = np.geomspace(math.e, 100.0, 512)
        vals, scales = barrier_p_laplacian(z, BarrierSpec(p, 1.0), rs)
        border = max(border, float(np.max(np.abs(vals) / scales)))
    ok = worst <= 1e-10 and border <= 1e-8
    return worst, 1e-10, ok, f"max Delta_p h/scale on flat cone; borderline metric |.| {border:.3g}"


def sqrt_and_monotone():
    viol = verify_sqrt_inequality(10_000)
    lams = (0.5, 1.0, 2.0, 4.0, 8.0, 16.0)
    mono = all(
        all(b > a for a, b in zip(vals, vals[1:]))
        for vals in ([riccati_coefficient_a(n, beta, l) for l in lams]
                     for n, beta in ((3, 1.0), (7, 1.0), (7, 2.0)))
    )
    return viol, 0.0, viol <= 0.0 and mono, f"sqrt inequality gap; a_m increasing: {mono}"


def catalog_valid():
    bad = []
    for w in builtin_catalog():
        rep = validate_warp(w, 200.0)
        for c in rep.checks:
            # the doubling counterexample is deliberately non-monotone
            if not c.passed and not (w.name == "bump_counterexample" and c.name == "monotone"):
                bad.append(f"{w.name}:{c.name}")
    return float(len(bad)), 0.0, not bad, ", ".join(bad) or "all catalog warps valid"


def user_warp_check(w: WarpFn, r_max: float):
    def run():
        rep = validate_warp(w, r_max)
        failed = [c.name for c in rep.checks if not c.passed]
        detail = (f"{w.name}: failed " + ", ".join(failed)) if failed else f"{w.name}: all invariants hold"
        return float(len(failed)), 0.0, not failed, detail
    return run


CHECKS: tuple[SuiteCheck, ...] = (
    SuiteCheck("warp.catalog", "warp", "catalog warps: standing assumptions on phi", catalog_valid),
    SuiteCheck("modes.euler", "modes", "radial equation: flat cone modes r^gamma", euler_exactness),
    SuiteCheck("modes.closed_form_2d", "modes", "surfaces: phi_m = exp(m int 1/phi)", closed_form_2d),
    SuiteCheck("modes.quadratic_growth", "modes", "half-sine example: quadratic growth",
               quadratic_growth),
    SuiteCheck("liouville.riccati_bound", "liouville", "Riccati lower bound x_m >= k phi^(n-2)",
               riccati_bound),
    SuiteCheck("liouville.threshold", "liouville", "dimension threshold n >= 7 for beta = 1",
               dimension_threshold),
    SuiteCheck("liouville.slp_failure", "liouville", "r log r warp: strong Liouville fails",
               slp_failure),
    SuiteCheck("liouville.sqrt_inequality", "liouville",
               "sqrt(1+x) - 1 >= x/(2 sqrt 2) and increasing a_m", sqrt_and_monotone),
    SuiteCheck("geometry.doubling", "geometry", "bump counterexample: doubling fails",
               doubling_counterexample),
    SuiteCheck("spectral.fd_oracle", "spectral", "harmonic extension vs finite differences",
               spectral_oracle),
    SuiteCheck("pbarrier.closed_form", "pbarrier", "barrier h ~ log log r", barrier_closed_form),
    SuiteCheck("pbarrier.chains", "pbarrier", "curvature thresholds: -z''/z chains",
               inequality_chains),
    SuiteCheck("pbarrier.supersolution", "pbarrier", "barrier is a p-supersolution",
               supersolution),
)


def run_suite(only: Optional[Sequence[str]] = None, user_warp: Optional[WarpFn] = None,
              r_max: float = 100.0, progress: Optional[Callable[[CheckResult], None]] = None
              ) -> list[CheckResult]:
    checks = list(CHECKS)
    if user_warp is not None:
        checks.insert(0, SuiteCheck("warp.user", "warp", "selected warp: standing assumptions",
                                    user_warp_check(user_warp, r_max)))
    if only:
        unknown = set(only) - set(CHECKSETS)
        if unknown:
            raise ValueError(f"unknown checkset(s): {', '.join(sorted(unknown))}; "
                             f"choose from {', '.join(CHECKSETS)}")
        checks = [c for c in checks if c.checkset in only]
    results = []
    for c in checks:
        t0 = time.perf_counter()
        try:
            measured, threshold, ok, detail = c.run()
            status = "PASS" if ok else "FAIL"
        except Exception as exc:  # a crashing check is a failed check
            measured, threshold, status, detail = math.nan, math.nan, "FAIL", f"error: {exc}"
        res = CheckResult(c.check_id, c.anchor, status, float(measured), float(threshold),
                          detail, time.perf_counter() - t0)
        results.append(res)
        if progress is not None:
            progress(res)
    return results
