"""Harmonic extension on a rotationally symmetric surface.

A boundary function on the circle r = R with Fourier coefficients
(a_m, b_m) extends harmonically as

    u(r, theta) = a0 + sum_m (phi_m(r)/phi_m(R)) (a_m cos m theta + b_m sin m theta),

where phi_m is the nondecreasing radial mode.  :func:`fd_oracle` solves the
same Dirichlet problem by finite differences as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import spsolve

from .geometry import ConeSpec
from .modes import integrate_mode, mode_2d_closed_form
from .warp import WarpFn, eval_warp

__all__ = [
    "BoundaryData", "HarmonicField", "SolverError", "analyze_boundary", "mode_ratios",
    "extend_harmonic", "coefficient_scaling_check", "plancherel_norm", "fd_oracle",
]


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class BoundaryData:
    """Trigonometric coefficients of boundary values on the circle of radius R."""

    R: float
    a0: float
    coeffs: tuple[tuple[int, float, float], ...] = ()  # (m, a_m, b_m)

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("R must be positive")
        coeffs = tuple((int(m), float(a), float(b)) for m, a, b in self.coeffs)
        ms = [m for m, _, _ in coeffs]
        if any(m < 1 for m in ms) or any(b <= a for a, b in zip(ms, ms[1:])):
            raise ValueError("modes must be >= 1 and strictly increasing")
        if not all(math.isfinite(v) for _, a, b in coeffs for v in (a, b)) \
                or not math.isfinite(self.a0):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "a0", float(self.a0))

    @property
    def max_mode(self) -> int:
        return self.coeffs[-1][0] if self.coeffs else 0

    def active(self) -> list[tuple[int, float, float]]:
        return [c for c in self.coeffs if c[1] != 0.0 or c[2] != 0.0]

    def evaluate(self, theta) -> np.ndarray:
        th = np.asarray(theta, dtype=float)
        out = np.full_like(th, self.a0)
        for m, a, b in self.coeffs:
            out = out + a * np.cos(m * th) + b * np.sin(m * th)
        return out


@dataclass(frozen=True, eq=False)
class HarmonicField:
    r_grid: np.ndarray
    theta_grid: np.ndarray
    values: np.ndarray  # shape (len(r_grid), len(theta_grid))


def analyze_boundary(samples: Sequence[tuple[float, float]], M: int, R: float = 1.0) -> BoundaryData:
    """Discrete Fourier coefficients up to mode M from uniformly spaced samples."""
    if M < 0:
        raise ValueError("M must be nonnegative")
    th = np.array([s[0] for s in samples], dtype=float)
    u = np.array([s[1] for s in samples], dtype=float)
    N = len(th)
    if N < max(4 * M, 1):
        raise ValueError(f"need at least 4M = {4 * M} samples, got {N}")
    step = 2.0 * math.pi / N
    expected = th[0] + step * np.arange(N)
    if np.max(np.abs(th - expected)) > 1e-9 * max(1.0, abs(th[0]) + 2 * math.pi):
        raise ValueError("samples must be uniformly spaced over one period")
    coeffs = []
    for m in range(1, M + 1):
        a = 2.0 / N * float(np.dot(u, np.cos(m * th)))
        b = 2.0 / N * float(np.dot(u, np.sin(m * th)))
        coeffs.append((m, a, b))
    return BoundaryData(R, float(u.mean()), tuple(coeffs))


def mode_ratios(w: WarpFn, ms: Sequence[int], R: float, r_values, tol: float = 1e-10) -> dict:
    """phi_m(r)/phi_m(R) for each m, from log-space mode samples."""
    rv = np.asarray(r_values, dtype=float)
    if np.any(rv < 0) or np.any(rv > R * (1 + 1e-12)):
        raise ValueError("radii must lie in [0, R]")
    cone = ConeSpec(2, w)
    out = {}
    for m in ms:
        mode = integrate_mode(cone, m, max(R, 2.0), tol)
        LR = mode.log_phi_at(R)
        out[m] = np.array([0.0 if r == 0 else min(1.0, math.exp(mode.log_phi_at(r) - LR))
                           for r in rv])
    return out


def extend_harmonic(w: WarpFn, data: BoundaryData, r_grid, theta_grid,
                    tol: float = 1e-10) -> HarmonicField:
    rg = np.asarray(r_grid, dtype=float)
    tg = np.asarray(theta_grid, dtype=float)
    active = data.active()
    ratios = mode_ratios(w, [m for m, _, _ in active], data.R, rg, tol)
    vals = np.full((len(rg), len(tg)), data.a0)
    for m, a, b in active:
        ang = a * np.cos(m * tg) + b * np.sin(m * tg)
        vals += np.outer(ratios[m], ang)
    return HarmonicField(rg, tg, vals)


def coefficient_scaling_check(w: WarpFn, data1: BoundaryData, R2: float,
                              tol: float = 1e-10) -> float:
    """Largest deviation between re-analyzed coefficients at R2 and the predicted scaling.

    The field at r = R2 comes from the integrated modes; the prediction
    a_m exp(m integral_1^R2 1/phi) comes from quadrature, so the two routes
    share nothing but the warp.
    """
    if not R2 > 1 or abs(data1.R - 1.0) > 1e-15:
        raise ValueError("data must sit at R = 1 and R2 must exceed 1")
    active = data1.active()
    if not active:
        return 0.0
    M = data1.max_mode
    N = max(64, 8 * M)
    th = 2.0 * math.pi * np.arange(N) / N
    u = np.full(N, data1.a0)
    cone = ConeSpec(2, w)
    for m, a, b in active:
        mode = integrate_mode(cone, m, max(R2, 2.0), tol)
        ratio = math.exp(mode.log_phi_at(R2))  # phi_m(1) = 1
        u += ratio * (a * np.cos(m * th) + b * np.sin(m * th))
    got = analyze_boundary(list(zip(th, u)), M, R2)
    err = abs(got.a0 - data1.a0)
    predicted = {m: math.exp(mode_2d_closed_form(w, m, R2)) for m, _, _ in active}
    given = {m: (a, b) for m, a, b in data1.coeffs}
    for m, ga, gb in got.coeffs:
        a, b = given.get(m, (0.0, 0.0))
        s = predicted.get(m, 0.0)
        err = max(err, abs(ga - s * a), abs(gb - s * b))
    return err


def plancherel_norm(w: WarpFn, data: BoundaryData, r: float, tol: float = 1e-10) -> float:
    """Squared L^2 norm of u on the circle of radius r, area density phi(r)."""
    if not r > 0:
        raise ValueError("r must be positive")
    phi = eval_warp(w, r)[0]
    active = data.active()
    ratios = mode_ratios(w, [m for m, _, _ in active], data.R, [r], tol) if active else {}
    total = data.a0 ** 2
    for m, a, b in active:
        total += 0.5 * ratios[m][0] ** 2 * (a * a + b * b)
    return 2.0 * math.pi * phi * total


def fd_oracle(w: WarpFn, data: BoundaryData, nr: int, ntheta: int,
              residual_tol: float = 1e-10) -> HarmonicField:
    """Second-order finite differences for u_rr + (phi'/phi) u_r + u_thth/phi^2 = 0.

    Grid r_i = i R/nr, i = 0..nr, and theta_j = 2 pi j/ntheta.  The vertex
    row is pinned to a0 (bounded solutions have that value there) and the
    outer row carries the Dirichlet data.
    """
    if nr < 32 or ntheta < 32:
        raise ValueError("grid sizes must be at least 32")
    if data.max_mode > ntheta // 8:
        raise ValueError(f"data has mode {data.max_mode}; the grid resolves up to {ntheta // 8}")
    R = data.R
    dr = R / nr
    dth = 2.0 * math.pi / ntheta
    r = dr * np.arange(nr + 1)
    th = dth * np.arange(ntheta)
    boundary = data.evaluate(th)

    ni = nr - 1  # interior rings i = 1..nr-1
    idx = lambda i, j: (i - 1) * ntheta + (j % ntheta)
    rows, cols, vals = [], [], []
    rhs = np.zeros(ni * ntheta)
    for i in range(1, nr):
        phi, d1, _ = eval_warp(w, r[i])
        g = d1 / phi
        am = 1.0 / dr**2 - g / (2 * dr)
        ap = 1.0 / dr**2 + g / (2 * dr)
        at = 1.0 / (phi * phi * dth * dth)
        diag = -2.0 / dr**2 - 2.0 * at
        for j in range(ntheta):
            k = idx(i, j)
            rows += [k, k, k]
            cols += [k, idx(i, j - 1), idx(i, j + 1)]
            vals += [diag, at, at]
            if i > 1:
                rows.append(k); cols.append(idx(i - 1, j)); vals.append(am)
            else:
                rhs[k] -= am * data.a0
            if i < nr - 1:
                rows.append(k); cols.append(idx(i + 1, j)); vals.append(ap)
            else:
                rhs[k] -= ap * boundary[j]
    A = coo_matrix((vals, (rows, cols)), shape=(ni * ntheta, ni * ntheta)).tocsr()
    sol = spsolve(A, rhs)
    scale = max(np.linalg.norm(rhs), 1e-300)
    res = np.linalg.norm(A @ sol - rhs) / scale
    if not np.all(np.isfinite(sol)) or res > residual_tol:
        raise SolverError(f"linear solve did not converge (relative residual {res:.3g})")
    vals_grid = np.empty((nr + 1, ntheta))
    vals_grid[0] = data.a0
    vals_grid[1:nr] = sol.reshape(ni, ntheta)
    vals_grid[nr] = boundary
    return HarmonicField(r, th, vals_grid)
