"""Dormand-Prince 5(4) integrator with PI step-size control.

Small systems only: states are plain lists, which is much faster than
numpy for two or three components.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

__all__ = ["StepSizeError", "StepBudgetError", "dopri45"]

# Butcher tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
# 5th minus embedded 4th order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFE = 0.9
_BETA = 0.04  # PI memory exponent
_EXP1 = 0.2 - 0.75 * _BETA
_FACMIN, _FACMAX = 0.2, 10.0


class StepSizeError(RuntimeError):
    def __init__(self, t: float, h: float):
        super().__init__(f"step size underflow at t={t!r} (h={h!r})")
        self.t = t
        self.h = h


class StepBudgetError(RuntimeError):
    def __init__(self, t: float, max_steps: int):
        super().__init__(f"step budget of {max_steps} exhausted at t={t!r}")
        self.t = t


def dopri45(fun: Callable[[float, list], list], t0: float, y0: Sequence[float],
            t_out: Sequence[float], rtol: float = 1e-10, atol: float = 1e-12,
            h0: float | None = None, h_min: float = 1e-12, h_max: float = math.inf,
            check: Callable[[float, list], None] | None = None,
            max_steps: int = 1_000_000) -> list[list[float]]:
    """Integrate y' = fun(t, y) from t0 and return the state at each ``t_out``.

    ``t_out`` must be nondecreasing and start at or after ``t0``; steps are
    shortened to land on every output time exactly.  ``check`` is called on
    every accepted state and may raise to abort.  More than ``max_steps``
    attempted steps raises :class:`StepBudgetError`.
    """
    y = [float(v) for v in y0]
    n = len(y)
    t = float(t0)
    k1 = fun(t, y)
    span = (t_out[-1] - t) if len(t_out) else 0.0
    h = h0 if h0 is not None else min(1e-3 * max(abs(span), 1.0), h_max)
    facold = 1e-4
    out = []
    idx = 0
    while idx < len(t_out) and t_out[idx] <= t:
        out.append(list(y))
        idx += 1
    attempts = 0
    while idx < len(t_out):
        attempts += 1
        if attempts > max_steps:
            raise StepBudgetError(t, max_steps)
        target = t_out[idx]
        h = min(h, h_max)
        clipped = t + h >= target
        step = target - t if clipped else h
        if step < h_min and not clipped:
            raise StepSizeError(t, step)
        k = [k1]
        for s in range(1, 7):
            a = _A[s]
            yi = [y[i] + step * sum(a[j] * k[j][i] for j in range(s)) for i in range(n)]
            k.append(fun(t + _C[s] * step, yi))
            if s == 6:
                y_new = yi
        err = 0.0
        for i in range(n):
            e = step * sum(_E[j] * k[j][i] for j in range(7))
            sc = atol + rtol * max(abs(y[i]), abs(y_new[i]))
            err += (e / sc) ** 2
        err = math.sqrt(err / n)
        if not math.isfinite(err):
            h = 0.25 * step
            if h < h_min:
                raise StepSizeError(t, h)
            continue
        fac11 = err ** _EXP1 if err > 0 else 0.0
        fac = fac11 / facold ** _BETA
        fac = min(1.0 / _FACMIN, max(1.0 / _FACMAX, fac / _SAFE))
        if err <= 1.0:
            facold = max(err, 1e-4)
            t = target if clipped else t + step
            y = y_new
            k1 = k[6]
            if check is not None:
                check(t, y)
            h_new = step / fac
            h = max(h_new, h) if clipped else h_new
            if clipped:
                while idx < len(t_out) and t_out[idx] <= t:
                    out.append(list(y))
                    idx += 1
        else:
            h = step / min(1.0 / _FACMIN, fac11 / _SAFE)
            if h < h_min:
                raise StepSizeError(t, h)
    return out
