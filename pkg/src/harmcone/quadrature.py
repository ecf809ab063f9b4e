"""Adaptive Simpson quadrature with Richardson correction."""

from __future__ import annotations

import math
from typing import Callable

__all__ = ["QuadratureError", "simpson", "simpson_log", "cumulative"]

MAX_DEPTH = 40
MIN_DEPTH = 4
# panels this narrow sit at the resolution of the abscissae; bisecting further is noise
_RESOLUTION = 64 * 2.0 ** -52  # guards against accidental agreement on coarse oscillatory panels


class QuadratureError(RuntimeError):
    pass


def _panel(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def simpson(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10,
            rel_tol: float | None = None, panels: int = 8, max_depth: int = MAX_DEPTH) -> float:
    """Integrate ``f`` over [a, b].

    The target error is ``max(tol, rel_tol * |I|)`` with ``rel_tol``
    defaulting to ``tol``; ``|I|`` is estimated from a coarse first pass.
    Raises :class:`QuadratureError` if a panel is still unresolved at
    ``max_depth`` bisections.
    """
    if a == b:
        return 0.0
    if b < a:
        return -simpson(f, b, a, tol, rel_tol, panels, max_depth)
    rel_tol = tol if rel_tol is None else rel_tol
    xs = [a + (b - a) * i / panels for i in range(panels + 1)]
    xs[-1] = b
    fs = [f(x) for x in xs]
    work = []
    coarse = 0.0
    for i in range(panels):
        m, fm, s = _panel(f, xs[i], fs[i], xs[i + 1], fs[i + 1])
        work.append((xs[i], fs[i], m, fm, xs[i + 1], fs[i + 1], s))
        coarse += s
    target = max(tol, rel_tol * abs(coarse))
    # endpoint singularities would otherwise demand ever smaller eps
    floor = target * 2.0 ** -30
    total = 0.0
    # explicit stack of (a, fa, m, fm, b, fb, whole, eps, depth)
    stack = [w + (target / panels, 0) for w in work]
    while stack:
        x0, f0, xm, fm, x1, f1, whole, eps, depth = stack.pop()
        lm, flm, left = _panel(f, x0, f0, xm, fm)
        rm, frm, right = _panel(f, xm, fm, x1, f1)
        delta = left + right - whole
        if (depth >= MIN_DEPTH and abs(delta) <= 15.0 * eps) or x1 - x0 <= _RESOLUTION * max(1.0, abs(x0)):
            total += left + right + delta / 15.0
            continue
        if depth >= max_depth or not math.isfinite(delta):
            raise QuadratureError(
                f"no convergence on [{x0!r}, {x1!r}] after {depth} bisections (error {delta!r})")
        eps = max(0.5 * eps, floor)
        stack.append((xm, fm, rm, frm, x1, f1, right, eps, depth + 1))
        stack.append((x0, f0, lm, flm, xm, fm, left, eps, depth + 1))
    return total


def simpson_log(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10,
                **kw) -> float:
    """Integrate over [a, b] (0 < a) after substituting r = e^t.

    Suited to integrands spread over many decades.
    """
    if a <= 0 or b <= 0:
        raise ValueError("simpson_log needs positive limits")
    g = lambda t: f(math.exp(t)) * math.exp(t)
    return simpson(g, math.log(a), math.log(b), tol, **kw)


def cumulative(f: Callable[[float], float], points, tol: float = 1e-10, log: bool = False,
               start: float | None = None) -> list[float]:
    """Running integrals from ``start`` (default ``points[0]``) to each point."""
    pts = list(points)
    if not pts:
        return []
    quad = simpson_log if log else simpson
    base = pts[0] if start is None else start
    out = []
    acc = 0.0
    prev = base
    for x in pts:
        acc += quad(f, prev, x, tol) if x != prev else 0.0
        out.append(acc)
        prev = x
    return out
