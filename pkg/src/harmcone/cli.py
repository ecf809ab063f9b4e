"""Command-line front end.

Every subcommand prints a human-readable table and writes the same rows
as CSV or JSON (to ``--out DIR`` when given, otherwise to stdout after the
table).  ``--plot`` adds PNG figures next to the structured files.

Exit status: 0 on success, 1 when a check fails or a computation aborts,
2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .expr import DomainError, ParseError
from .geometry import ConeSpec, ball_volume, doubling_ratios, radial_curvature, total_curvature_2d
from .liouville import NotApplicable as LiouvilleNA
from .liouville import liouville_verdict, slp_dimension
from .modes import fit_growth, integrate_mode
from .pbarrier import (BarrierSpec, NotApplicable, check_condition, remark_check, sturm_check,
                       verify_inequality_chain, verify_supersolution)
from .report import Table, render_csv, render_json, render_text, write_matrix, write_series
from .spectral import BoundaryData, extend_harmonic, fd_oracle, plancherel_norm
from .verify import CHECKSETS, run_suite
from .warp import WarpFn, builtin_catalog, eval_warp, get_warp, load_warp_file, warp_from_expr

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    warp: str = "euclidean"
    expr: Optional[str] = None
    warp_file: Optional[str] = None
    n: int = 2
    r_max: Optional[float] = None
    modes: str = "1-3"
    tol: float = 1e-10
    format: str = "csv"
    out: Optional[str] = None
    only: Optional[str] = None
    plot: bool = False
    # command-specific
    window: Optional[str] = None
    radii: Optional[str] = None
    d: float = 1.0
    p: float = 2.0
    R: float = 1.0
    a0: float = 0.0
    coeffs: str = "1:1:0"
    grid: int = 128
    beta: Optional[float] = None

    def validate(self) -> None:
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if self.n < 2:
            raise UsageError("--n must be at least 2")
        for name in ("r_max", "tol", "d", "p", "R"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.plot and not self.out:
            raise UsageError("--plot needs --out DIR")


_CASTS = {f.name: f.type for f in fields(RunConfig)}


def _cast(key: str, raw: str):
    kind = _CASTS[key]
    if "bool" in kind:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if "int" in kind:
        return int(raw)
    if "float" in kind:
        return float(raw)
    return raw.strip()


def load_config(path: str) -> dict:
    """key = value lines; '#' starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CASTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _cast(key, raw)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {raw!r}") from exc
    return out


def parse_int_range(text: str) -> list[int]:
    """'1-3,5' -> [1, 2, 3, 5]."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                a, b = part.split("-", 1)
                out.extend(range(int(a), int(b) + 1))
            elif part:
                out.append(int(part))
    except ValueError as exc:
        raise UsageError(f"bad mode list {text!r}") from exc
    if not out or min(out) < 1:
        raise UsageError("mode indices must be positive")
    return sorted(set(out))


def parse_floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


def parse_coeffs(text: str) -> tuple[tuple[int, float, float], ...]:
    """'m:a:b,...' -> ((m, a, b), ...)."""
    out = []
    try:
        for part in text.split(","):
            if part.strip():
                m, a, b = part.split(":")
                out.append((int(m), float(a), float(b)))
    except ValueError as exc:
        raise UsageError(f"bad coefficient list {text!r}; expected m:a:b,...") from exc
    return tuple(sorted(out))


def select_warp(cfg: RunConfig) -> WarpFn:
    try:
        if cfg.expr:
            return warp_from_expr("expr", cfg.expr, beta=cfg.beta, anchor="user expression")
        if cfg.warp_file:
            warps = {w.name: w for w in load_warp_file(cfg.warp_file)}
            if cfg.warp in warps:
                return warps[cfg.warp]
            if len(warps) == 1:
                return next(iter(warps.values()))
            raise UsageError(f"{cfg.warp_file} defines {', '.join(warps)}; pick one with --warp")
        return get_warp(cfg.warp)
    except ParseError as exc:
        raise UsageError(f"cannot parse expression: {exc}") from exc
    except KeyError as exc:
        raise UsageError(str(exc.args[0]) if exc.args else "unknown warp") from exc
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


# --------------------------------------------------------------------------
# output plumbing


class Output:
    def __init__(self, cfg: RunConfig, command: str):
        self.cfg = cfg
        self.command = command
        self.dir = Path(cfg.out) if cfg.out else None
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        assert self.dir is not None
        return self.dir / name

    def emit(self, tables: Sequence[Table], meta: Optional[dict] = None) -> None:
        sys.stdout.write(render_text(tables))
        if self.cfg.format == "json":
            payload = {f"{self.command}.json": render_json(self.command, tables, meta)}
        else:
            payload = {}
            for i, t in enumerate(tables):
                stem = self.command if i == 0 else f"{self.command}_{t.name}"
                payload[f"{stem}.csv"] = render_csv(t)
        for name, text in payload.items():
            if self.dir is not None:
                self.path(name).write_text(text)
            else:
                sys.stdout.write(text)

    @property
    def plotting(self) -> bool:
        return bool(self.cfg.plot and self.dir is not None)


def _warp_meta(w: WarpFn, cfg: RunConfig) -> dict:
    return {"warp": w.name, "formula": w.formula, "n": cfg.n}


# --------------------------------------------------------------------------
# commands


def cmd_catalog(cfg: RunConfig) -> int:
    t = Table("catalog", ["name", "formula", "beta", "anchor"])
    for w in builtin_catalog():
        t.add(w.name, w.formula, w.beta, w.anchor)
    Output(cfg, "catalog").emit([t])
    return EXIT_OK


def cmd_modes(cfg: RunConfig) -> int:
    w = select_warp(cfg)
    cone = ConeSpec(cfg.n, w)
    r_max = cfg.r_max or 1e4
    window = tuple(parse_floats(cfg.window)) if cfg.window else (r_max / 10.0, r_max)
    if len(window) != 2:
        raise UsageError("--window takes lo,hi")
    out = Output(cfg, "modes")
    t = Table("modes", ["m", "lambda_sq", "gamma", "class", "coef", "exponent", "residual",
                        "slope_drift", "ambiguous", "log_phi_at_rmax"],
              title=f"radial modes of {w.name}, n={cfg.n}, fit window {window[0]:g}..{window[1]:g}")
    modes = []
    for m in parse_int_range(cfg.modes):
        mode = integrate_mode(cone, m, r_max, cfg.tol)
        fit = fit_growth(mode, window)
        modes.append(mode)
        t.add(m, mode.lambda_sq, mode.gamma, fit.kind, fit.coef, fit.exponent, fit.residual,
              fit.slope_drift, fit.ambiguous, mode.log_phi[-1])
        if out.dir is not None:
            write_series(out.path(f"mode_{m}_log_phi.txt"), ["r", "log_phi"],
                         [mode.grid, mode.log_phi])
            write_series(out.path(f"mode_{m}_x.txt"), ["r", "x"], [mode.grid, mode.x])
    out.emit([t], _warp_meta(w, cfg))
    if out.plotting:
        from .plotting import plot_modes
        plot_modes(out.path("modes.png"), modes, f"{w.name}, n={cfg.n}")
    return EXIT_OK


def cmd_curvature(cfg: RunConfig) -> int:
    w = select_warp(cfg)
    r_max = cfg.r_max or 100.0
    rs = np.geomspace(min(1e-2, r_max / 10), r_max, 64)
    t = Table("curvature", ["r", "phi", "dphi", "ddphi", "K_radial"],
              title=f"radial curvature -phi''/phi of {w.name}")
    Ks = []
    for r in rs:
        phi, d1, d2 = eval_warp(w, r)
        K = radial_curvature(w, r)
        Ks.append(K)
        t.add(r, phi, d1, d2, K)
    tables = [t]
    if cfg.n == 2 and r_max > 1:
        tc = total_curvature_2d(w, r_max)
        s = Table("total", ["r_max", "total_abs_curvature", "slope", "diverges"],
                  title="total absolute curvature of the surface")
        s.add(r_max, tc.value, tc.slope, tc.diverges)
        tables.append(s)
    out = Output(cfg, "curvature")
    out.emit(tables, _warp_meta(w, cfg))
    if out.plotting:
        from .plotting import plot_lines
        plot_lines(out.path("curvature.png"), rs, {"K": Ks}, "r", "-phi''/phi",
                   f"radial curvature of {w.name}", logx=True)
    return EXIT_OK


def _radii(cfg: RunConfig, default: Sequence[float]) -> list[float]:
    rs = parse_floats(cfg.radii) if cfg.radii else list(default)
    if not rs or min(rs) <= 0:
        raise UsageError("--radii must be positive numbers")
    return rs


def cmd_volume(cfg: RunConfig) -> int:
    w = select_warp(cfg)
    cone = ConeSpec(cfg.n, w)
    t = Table("volume", ["R", "volume"], title=f"ball volumes for {w.name}, n={cfg.n}")
    rs = _radii(cfg, [1.0, 2.0, 5.0, 10.0])
    vols = [ball_volume(cone, R, cfg.tol) for R in rs]
    for R, v in zip(rs, vols):
        t.add(R, v)
    out = Output(cfg, "volume")
    out.emit([t], _warp_meta(w, cfg))
    if out.plotting:
        from .plotting import plot_lines
        plot_lines(out.path("volume.png"), rs, {"Vol(B_R)": vols}, "R", "volume",
                   logx=True, logy=True, markers=True)
    return EXIT_OK


def cmd_doubling(cfg: RunConfig) -> int:
    w = select_warp(cfg)
    rep = doubling_ratios(ConeSpec(cfg.n, w), sorted(_radii(cfg, [6.0, 12.0, 18.0])), cfg.tol)
    t = Table("doubling", ["R", "vol_R", "vol_2R", "ratio"],
              title=f"volume doubling for {w.name}, n={cfg.n}: {rep.verdict} "
                    f"(max ratio {rep.kappa:.6g})")
    for row in rep.rows:
        t.add(*row)
    out = Output(cfg, "doubling")
    out.emit([t], {**_warp_meta(w, cfg), "verdict": rep.verdict, "kappa": rep.kappa})
    if out.plotting:
        from .plotting import plot_lines
        plot_lines(out.path("doubling.png"), [r[0] for r in rep.rows], {"ratio": rep.ratios},
                   "R", "Vol(B_2R)/Vol(B_R)", logy=True, markers=True)
    return EXIT_OK


def cmd_liouville(cfg: RunConfig) -> int:
    w = select_warp(cfg)
    v = liouville_verdict(ConeSpec(cfg.n, w), cfg.r_max or 1e4)
    s = Table("verdict", ["integral_diverges", "growth_class", "alpha", "fit_residual",
                          "A_coefficient", "min_growth_poly"],
              title=f"integral of 1/phi for {w.name}, n={cfg.n}")
    s.add(v.integral_diverges, v.growth_class, v.alpha, v.fit_residual, v.A_coefficient,
          v.min_growth_poly)
    t = Table("samples", ["r", "integral_inv_phi", "A"])
    A = v.A_samples or [None] * len(v.r_samples)
    for r, I, a in zip(v.r_samples, v.integral_samples, A):
        t.add(r, I, a)
    notes = Table("notes", ["note"])
    for n in v.notes:
        notes.add(n)
    out = Output(cfg, "liouville")
    out.emit([s, t, notes], _warp_meta(w, cfg))
    if out.plotting:
        from .plotting import plot_lines
        series = {"int_1^r 1/phi": v.integral_samples}
        if v.A_samples:
            series["log A(r)"] = [math.log(a) if a > 0 else math.nan for a in v.A_samples]
        plot_lines(out.path("liouville.png"), v.r_samples, series, "r", "value", logx=True)
    return EXIT_OK


def cmd_slp(cfg: RunConfig) -> int:
    w = select_warp(cfg)
    ms = parse_int_range(cfg.modes)
    r_max = cfg.r_max or 1e6
    window = tuple(parse_floats(cfg.window)) if cfg.window else None
    rep = slp_dimension(ConeSpec(cfg.n, w), cfg.d, max(ms), r_max, window, cfg.tol)
    t = Table("slp", ["m", "lambda_sq", "multiplicity", "class", "coef", "exponent", "residual"],
              title=f"harmonic functions of growth <= r^{cfg.d:g} on {w.name}, n={cfg.n}: "
                    f"{rep.verdict}, counted dimension {rep.counted_dim}")
    for m, lam_sq, mult, fit in rep.rows:
        t.add(m, lam_sq, mult, fit.kind, fit.coef, fit.exponent, fit.residual)
    out = Output(cfg, "slp")
    out.emit([t], {**_warp_meta(w, cfg), "d": cfg.d, "verdict": rep.verdict,
                   "counted_dim": rep.counted_dim, "guidance": rep.guidance})
    if out.plotting:
        from .plotting import plot_lines
        plot_lines(out.path("slp.png"), [r[0] for r in rep.rows], {"exponent": rep.exponents},
                   "m", "fitted exponent", markers=True)
    return EXIT_OK


def cmd_dirichlet(cfg: RunConfig) -> int:
    w = select_warp(cfg)
    if cfg.n != 2:
        raise UsageError("dirichlet works on surfaces; use --n 2")
    data = BoundaryData(cfg.R, cfg.a0, parse_coeffs(cfg.coeffs))
    N = cfg.grid
    fd = fd_oracle(w, data, N, N)
    sp = extend_harmonic(w, data, fd.r_grid, fd.theta_grid, cfg.tol)
    diff = float(np.max(np.abs(fd.values - sp.values)))
    t = Table("dirichlet", ["R", "grid", "max_abs_difference", "boundary_min", "boundary_max",
                            "field_min", "field_max"],
              title=f"harmonic extension on {w.name}: spectral vs finite differences")
    t.add(data.R, N, diff, float(sp.values[-1].min()), float(sp.values[-1].max()),
          float(sp.values.min()), float(sp.values.max()))
    norms = Table("plancherel", ["r", "norm_sq"])
    for r in np.linspace(data.R / 8, data.R, 8):
        norms.add(r, plancherel_norm(w, data, r, cfg.tol))
    out = Output(cfg, "dirichlet")
    out.emit([t, norms], _warp_meta(w, cfg))
    if out.dir is not None:
        write_matrix(out.path("field_spectral.txt"), sp.r_grid, sp.theta_grid, sp.values)
        write_matrix(out.path("field_fd.txt"), fd.r_grid, fd.theta_grid, fd.values)
    if out.plotting:
        from .plotting import plot_field
        plot_field(out.path("dirichlet.png"), sp, f"harmonic extension on {w.name}")
    return EXIT_OK


def cmd_pbarrier(cfg: RunConfig) -> int:
    w = select_warp(cfg)
    spec = BarrierSpec(cfg.p, cfg.R)
    r_max = cfg.r_max or 100.0
    a = max(spec.r0, 1.0 + 1e-6)
    if r_max <= a:
        raise UsageError(f"--r-max must exceed {a:g}")
    curv = lambda r: radial_curvature(w, r)
    t = Table("pbarrier", ["check", "value", "passed"],
              title=f"p-barrier checks for {w.name}, p={cfg.p:g}, R={cfg.R:g}, r in [{a:.6g}, {r_max:g}]")
    failed = False
    if cfg.R >= 1:
        v = verify_inequality_chain(cfg.p, cfg.R, (a, r_max))
        t.add("inequality_chain_violation", v, v <= 1e-12)
        failed |= v > 1e-12
    for which in ("i", "ii"):
        cv = check_condition(curv, cfg.p, which, (a, r_max), 64, cfg.R)
        t.add(f"condition_{which}_margin", cv.margin, cv.holds)
    try:
        s = sturm_check(w, spec, a, r_max)
        t.add("sturm_slack", s, s >= -1e-10)
        sup = verify_supersolution(w, spec, a, r_max)
        t.add("max_Dp_h_over_scale", sup, sup <= 1e-10)
        failed |= s < -1e-10 or sup > 1e-10
    except NotApplicable as exc:
        t.add("sturm_hypothesis", str(exc), "not applicable")
    if cfg.p > 2 and r_max > math.exp(1 / (cfg.p - 2)):
        lo = max(a, math.exp(1 / (cfg.p - 2)) * 1.01)
        if lo < r_max:
            t.add("remark_ii_implies_i", float(remark_check(cfg.p, (lo, r_max))), True)
    out = Output(cfg, "pbarrier")
    out.emit([t], {**_warp_meta(w, cfg), "p": cfg.p, "R": cfg.R})
    if out.plotting:
        from .pbarrier import curvature_bound, neg_z_ratio
        from .plotting import plot_lines
        rs = np.geomspace(a, r_max, 200)
        plot_lines(out.path("pbarrier.png"), rs, {
            "K": [curv(r) for r in rs],
            "-z''/z": [neg_z_ratio(spec, r) for r in rs],
            "bound (i)": [curvature_bound(cfg.p, "i")(r) for r in rs],
            "bound (ii)": [curvature_bound(cfg.p, "ii")(r) for r in rs],
        }, "r", "curvature", logx=True)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    only = [s.strip() for s in cfg.only.split(",")] if cfg.only else None
    if only and set(only) - set(CHECKSETS):
        raise UsageError(f"--only takes a subset of {', '.join(CHECKSETS)}")
    user = select_warp(cfg) if (cfg.expr or cfg.warp_file or cfg.warp != "euclidean") else None
    results = run_suite(only, user, cfg.r_max or 100.0)
    t = Table("verify", ["check", "anchor", "status", "measured", "threshold", "detail"],
              title="verification suite")
    for r in results:
        t.add(r.check_id, r.anchor, r.status, r.measured, r.threshold, r.detail)
    failed = sum(r.status == "FAIL" for r in results)
    out = Output(cfg, "verify")
    out.emit([t], {"checks": len(results), "failed": failed})
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "catalog": (cmd_catalog, "list built-in warping functions"),
    "modes": (cmd_modes, "integrate radial modes and fit their growth"),
    "verify": (cmd_verify, "run the verification suite"),
    "curvature": (cmd_curvature, "radial curvature samples and total curvature"),
    "volume": (cmd_volume, "geodesic ball volumes"),
    "doubling": (cmd_doubling, "volume doubling ratios"),
    "liouville": (cmd_liouville, "classify the growth of the integral of 1/phi"),
    "slp": (cmd_slp, "count harmonic functions of polynomial growth"),
    "dirichlet": (cmd_dirichlet, "harmonic extension of boundary data on a surface"),
    "pbarrier": (cmd_pbarrier, "p-Laplacian barrier and curvature-condition checks"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("shared options")
    g.add_argument("--config", metavar="FILE", help="key = value file; flags override it")
    g.add_argument("--warp", help="catalog name, e.g. half_sin or power_beta(0.5)")
    g.add_argument("--expr", help="warp given as an expression in r, e.g. '(r + sin(r))/2'")
    g.add_argument("--warp-file", dest="warp_file", help="INI file of warp definitions")
    g.add_argument("--beta", type=float, help="declared bound on phi' for --expr warps")
    g.add_argument("--n", type=int, help="cone dimension (default 2)")
    g.add_argument("--r-max", dest="r_max", type=float, help="outer radius")
    g.add_argument("--modes", help="mode indices, e.g. 1-3 or 1,2,5")
    g.add_argument("--tol", type=float, help="integration tolerance (default 1e-10)")
    g.add_argument("--format", choices=("csv", "json"), help="structured output format")
    g.add_argument("--out", metavar="DIR", help="directory for structured output and figures")
    g.add_argument("--only", metavar="CHECKSET",
                   help=f"verify: comma-separated subset of {', '.join(CHECKSETS)}")
    g.add_argument("--plot", action="store_true", default=None, help="also write PNG figures")
    g.add_argument("--window", help="growth-fit window lo,hi")
    g.add_argument("--radii", help="comma-separated radii")
    g.add_argument("--d", type=float, help="slp: growth degree")
    g.add_argument("--p", type=float, help="pbarrier: exponent p >= 2")
    g.add_argument("--R", type=float, help="pbarrier: compact-set radius; dirichlet: boundary radius")
    g.add_argument("--a0", type=float, help="dirichlet: mean value")
    g.add_argument("--coeffs", help="dirichlet: boundary modes m:a:b,...")
    g.add_argument("--grid", type=int, help="dirichlet: finite-difference grid size")

    parser = argparse.ArgumentParser(prog="harmcone", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def make_config(ns: argparse.Namespace) -> RunConfig:
    values = load_config(ns.config) if ns.config else {}
    for key in _CASTS:
        v = getattr(ns, key, None)
        if v is not None:
            values[key] = v
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = make_config(ns)
        return COMMANDS[ns.command][0](cfg)
    except UsageError as exc:
        print(f"harmcone {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LiouvilleNA, NotApplicable) as exc:
        print(f"harmcone {ns.command}: not applicable: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ArithmeticError, DomainError, RuntimeError, ValueError) as exc:
        print(f"harmcone {ns.command}: failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
