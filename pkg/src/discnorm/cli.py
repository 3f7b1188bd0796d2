"""Command-line runner: ``python -m discnorm {norm,verify,sweep,explore,levelset} ...``.

Exit codes: 0 success, 1 usage or configuration error, 2 a verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from . import verify as V
from .funcrep import KernelPower, SpaceParams, parse
from .levelsets import LevelSetGrid, level_set_profile
from .norms import METHODS, norm_all_routes, norm_apalpha
from .quadrature import QuadratureGrid

COMMANDS = ("norm", "verify", "sweep", "explore", "levelset")
CHECKS = (
    "kernel_closed_form", "route_agreement", "conformal_invariance", "contractive", "power_trick", "shift",
    "inner_division", "majorant", "boundary_decay", "pointwise_bound", "dilation_monotone", "phi_identities",
    "zero_count", "lp_offset",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _grid_spec(text: str):
    """``start:stop:count`` inclusive linear range."""
    try:
        a, b, n = text.split(":")
        n = int(n)
        if n < 1:
            raise ValueError
        return [float(x) for x in np.linspace(float(a), float(b), n)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}") from None


def _p_value(text: str):
    if text == "from-kappa":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--p takes a number or 'from-kappa', got {text!r}") from None


def _complex(text: str) -> complex:
    return complex(text.replace("i", "j").replace(" ", ""))


@dataclass
class ExperimentConfig:
    command: str
    f: list = field(default_factory=list)
    g: str | None = None
    alpha: float | None = None
    p: object = None
    beta: float | None = None
    q: float | None = None
    sigma: float | None = None
    kappa: float | None = None
    w: complex | None = None
    method: str = "littlewood_paley"
    n_theta: int = 256
    radial_n: int = 128
    levelset_n: int = 512
    t_grid: int = 300
    seed: int = V.DEFAULT_SEED
    out: str | None = None
    format: str = "json"
    suite: str = "full"
    check: str | None = None
    alpha_grid: list | None = None
    p_grid: list | None = None
    n: int | None = None
    r: list | None = None
    zeros: list | None = None
    threads: int | None = None
    timings: bool = False

    @property
    def grid(self) -> QuadratureGrid:
        return QuadratureGrid(self.n_theta, self.radial_n)

    @property
    def levelset_grid(self) -> LevelSetGrid:
        return LevelSetGrid(self.levelset_n, self.levelset_n, t_grid_size=self.t_grid)

    def functions(self):
        try:
            return [parse(s) for s in self.f]
        except Exception as e:  # noqa: BLE001 - surfaced as a usage error
            raise UsageError(f"cannot parse function expression: {e}") from None

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        for name in ("alpha", "beta", "q", "sigma", "kappa"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise UsageError(f"--{name} must be positive")
        if isinstance(self.p, float) and not self.p > 0:
            raise UsageError("--p must be positive")
        for name in ("alpha_grid", "p_grid"):
            v = getattr(self, name)
            if v is not None and (not v or min(v) <= 0):
                raise UsageError(f"--{name.replace('_', '-')} must be a nonempty positive range")
        if None not in (self.alpha, self.beta) and isinstance(self.p, float) and self.q is not None:
            if abs(self.alpha / self.p - self.beta / self.q) > 1e-12:
                raise UsageError("alpha/p and beta/q must agree to 1e-12")
        if self.n_theta < 16 or self.radial_n < 4:
            raise UsageError("--n-theta must be >= 16 and --radial-n >= 4")
        if self.format not in ("json", "csv"):
            raise UsageError("--format is json or csv")
        return self


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("shared options")
    g.add_argument("--config", help="JSON file with option values; flags given on the command line win")
    g.add_argument("--f", action="append", help="function expression, e.g. 'poly(1, 0.5)' (repeatable)")
    g.add_argument("--alpha", type=float, help="weight parameter alpha > 0")
    g.add_argument("--p", type=_p_value, help="exponent p > 0, or 'from-kappa' in sweeps (p = alpha / kappa)")
    g.add_argument("--beta", type=float, help="second weight parameter for contractive checks")
    g.add_argument("--q", type=float, help="second exponent for contractive checks")
    g.add_argument("--sigma", type=float, help="invariance ratio p / alpha")
    g.add_argument("--kappa", type=float, help="invariance index alpha / p used by --p from-kappa")
    g.add_argument("--w", type=_complex, help="disc point, e.g. 0.3+0.1i")
    g.add_argument("--method", choices=METHODS + ("all",), help="route for the A^p_alpha quantity")
    g.add_argument("--n-theta", type=int, help="circle nodes (default 256)")
    g.add_argument("--radial-n", type=int, help="radial Gauss nodes (default 128)")
    g.add_argument("--levelset-n", type=int, help="rays and radial samples for level sets (default 512)")
    g.add_argument("--t-grid", type=int, help="geometric t-grid length for level sets (default 300)")
    g.add_argument("--seed", type=lambda s: int(s, 0), help="random seed, decimal or 0x-hex (default 0xD15C)")
    g.add_argument("--out", help="output file (default stdout)")
    g.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    g.add_argument("--threads", type=int, help="worker threads (default: DISCNORM_THREADS or up to 4)")
    g.add_argument("--timings", action="store_true", default=None,
                   help="add runtime_ms to reports (CSV output is then no longer reproducible byte for byte)")

    ap = _Parser(prog="discnorm", description="Weighted norms of analytic functions on the disc and checks of "
                                              "contractive inequalities between them.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("norm", parents=[common], help="compute ||f||_{alpha,p}")
    pv = sub.add_parser("verify", parents=[common], help="run a verification suite or a single check")
    pv.add_argument("--suite", choices=("full", "quick"), help="named suite (default full)")
    pv.add_argument("--check", choices=CHECKS, help="run one check with the given options instead of a suite")
    pv.add_argument("--n", type=int, help="integer parameter: power for power_trick, zero count for zero_count")
    pv.add_argument("--r", type=float, action="append", help="radius for majorant checks (repeatable)")
    pv.add_argument("--zeros", type=_complex, action="append", help="Blaschke zero for inner_division (repeatable)")
    ps = sub.add_parser("sweep", parents=[common], help="tabulate ||f||^p over parameter grids")
    ps.add_argument("--alpha-grid", type=_grid_spec, help="start:stop:count")
    ps.add_argument("--p-grid", type=_grid_spec, help="start:stop:count")
    pe = sub.add_parser("explore", parents=[common], help="evidence tables for open questions")
    pe.add_argument("--g", help="second function for quasi-triangle ratios (default 'poly(0, 1)')")
    pe.add_argument("--p-grid", type=_grid_spec, help="start:stop:count (default 0.5:4:8)")
    sub.add_parser("levelset", parents=[common], help="distribution function profile (t, mu, g)")
    return ap


def load_config(argv) -> ExperimentConfig:
    ap = build_parser()
    ns = ap.parse_args(argv)
    values = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config: {e}") from None
        if not isinstance(values, dict):
            raise UsageError("config must be a JSON object")
        known = {f.name for f in fields(ExperimentConfig)}
        bad = set(values) - known
        if bad:
            raise UsageError(f"unknown config keys: {sorted(bad)}")
        if isinstance(values.get("f"), str):
            values["f"] = [values["f"]]
        if "w" in values and isinstance(values["w"], str):
            values["w"] = _complex(values["w"])
        if "seed" in values and isinstance(values["seed"], str):
            values["seed"] = int(values["seed"], 0)
        for k in ("alpha_grid", "p_grid"):
            if isinstance(values.get(k), str):
                values[k] = _grid_spec(values[k])
        if isinstance(values.get("p"), str):
            values["p"] = _p_value(values["p"])
        for k in ("alpha", "p", "beta", "q", "sigma", "kappa"):
            if isinstance(values.get(k), (int, float)) and not isinstance(values[k], bool):
                values[k] = float(values[k])
    for k, v in vars(ns).items():
        if k != "config" and v is not None:
            values[k] = v
    values["command"] = ns.command
    return ExperimentConfig(**values).validate()


# ---------------------------------------------------------------------------
# output


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.17g}"
    if isinstance(x, (list, tuple)):
        return ";".join(_fmt(v) for v in x)
    return str(x)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    keys = list(rows[0].keys())
    for r in rows[1:]:
        keys += [k for k in r if k not in keys]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for r in rows:
        w.writerow([_fmt(r.get(k, "")) for k in keys])
    return buf.getvalue()


def _emit(cfg: ExperimentConfig, text: str):
    if cfg.out:
        try:
            with open(cfg.out, "w", newline="") as fh:
                fh.write(text)
        except OSError as e:
            raise UsageError(f"cannot write {cfg.out}: {e}") from None
    else:
        sys.stdout.write(text)


def _emit_rows(cfg, rows):
    if cfg.format == "csv":
        _emit(cfg, rows_to_csv(rows))
    else:
        _emit(cfg, json.dumps(rows, indent=1, default=V._json_default) + "\n")


def _need(cfg, *names):
    missing = [n for n in names if getattr(cfg, n) in (None, [])]
    if missing:
        raise UsageError(f"{cfg.command} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _norm_row(expr, P, res):
    return {"f": expr, "alpha": P.alpha, "p": P.p, "method": res.method, "value": res.value,
            "p_power_value": res.p_power_value, "error_estimate": res.error_estimate, "flags": list(res.flags)}


# ---------------------------------------------------------------------------
# commands


def cmd_norm(cfg):
    _need(cfg, "f", "alpha", "p")
    if not isinstance(cfg.p, float):
        raise UsageError("norm needs a numeric --p")
    P = SpaceParams(cfg.alpha, cfg.p)
    rows = []
    for expr, f in zip(cfg.f, cfg.functions()):
        try:
            if cfg.method == "all":
                res = norm_all_routes(f, P, cfg.grid)
                rows += [_norm_row(expr, P, r) for r in res.values()]
            else:
                rows.append(_norm_row(expr, P, norm_apalpha(f, P, cfg.method, cfg.grid)))
        except ValueError as e:
            raise UsageError(str(e)) from None
    _emit_rows(cfg, rows)
    return 0


def cmd_sweep(cfg):
    _need(cfg, "f")
    if cfg.alpha_grid is None and cfg.alpha is None:
        raise UsageError("sweep needs --alpha-grid or --alpha")
    alphas = cfg.alpha_grid or [cfg.alpha]
    rows = []
    for expr, f in zip(cfg.f, cfg.functions()):
        for a in alphas:
            if cfg.p == "from-kappa":
                kappa = cfg.kappa
                if kappa is None:
                    if not isinstance(f, KernelPower):
                        raise UsageError("--p from-kappa needs --kappa unless f is a kernel(...)")
                    kappa = f.kappa
                ps = [a / kappa]
            elif cfg.p_grid is not None:
                ps = cfg.p_grid
            elif cfg.p is not None:
                ps = [cfg.p]
            else:
                raise UsageError("sweep needs --p, --p-grid or --p from-kappa")
            for p in ps:
                P = SpaceParams(a, p)
                method = cfg.method if cfg.method != "all" else "littlewood_paley"
                try:
                    res = norm_apalpha(f, P, method, cfg.grid)
                except ValueError as e:
                    raise UsageError(str(e)) from None
                rows.append(_norm_row(expr, P, res))
    _emit_rows(cfg, rows)
    return 0


def cmd_explore(cfg):
    _need(cfg, "f", "alpha")
    f = cfg.functions()[0]
    g = parse(cfg.g) if cfg.g else parse("poly(0, 1)")
    pg = cfg.p_grid or _grid_spec("0.5:4:8")
    try:
        rows = V.explore_open_problems(f, g, cfg.alpha, pg, cfg.grid, seed=cfg.seed)
    except ValueError as e:
        raise UsageError(str(e)) from None
    _emit_rows(cfg, rows)
    return 0


def cmd_levelset(cfg):
    _need(cfg, "f", "sigma")
    f = cfg.functions()[0]
    prof = level_set_profile(f, cfg.sigma, cfg.levelset_grid)
    if cfg.format == "csv":
        _emit(cfg, prof.to_csv())
    else:
        _emit(cfg, json.dumps({"sigma": prof.sigma, "t0": prof.t0, "argmax": prof.argmax_z, "flags": prof.flags,
                               "t": prof.t_grid, "mu": prof.mu_values, "g": prof.g_values},
                              default=V._json_default) + "\n")
    return 0


def _single_check(cfg):
    c = cfg.check
    fs = cfg.functions() if cfg.f else []
    f = fs[0] if fs else None
    grid, lg = cfg.grid, cfg.levelset_grid

    def P():
        _need(cfg, "alpha", "p")
        return SpaceParams(cfg.alpha, cfg.p)

    if c == "kernel_closed_form":
        _need(cfg, "w")
        return V.check_kernel_closed_form(cfg.w, P(), grid=grid)
    if c == "lp_offset":
        _need(cfg, "p")
        return V.check_lp_offset(cfg.p)
    if c == "majorant" and f is None:
        _need(cfg, "r")
        return V.check_majorant(P(), cfg.r[0], grid=grid)
    if f is None:
        raise UsageError(f"check {c} needs --f")
    if c == "route_agreement":
        return V.check_route_agreement(f, P(), grid=grid)
    if c == "conformal_invariance":
        _need(cfg, "w")
        return V.check_conformal_invariance(f, cfg.w, P(), grid=grid)
    if c == "contractive":
        _need(cfg, "alpha", "beta")
        sigma = cfg.sigma or (cfg.p / cfg.alpha if isinstance(cfg.p, float) else None)
        if sigma is None:
            raise UsageError("contractive needs --sigma or --p")
        return V.check_contractive(f, cfg.alpha, cfg.beta, sigma, grid=grid)
    if c == "power_trick":
        return V.check_power_trick(f, P(), cfg.n or 2, grid=grid)
    if c == "shift":
        return V.check_shift(f, P(), grid=grid)
    if c == "inner_division":
        return V.check_inner_division(f, cfg.zeros or [], P(), grid=grid)
    if c == "majorant":
        _need(cfg, "r")
        return V.check_majorant(P(), cfg.r if P().p <= 2 else cfg.r[0], f=f, grid=grid)
    if c == "boundary_decay":
        return V.check_boundary_decay(f, P())
    if c == "pointwise_bound":
        return V.check_pointwise_bound(f, P(), seed=cfg.seed, grid=grid)
    if c == "dilation_monotone":
        return V.check_dilation_monotonicity(f, P(), grid=grid)
    if c == "phi_identities":
        _need(cfg, "sigma")
        return V.check_phi_identities(f, cfg.sigma, levelset_grid=lg, grid=grid)
    if c == "zero_count":
        _need(cfg, "sigma", "n")
        return V.check_zero_count(f, cfg.sigma, cfg.n, levelset_grid=lg)
    raise UsageError(f"unknown check {c!r}")  # pragma: no cover


def cmd_verify(cfg):
    if cfg.check:
        try:
            reps = [_single_check(cfg)]
        except ValueError as e:
            raise UsageError(str(e)) from None
    else:
        reps = V.run_suite(cfg.suite, cfg.seed, cfg.grid, cfg.levelset_grid, cfg.threads)
    if cfg.format == "csv":
        _emit(cfg, V.reports_to_csv(reps, cfg.timings))
    else:
        _emit(cfg, V.reports_to_json(reps, cfg.timings))
    return 0 if all(r.passed for r in reps) else 2


def run(cfg: ExperimentConfig) -> int:
    return {"norm": cmd_norm, "verify": cmd_verify, "sweep": cmd_sweep, "explore": cmd_explore,
            "levelset": cmd_levelset}[cfg.command](cfg)


def main(argv=None) -> int:
    try:
        cfg = load_config(sys.argv[1:] if argv is None else argv)
        return run(cfg)
    except UsageError as e:
        print(f"discnorm: error: {e}", file=sys.stderr)
        return 1
