"""Command-line front end: ``kernstab <subcommand> [flags]``.

Exit codes: 0 all checks held, 2 usage error, 3 numerical failure or a
violated check, 4 I/O failure.  Checking subcommands end with a line
``PASS|FAIL n_checks=<k> worst_margin=<m>`` on stdout, where a margin is the
relative slack of a check (negative means violated).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__, rng
from .alignment import alignment_experiment, write_cross_csv, write_pgm
from .gram import assemble, sym_eig
from .ingham import ingham_constants, localization_profile, localization_radius, verify_ingham
from .kernels import RadialKernel, make_sobolev, parse_kernel, snap_tau
from .pointsets import PointSet, generate, read_csv, write_csv
from .stability import lambda_min_lower, sandwich_check, sweep_exponent_fit

log = logging.getLogger("kernstab")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

SUBCOMMANDS = ("constants", "bounds", "ingham", "localize", "sandwich", "sweep", "align")

# tolerance keys accepted by --tol-override, with defaults
TOLERANCES = {
    "rtol": 1e-9,  # relative slack allowed in bound / Ingham checks
    "sandwich_rtol": 1e-10,
    "eps": 0.5,  # localisation target 1 - eps
    "max_factor": 50.0,  # localisation search limit, R q_X <= max_factor
    "limit_factor": 1e3,  # R q_X where the localisation ratio must reach limit_min
    "limit_min": 0.999,
    "parseval": 1e-8,
    "band": 2.0,
    "C": 1.0,
    "C1": 1.0,
}


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


@dataclass
class RunConfig:
    """Resolved settings of one run; round-trips through JSON."""

    subcommand: str = ""
    dim: int = 1
    kernel: str | None = None
    kernel2: str | None = None
    tau: float | None = None
    sigma: float | None = None
    gamma: float | None = None
    points: list = field(default_factory=list)
    box: str = "0,1"
    seed: int = 0
    trials: int = 5
    levels: str = "3:8"
    out: str | None = None
    format: str = "csv"
    workers: int = 1
    tol: dict = field(default_factory=dict)
    points_in: str | None = None
    points_out: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    def tolerance(self, key: str) -> float:
        return float(self.tol.get(key, TOLERANCES[key]))


class Checks:
    """Accumulates (margin, holds) pairs for the summary line."""

    def __init__(self):
        self.count = 0
        self.worst = math.inf
        self.failed = 0

    def add(self, margin: float, holds: bool | None = None) -> bool:
        ok = margin >= 0 if holds is None else holds
        self.count += 1
        self.worst = min(self.worst, float(margin))
        self.failed += not ok
        return ok

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def summary(self) -> str:
        worst = self.worst if self.count else 0.0
        return f"{'PASS' if self.passed else 'FAIL'} n_checks={self.count} worst_margin={worst:.6g}"


# parsing -------------------------------------------------------------------

def _parse_box(text: str) -> tuple[float, float]:
    try:
        a, b = (float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"bad --box value {text!r}; expected a,b") from None
    if not b > a:
        raise UsageError(f"bad --box value {text!r}; need a < b")
    return a, b


_POINT_KINDS = {"grid": "grid", "random": "uniform_random", "perturbed": "perturbed_grid"}


def parse_points(spec: str, dim: int, box, seed: int) -> PointSet:
    kind, _, count = spec.partition(":")
    if kind not in _POINT_KINDS or not count.isdigit() or int(count) < 1:
        raise UsageError(f"bad --points value {spec!r}; expected grid:<m>, random:<n> or perturbed:<m>")
    return generate(_POINT_KINDS[kind], int(count), dim, box=box, seed=seed)


def _kernel(spec: str, dim: int) -> RadialKernel:
    try:
        return parse_kernel(spec, dim)
    except ValueError as exc:
        raise UsageError(f"bad kernel {spec!r}: {exc}") from None


def _pointsets(cfg: RunConfig, default: str | None = None) -> list[PointSet]:
    box = _parse_box(cfg.box)
    if cfg.points_in:
        sets = [read_csv(cfg.points_in)]
    else:
        specs = cfg.points or ([default] if default else [])
        if not specs:
            raise UsageError("--points is required")
        sets = [parse_points(s, cfg.dim, box, cfg.seed) for s in specs]
    if cfg.points_out:
        write_csv(sets[0], cfg.points_out)
    return sets


def _sigma_pair(cfg: RunConfig) -> tuple[RadialKernel, RadialKernel, float, float, bool]:
    """Kernels for tau and sigma tau; the flag says whether both symbols are exact."""
    if cfg.kernel:
        k1 = _kernel(cfg.kernel, cfg.dim)
        if not cfg.kernel2:
            raise UsageError("--kernel needs --kernel2 for a sigma pair")
        k2 = _kernel(cfg.kernel2, cfg.dim)
        if k1.tau is None or k2.tau is None:
            raise UsageError("sigma pairs need kernels with finite smoothness")
        return k1, k2, k1.tau, k2.tau / k1.tau, k1.symbol_exact and k2.symbol_exact
    if cfg.tau is None or cfg.sigma is None:
        raise UsageError("need --tau and --sigma (or --kernel and --kernel2)")
    tau = cfg.tau
    stau = snap_tau(cfg.sigma * tau, cfg.dim)
    try:
        k1, k2 = make_sobolev(tau, cfg.dim), make_sobolev(stau, cfg.dim)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return k1, k2, tau, stau / tau, True


# output --------------------------------------------------------------------

def _plain(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    return v


def _cell(v, digits: int) -> str:
    if isinstance(v, float):
        return format(v, f".{digits}g")
    return str(v)


def render(rows: list[dict] | dict, fmt: str, digits: int = 17) -> str:
    if fmt == "json":
        return json.dumps(_plain(rows), indent=2) + "\n"
    rows = rows if isinstance(rows, list) else [rows]
    buf = io.StringIO()
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(rows[0]))
        for r in rows:
            w.writerow([_cell(_plain(v), digits) for v in r.values()])
    return buf.getvalue()


def _emit(cfg: RunConfig, rows, digits: int = 17, out: str | None = None) -> None:
    text = render(rows, cfg.format, digits)
    target = out if out is not None else cfg.out
    if target:
        Path(target).write_text(text)
    else:
        sys.stdout.write(text)


def _manifest(cfg: RunConfig, status: str) -> None:
    doc = {"tool": "kernstab", "version": __version__, "status": status, "config": asdict(cfg)}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        Path(cfg.out + ".manifest.json").write_text(text)
    else:
        sys.stderr.write(text)


# subcommands ---------------------------------------------------------------

def cmd_constants(cfg: RunConfig, checks: Checks) -> None:
    if cfg.dim not in (1, 2, 3, 4):
        raise UsageError(f"--dim {cfg.dim} unsupported; use 1..4")
    c = ingham_constants(cfg.dim)
    row = {"dim": c.dim, "lambda_min_dirichlet": c.lambda_min_dirichlet, "c0": c.c0,
           "c1": c.c1, "c2": c.c2, "beta": c.beta}
    _emit(cfg, row, digits=10)


def cmd_bounds(cfg: RunConfig, checks: Checks) -> None:
    if cfg.kernel:
        kernel = _kernel(cfg.kernel, cfg.dim)
    elif cfg.gamma is not None:
        kernel = _kernel(f"gauss:{cfg.gamma}", cfg.dim)
    elif cfg.tau is not None:
        kernel = _kernel(f"sobolev:{cfg.tau}", cfg.dim)
    else:
        raise UsageError("bounds needs --kernel, --gamma or --tau")
    consts = ingham_constants(cfg.dim)
    rtol = cfg.tolerance("rtol")
    rows = []
    for ps in _pointsets(cfg):
        if ps.n < 2:
            raise ValueError("point set has a single point; q_X is undefined")
        lam = sym_eig(assemble(kernel, ps), vectors=False).lambda_min
        for name, bound in lambda_min_lower(kernel, ps.q, consts).items():
            slack = lam / bound if bound > 0 else math.inf
            margin = (lam - bound) / lam if lam > 0 else -math.inf
            checks.add(margin, bound <= lam * (1 + rtol))
            rows.append({"kernel": kernel.id, "bound": name, "n": ps.n, "q_X": ps.q,
                         "bound_value": bound, "lambda_min_true": lam, "slack": slack})
    _emit(cfg, rows)


def cmd_ingham(cfg: RunConfig, checks: Checks) -> None:
    consts = ingham_constants(cfg.dim)
    rtol = cfg.tolerance("rtol")
    rows = []
    for ps in _pointsets(cfg, "random:8"):
        gen = rng.stream(cfg.seed, rng.ALPHA)
        alphas = [rng.normal(gen, ps.n) for _ in range(cfg.trials)] + list(np.eye(ps.n))
        for i, al in enumerate(alphas):
            for mode in ("lower", "upper"):
                r = verify_ingham(ps, al, consts, mode, rel_tol=rtol)
                checks.add(r.margin, r.holds)
                rows.append({"alpha": i, "mode": mode, "q_X": ps.q, "R": r.R_used,
                             "ratio": r.ratio, "bound": r.bound, "margin": r.margin})
    _emit(cfg, rows)


def cmd_localize(cfg: RunConfig, checks: Checks) -> None:
    if cfg.kernel:
        kernel = _kernel(cfg.kernel, cfg.dim)
    else:
        kernel = _kernel(f"sobolev:{cfg.tau if cfg.tau is not None else 2.0}", cfg.dim)
    if not kernel.symbol_exact:
        raise UsageError("localize needs an exact-symbol kernel (sobolev:<tau>)")
    eps, max_factor = cfg.tolerance("eps"), cfg.tolerance("max_factor")
    limit_factor, limit_min = cfg.tolerance("limit_factor"), cfg.tolerance("limit_min")
    rows = []
    for ps in _pointsets(cfg, "random:8"):
        gen = rng.stream(cfg.seed, rng.ALPHA)
        for i in range(cfg.trials):
            al = rng.normal(gen, ps.n)
            found = localization_radius(kernel, ps, al, eps, max_factor)
            factors = np.geomspace(0.01, limit_factor, 25)
            prof = localization_profile(kernel, ps, al, factors / ps.q)
            steps = np.diff(prof)
            mono = float(steps.min()) if steps.size else 0.0
            checks.add((max_factor - found.a_eps) / max_factor, found.found)
            checks.add(mono / max(abs(prof[-1]), 1e-300), mono >= -1e-12)
            checks.add(prof[-1] - limit_min)
            rows.append({"alpha": i, "q_X": ps.q, "eps": eps, "a_eps": found.a_eps,
                         "ratio_at_a_eps": found.ratio, "ratio_limit": float(prof[-1]),
                         "min_step": mono})
    _emit(cfg, rows)


def cmd_sandwich(cfg: RunConfig, checks: Checks) -> None:
    k1, k2, tau, sigma, exact = _sigma_pair(cfg)
    ps = _pointsets(cfg, "grid:17")[0]
    A, S = assemble(k1, ps), assemble(k2, ps)
    rep = sandwich_check(A, S, sigma, tau, ps.q, trials=max(cfg.trials, 1), seed=cfg.seed,
                         C=cfg.tolerance("C"), C1=cfg.tolerance("C1"), exact=exact)
    tol = cfg.tolerance("sandwich_rtol")
    checks.add(-rep.worst_violation, rep.worst_violation <= tol)
    checks.add(-rep.worst_eigen_violation, rep.worst_eigen_violation <= tol)
    row = {"kernel": k1.id, "kernel_sigma": k2.id, **rep.as_dict()}
    row["warnings"] = "; ".join(rep.warnings)
    _emit(cfg, row)


def cmd_sweep(cfg: RunConfig, checks: Checks) -> None:
    k1, k2, tau, sigma, exact = _sigma_pair(cfg)
    try:
        lo, hi = (int(t) for t in cfg.levels.split(":"))
    except ValueError:
        raise UsageError(f"bad --levels value {cfg.levels!r}; expected lo:hi") from None
    if hi < lo:
        raise UsageError("--levels needs lo <= hi")
    box = _parse_box(cfg.box)
    width = box[1] - box[0]
    spacings = [width * 2.0**-k for k in range(lo, hi + 1)]
    res = sweep_exponent_fit((k1, k2), cfg.dim, spacings, box=box, seed=cfg.seed, workers=cfg.workers)
    tol = cfg.tolerance("sandwich_rtol")
    if exact:
        for lv in res.levels:
            checks.add(lv.min_ratio - 1.0, lv.min_ratio >= 1.0 - tol)
    doc = {"kernel": k1.id, "kernel_sigma": k2.id, "tau": tau, "sigma": sigma, "dim": cfg.dim,
           "expected": {"slope_lambda_min": 2 * tau - cfg.dim,
                        "slope_max_ratio": -(1 - sigma) * 2 * tau,
                        "slope_naive": -2 * tau},
           **res.as_dict()}
    if cfg.format == "csv":
        _emit(cfg, [lv.__dict__ for lv in res.levels])
        slopes = {k: doc[k] for k in ("slope_lambda_min", "slope_max_ratio", "slope_naive")}
        sys.stdout.write(render(slopes, "csv"))
    else:
        _emit(cfg, doc)


def cmd_align(cfg: RunConfig, checks: Checks) -> None:
    if cfg.dim not in (1, 2, 3, 4):
        raise UsageError(f"--dim {cfg.dim} unsupported")
    k1 = _kernel(cfg.kernel or "matern-quadratic", cfg.dim)
    k2 = _kernel(cfg.kernel2 or "matern-basic", cfg.dim)
    ps = _pointsets(cfg, "random:20")[0]
    report = alignment_experiment(ps, k1, k2)
    width = int(cfg.tolerance("band"))
    perr = report.parseval_error()
    tol = cfg.tolerance("parseval")
    checks.add((tol - perr) / tol)
    checks.add(1.0 + 1e-12 - float(report.cross.max()))
    checks.add(float(report.cross.min()))
    row = {"n": report.n, "parseval_error": perr, "clusters": report.has_clusters,
           "band_mass": report.diag_band_mass(width),
           "shuffled_band_mass": report.shuffled_band_mass(width, cfg.seed)}
    if cfg.out:
        pgm = Path(cfg.out)
        write_pgm(report, pgm)
        write_cross_csv(report, pgm.with_suffix(".csv"))
        sys.stdout.write(render(row, cfg.format))
    else:
        _emit(cfg, row)


COMMANDS = {
    "constants": cmd_constants,
    "bounds": cmd_bounds,
    "ingham": cmd_ingham,
    "localize": cmd_localize,
    "sandwich": cmd_sandwich,
    "sweep": cmd_sweep,
    "align": cmd_align,
}
CHECKING = {"bounds", "ingham", "localize", "sandwich", "sweep", "align"}


# argument handling ---------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    a = common.add_argument
    a("--config", help="JSON file with RunConfig fields; flags override it")
    a("--dim", type=int)
    a("--kernel")
    a("--kernel2")
    a("--tau", type=float)
    a("--sigma", type=float)
    a("--gamma", type=float)
    a("--points", action="append", help="grid:<m>, random:<n> or perturbed:<m>; repeatable")
    a("--grid", type=int, help="shorthand for --points grid:<m>")
    a("--box", help="per-axis bounds a,b")
    a("--seed", type=int)
    a("--trials", type=int)
    a("--levels", help="dyadic levels lo:hi for sweep")
    a("--out")
    a("--format", choices=("csv", "json"))
    a("--workers", type=int)
    a("--tol-override", action="append", default=[], metavar="KEY=VALUE")
    a("--points-in")
    a("--points-out")
    p = _Parser(prog="kernstab", description="Stability experiments for radial kernel matrices.")
    p.add_argument("--version", action="version", version=f"kernstab {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def resolve_config(argv: list[str]) -> RunConfig:
    ns = build_parser().parse_args(argv)
    data = {}
    if ns.config:
        try:
            data = json.loads(Path(ns.config).read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad config file: {exc}") from None
    cfg = RunConfig.from_dict(data)
    cfg.subcommand = ns.subcommand
    for f in fields(RunConfig):
        v = getattr(ns, f.name, None)
        if f.name in ("subcommand", "tol", "points") or v is None:
            continue
        setattr(cfg, f.name, v)
    pts = list(ns.points or [])
    if ns.grid is not None:
        pts.append(f"grid:{ns.grid}")
    if pts:
        cfg.points = pts
    tol = dict(cfg.tol)
    for item in ns.tol_override:
        key, sep, val = item.partition("=")
        if not sep or key not in TOLERANCES:
            raise UsageError(f"bad --tol-override {item!r}; keys: {', '.join(TOLERANCES)}")
        try:
            tol[key] = float(val)
        except ValueError:
            raise UsageError(f"bad --tol-override value {item!r}") from None
    cfg.tol = tol
    if cfg.format not in ("csv", "json"):
        raise UsageError(f"bad format {cfg.format!r}")
    return cfg


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("KERNSTAB_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = resolve_config(argv)
    except UsageError as exc:
        print(f"kernstab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kernstab: {exc}", file=sys.stderr)
        return EXIT_IO
    checks = Checks()
    try:
        COMMANDS[cfg.subcommand](cfg, checks)
    except UsageError as exc:
        print(f"kernstab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kernstab: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"kernstab: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    status = "ok"
    if cfg.subcommand in CHECKING:
        print(checks.summary())
        status = "pass" if checks.passed else "fail"
    try:
        _manifest(cfg, status)
    except OSError as exc:
        print(f"kernstab: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if checks.passed else EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
