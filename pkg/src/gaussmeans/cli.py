"""Command-line front end.

Five subcommands:

* ``means``   — tabulate a Gaussian-mean profile (r, x, M, h, phi, mean).
* ``analyze`` — run the theorem checks for the given sign of alpha next
  to the model-free log-log curvature oracle.
* ``verify``  — run one of the proof-level suites
  (lemma4 | lemma5 | dchain | delta).
* ``roots``   — print t0 (and x0/corollary radius per supplied alpha).
* ``scan``    — sweep an (alpha, p) rectangle and classify each cell's
  mean profile as convex/concave/linear/mixed inside and outside the
  guaranteed-convexity radius.

Exit status: 0 when every asserted check passes, 1 when failures are
present, 2 on usage errors. Reports are emitted as CSV (means, scan) or
JSON (all commands); floats are serialized with 17 significant digits,
and output files are written atomically (temp file + rename) so a
failing run never leaves a partial report behind.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .convexity_analysis import (
    check_theorem1,
    check_theorem2,
    check_theorem3,
    corollary1_radius,
    curvature_verdict,
)
from .functions import EntireFunction, parse_function_spec
from .integral_means import MeanParams, radial_mean_profile
from .special_fn import (
    CancellationFault,
    ConvergenceError,
    DomainFault,
    SIGN_TOL,
    solve_t0,
    x0_of_alpha,
)
from .verification import (
    GridSpec,
    verify_d_chain,
    verify_delta_boundary,
    verify_lemma4,
    verify_lemma5,
)

__all__ = ["CommandConfig", "ReportDocument", "run", "main"]

OUTDIR_ENV = "GAUSSMEANS_OUTDIR"


def _g17(v: float) -> str:
    return format(float(v), ".17g")


def _json_fragment(obj, indent: int) -> str:
    """Serialize to JSON with every float at 17 significant digits."""
    pad = "  " * indent
    pad_in = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad_in}{json.dumps(str(k))}: {_json_fragment(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad_in}{_json_fragment(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return _g17(v)
        return json.dumps("inf" if v > 0 else "-inf" if v < 0 else "nan")
    return json.dumps(obj)


@dataclass
class ReportDocument:
    """Self-describing report: schema, command echo, tolerances, payload."""

    metadata: dict
    tolerances: dict
    payload: dict
    schema: int = 1

    def to_json(self) -> str:
        doc = {
            "schema": self.schema,
            "metadata": self.metadata,
            "tolerances": self.tolerances,
            "payload": self.payload,
        }
        return _json_fragment(doc, 0) + "\n"

    def to_csv(self) -> str:
        rows = self.payload.get("rows")
        columns = self.payload.get("columns")
        if rows is None or columns is None:
            raise DomainFault(
                "csv output is only available for row-shaped reports "
                "(means, scan); use --format json"
            )
        out = [",".join(columns)]
        for row in rows:
            cells = []
            for c in columns:
                v = row[c]
                cells.append(_g17(v) if isinstance(v, (float, np.floating)) else str(v))
            out.append(",".join(cells))
        return "\n".join(out) + "\n"


@dataclass
class CommandConfig:
    """Parsed command description; `run` consumes it without re-parsing."""

    command: str
    function_spec: str = "mono:1"
    p: float = 2.0
    alpha: float = -1.0
    r_min: float = 0.05
    r_max: float = 2.0
    points: int = 0                       # 0 = choose from the span
    theorem: str = "auto"
    interval: tuple[float, float] | None = None
    x_max: float | None = None
    x_point: float | None = None
    suite: str = "lemma4"
    probes: tuple[float, ...] = (0.1, 0.01, 0.001)
    stable: bool = True
    precision: float = 1e-12
    alphas: tuple[float, ...] = ()
    alpha_range: tuple[float, float, int] = (-2.0, 2.0, 3)
    p_range: tuple[float, float, int] = (1.0, 3.0, 3)
    oracle_points: int = 200
    tol: float = 1e-10
    fmt: str = "json"
    output: str | None = None

    def __post_init__(self):
        if not (self.r_min > 0.0 and self.r_max > self.r_min):
            raise DomainFault(f"need 0 < rmin < rmax, got [{self.r_min}, {self.r_max}]")
        if self.points and self.points < 3:
            raise DomainFault(f"points must be >= 3, got {self.points}")
        if not (self.p > 0.0):
            raise DomainFault(f"p must be positive, got {self.p}")

    def echo(self) -> str:
        parts = [self.command]
        if self.command in ("means", "analyze", "scan"):
            parts += ["--f", self.function_spec]
        if self.command in ("means", "analyze") or (
            self.command == "verify" and self.suite in ("lemma5", "delta")
        ):
            parts += ["--p", _g17(self.p), "--alpha", _g17(self.alpha)]
        if self.command == "means":
            parts += ["--rmin", _g17(self.r_min), "--rmax", _g17(self.r_max),
                      "--points", str(self._grid_points())]
        if self.command == "analyze":
            parts += ["--theorem", self.theorem]
            if self.interval is not None:
                parts += ["--interval", _g17(self.interval[0]), _g17(self.interval[1])]
            if self.x_max is not None:
                parts += ["--xmax", _g17(self.x_max)]
        if self.command == "verify":
            parts += ["--suite", self.suite]
            if self.suite == "dchain":
                parts += ["--alpha", _g17(self.alpha)]
                if self.x_point is not None:
                    parts += ["--x", _g17(self.x_point)]
            if self.suite == "delta":
                parts += ["--probes", ",".join(_g17(q) for q in self.probes)]
                if not self.stable:
                    parts += ["--unstable"]
        if self.command == "roots":
            parts += ["--precision", _g17(self.precision)]
            for a in self.alphas:
                parts += ["--alpha", _g17(a)]
        if self.command == "scan":
            parts += ["--alpha-range", _g17(self.alpha_range[0]),
                      _g17(self.alpha_range[1]), str(self.alpha_range[2]),
                      "--p-range", _g17(self.p_range[0]),
                      _g17(self.p_range[1]), str(self.p_range[2])]
        parts += ["--tol", _g17(self.tol), "--format", self.fmt]
        return " ".join(parts)

    def _grid_points(self) -> int:
        if self.points:
            return self.points
        decades = math.log10(self.r_max / self.r_min)
        return int(min(2000, max(33, round(200 * decades))))


def _metadata(config: CommandConfig) -> dict:
    from . import __version__

    return {
        "command": config.echo(),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _base_tolerances(config: CommandConfig) -> dict:
    return {"quad_tol": config.tol, "sign_tol": SIGN_TOL}


def _function(config: CommandConfig) -> EntireFunction:
    return parse_function_spec(config.function_spec)


def _run_means(config: CommandConfig) -> tuple[dict, int]:
    f = _function(config)
    params = MeanParams(p=config.p, alpha=config.alpha)
    profile = radial_mean_profile(
        f, params, (config.r_min, config.r_max, config._grid_points()), config.tol
    )
    columns = ["r", "x", "M", "h", "phi", "mean"]
    rows = [
        {
            "r": float(profile.r[i]), "x": float(profile.x[i]),
            "M": float(profile.M[i]), "h": float(profile.h[i]),
            "phi": float(profile.phi[i]), "mean": float(profile.mean[i]),
        }
        for i in range(profile.r.size)
    ]
    return {"columns": columns, "rows": rows, "function": f.describe(),
            "p": config.p, "alpha": config.alpha}, 0


def _run_analyze(config: CommandConfig) -> tuple[dict, int]:
    f = _function(config)
    params = MeanParams(p=config.p, alpha=config.alpha)
    if config.theorem == "auto":
        selected = ["1", "2"] if config.alpha < 0 else ["3"]
    else:
        selected = [config.theorem]
    n = config.points or 512
    reports = []
    intervals = []
    for t in selected:
        if t == "1":
            rep = check_theorem1(f, params, config.interval, n, config.tol)
        elif t == "2":
            x_max = config.x_max if config.x_max is not None else (
                2.0 * x0_of_alpha(config.alpha)
            )
            rep = check_theorem2(f, params, x_max, n, config.tol)
        elif t == "3":
            rep = check_theorem3(f, params, config.interval, n, config.tol)
        else:
            raise DomainFault(f"unknown theorem {t!r}")
        reports.append(rep)
        intervals.append(rep.interval)
    lo = min(i[0] for i in intervals)
    hi = max(i[1] for i in intervals)
    profile = radial_mean_profile(
        f, params, (math.sqrt(lo), math.sqrt(hi), config.oracle_points), config.tol
    )
    oracle = curvature_verdict(profile)
    payload = {
        "function": f.describe(), "p": config.p, "alpha": config.alpha,
        "reports": [r.to_dict() for r in reports],
        "curvature_oracle": oracle.to_dict(),
    }
    code = 1 if any(r.verdict == "fails" for r in reports) else 0
    return payload, code


def _run_verify(config: CommandConfig) -> tuple[dict, int]:
    if config.suite == "lemma4":
        report = verify_lemma4()
    elif config.suite == "lemma5":
        f = _function(config)
        report = verify_lemma5(f, MeanParams(config.p, config.alpha),
                               tol=config.tol)
    elif config.suite == "dchain":
        x = config.x_point
        if x is None:
            x = 2.0 * x0_of_alpha(config.alpha)
        report = verify_d_chain(config.alpha, x)
    elif config.suite == "delta":
        f = _function(config)
        report = verify_delta_boundary(
            f, MeanParams(config.p, config.alpha), config.probes,
            stable=config.stable, tol=config.tol,
        )
    else:
        raise DomainFault(f"unknown suite {config.suite!r}")
    return {"report": report.to_dict()}, 0 if report.passed else 1


def _run_roots(config: CommandConfig) -> tuple[dict, int]:
    root = solve_t0(tolerance=config.precision)
    payload = {
        "t0": root.value,
        "residual": root.residual,
        "iterations": root.iterations,
        "x0": {},
        "corollary1_radius": {},
    }
    for a in config.alphas:
        payload["x0"][_g17(a)] = x0_of_alpha(a)
        payload["corollary1_radius"][_g17(a)] = corollary1_radius(a)
    code = 0 if abs(root.residual) < config.precision else 1
    return payload, code


def _scan_cell(f: EntireFunction, alpha: float, p: float,
               points: int, tol: float) -> dict:
    params = MeanParams(p=p, alpha=alpha)
    if alpha < 0.0:
        radius = corollary1_radius(alpha)
        inner = radial_mean_profile(
            f, params, (radius / 20.0, radius, points), tol
        )
        outer = radial_mean_profile(
            f, params, (radius, 4.0 * radius, points), tol
        )
        v_in = curvature_verdict(inner).verdict
        v_out = curvature_verdict(outer).verdict
    else:
        radius = float("inf")
        inner = radial_mean_profile(f, params, (0.05, 3.0, points), tol)
        v_in = curvature_verdict(inner).verdict
        v_out = "n/a"
    return {"alpha": alpha, "p": p, "radius": radius,
            "verdict_inner": v_in, "verdict_outer": v_out}


def _run_scan(config: CommandConfig) -> tuple[dict, int]:
    f = _function(config)
    a_lo, a_hi, a_n = config.alpha_range
    p_lo, p_hi, p_n = config.p_range
    if a_n < 1 or p_n < 1 or not (p_lo > 0.0) or p_hi < p_lo or a_hi < a_lo:
        raise DomainFault("scan ranges must be nonempty with positive p")
    points = config.points or 41
    rows = []
    for alpha in np.linspace(a_lo, a_hi, a_n):
        for p in np.linspace(p_lo, p_hi, p_n):
            rows.append(_scan_cell(f, float(alpha), float(p), points, config.tol))
    columns = ["alpha", "p", "radius", "verdict_inner", "verdict_outer"]
    return {"columns": columns, "rows": rows, "function": f.describe()}, 0


def run(config: CommandConfig) -> tuple[ReportDocument, int]:
    """Execute a parsed command; returns (report, exit status)."""
    dispatch = {
        "means": _run_means,
        "analyze": _run_analyze,
        "verify": _run_verify,
        "roots": _run_roots,
        "scan": _run_scan,
    }
    if config.command not in dispatch:
        raise DomainFault(f"unknown command {config.command!r}")
    payload, code = dispatch[config.command](config)
    doc = ReportDocument(
        metadata=_metadata(config),
        tolerances=_base_tolerances(config),
        payload=payload,
    )
    return doc, code


# ----------------------------------------------------------------------
# argument parsing and I/O
# ----------------------------------------------------------------------

def _probe_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad probe list {text!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussmeans",
        description="Gaussian integral means of entire functions: profiles, "
                    "log-convexity analysis, and verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, function=True):
        if function:
            sp.add_argument("--f", dest="function_spec", default="mono:1",
                            help="function spec: mono:K | poly:c0,c1,... | "
                                 "exp:BETA | taylor:c0,c1,...[;tail=T] | "
                                 "taylor:@FILE")
            sp.add_argument("--p", type=float, default=2.0)
            sp.add_argument("--alpha", type=float, default=-1.0)
        sp.add_argument("--tol", type=float, default=1e-10,
                        help="quadrature relative tolerance")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"),
                        default=None)
        sp.add_argument("--output", default=None,
                        help=f"output path (relative paths resolve under "
                             f"${OUTDIR_ENV} when set); default stdout")

    sp = sub.add_parser("means", help="tabulate r,x,M,h,phi,mean")
    sp.add_argument("--rmin", dest="r_min", type=float, default=0.05)
    sp.add_argument("--rmax", dest="r_max", type=float, default=2.0)
    sp.add_argument("--points", type=int, default=0,
                    help="grid points (default: about 200 per decade)")
    common(sp)

    sp = sub.add_parser("analyze", help="theorem checks + curvature oracle")
    sp.add_argument("--theorem", choices=("auto", "1", "2", "3"), default="auto")
    sp.add_argument("--interval", nargs=2, type=float, default=None,
                    metavar=("XLO", "XHI"))
    sp.add_argument("--xmax", dest="x_max", type=float, default=None)
    sp.add_argument("--points", type=int, default=0,
                    help="theorem grid points (default 512)")
    sp.add_argument("--oracle-points", dest="oracle_points", type=int, default=200)
    common(sp)

    sp = sub.add_parser("verify", help="run a proof-level suite")
    sp.add_argument("--suite", choices=("lemma4", "lemma5", "dchain", "delta"),
                    required=True)
    sp.add_argument("--x", dest="x_point", type=float, default=None,
                    help="dchain evaluation point (default 2*x0)")
    sp.add_argument("--probes", type=_probe_list, default=(0.1, 0.01, 0.001),
                    help="delta suite probes, comma-separated, decreasing")
    sp.add_argument("--unstable", dest="stable", action="store_false",
                    help="use the textbook (B-S)/(2A) root form")
    common(sp)

    sp = sub.add_parser("roots", help="print t0 and x0 per alpha")
    sp.add_argument("--precision", type=float, default=1e-12)
    sp.add_argument("--alpha", dest="alphas", type=float, action="append",
                    default=[], help="negative alpha; may repeat")
    common(sp, function=False)

    sp = sub.add_parser("scan", help="classify an (alpha, p) rectangle")
    sp.add_argument("--alpha-range", dest="alpha_range", nargs=3, default=None,
                    metavar=("LO", "HI", "STEPS"))
    sp.add_argument("--p-range", dest="p_range", nargs=3, default=None,
                    metavar=("LO", "HI", "STEPS"))
    sp.add_argument("--points", type=int, default=0,
                    help="profile points per cell (default 41)")
    common(sp)
    return parser


def _config_from_args(args: argparse.Namespace) -> CommandConfig:
    kwargs = {"command": args.command}
    fields_ = set(CommandConfig.__dataclass_fields__)
    for name, value in vars(args).items():
        if name in fields_ and value is not None and name != "command":
            kwargs[name] = value
    if getattr(args, "alphas", None):
        kwargs["alphas"] = tuple(args.alphas)
    if getattr(args, "interval", None) is not None:
        kwargs["interval"] = (args.interval[0], args.interval[1])
    for rng_name in ("alpha_range", "p_range"):
        rng = getattr(args, rng_name, None)
        if rng is not None:
            kwargs[rng_name] = (float(rng[0]), float(rng[1]), int(rng[2]))
    if getattr(args, "probes", None) is not None and args.command == "verify":
        kwargs["probes"] = tuple(args.probes)
    if args.fmt is None:
        kwargs["fmt"] = "csv" if args.command in ("means", "scan") else "json"
    return CommandConfig(**kwargs)


def _resolve_output(path: str) -> str:
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(path):
        return os.path.join(outdir, path)
    return path


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gaussmeans-tmp-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _config_from_args(args)
        doc, code = run(config)
        text = doc.to_csv() if config.fmt == "csv" else doc.to_json()
        if config.output:
            _atomic_write(_resolve_output(config.output), text)
    except (DomainFault, CancellationFault, ValueError, OverflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if config.command == "roots":
        root = doc.payload
        print(f"t0={_g17(root['t0'])} residual={root['residual']:.3e} "
              f"iterations={root['iterations']}")
        for key, val in root["x0"].items():
            print(f"x0(alpha={key})={_g17(val)} "
                  f"radius={_g17(root['corollary1_radius'][key])}")

    if not config.output and config.command != "roots":
        sys.stdout.write(text)
    return code
