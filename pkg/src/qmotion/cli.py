"""``qmotion`` command-line front end.

Parameters are layered: built-in defaults, then ``--config``, then a figure
``--preset``, then explicit flags. Trajectory commands write one column per
requested velocity. Exit codes: 0 success, 1 configuration error,
2 numerical or validation failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .amplitude import amplitude_at, amplitude_derivative_at, amplitude_solution
from .dynamics import rates_from_samples
from .errors import ConfigError, DegenerateRootsError, QMotionError
from .io import Table, parse_csv, render_svg, to_csv, to_json
from .nonmarkov import DEFAULT_SCAN_STEP, StatePair, sweep_beta, sweep_lambda
from .oracles import volterra_on_grid
from .params import CavityQubitParams, load_params, to_dimensionless
from .presets import PRESETS
from .validation import CHECKS, run_validation

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

DEFAULT_T_MAX = 50.0
DEFAULT_DT = 0.01
MAX_SAMPLES = 10_000_000

TRAJECTORY_COMMANDS = ("coherence", "decay-rate", "lamb-shift", "amplitude")
COMMANDS = TRAJECTORY_COMMANDS + ("nonmarkov", "validate", "plot")

_YLABELS = {
    "coherence": "C",
    "decay-rate": "Gamma/gamma",
    "lamb-shift": "(Omega - 2 omega0)/gamma",
    "amplitude": "A",
    "nonmarkov": "N",
}


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors as config errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


@dataclass
class RunConfig:
    command: str
    params: CavityQubitParams
    betas: list
    lambda_ratios: list
    t_max: float | None = None
    dt: float | None = None
    fmt: str = "csv"
    out: Path | None = None
    plot: bool = False
    preset: str | None = None
    yscale: str = "linear"
    pair: StatePair = field(default_factory=StatePair)
    maximize: bool = True

    def time_grid(self):
        t_max = DEFAULT_T_MAX if self.t_max is None else self.t_max
        dt = DEFAULT_DT if self.dt is None else self.dt
        n = int(round(t_max / dt))
        if n < 1 or n + 1 > MAX_SAMPLES:
            raise ConfigError(f"time grid of {n + 1} samples is outside [2, {MAX_SAMPLES}]")
        return np.linspace(0.0, t_max, n + 1)


def _float_list(text):
    items = [s.strip() for s in text.split(",")]
    try:
        return [float(s) for s in items if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _positive(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive number: {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qmotion", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qmotion {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", type=Path, help="key=value or JSON parameter file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="figure parameter set")
        p.add_argument("--beta", type=_float_list, help="comma-separated v/c values")
        p.add_argument("--lambda-ratio", type=_float_list, help="comma-separated lambda/gamma values")
        p.add_argument("--t-max", type=_positive, help="final scaled time gamma*t")
        p.add_argument("--dt", type=_positive, help="scaled time step")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", type=Path, help="output file (default: stdout)")

    for name in TRAJECTORY_COMMANDS:
        p = sub.add_parser(name, help=f"{name} trajectories")
        common(p)
        p.add_argument("--plot", action="store_true", help="also write an SVG next to --out")
    p = sub.add_parser("nonmarkov", help="BLP non-Markovianity sweeps")
    common(p)
    p.add_argument("--plot", action="store_true", help="also write an SVG next to --out")
    p.add_argument("--theta", type=float, default=0.0,
                   help="polar angle of the antipodal state pair for the fixed-pair column")
    p.add_argument("--no-maximize", action="store_true",
                   help="skip the optimisation over state pairs")
    p = sub.add_parser("validate", help="compare the analytic solution with the oracles")
    common(p)
    p.add_argument("--checks", default=",".join(CHECKS),
                   help=f"comma-separated subset of {', '.join(CHECKS)} (empty: none)")
    p = sub.add_parser("plot", help="render CSV outputs as SVG")
    p.add_argument("inputs", nargs="+", type=Path)
    p.add_argument("--out", type=Path, help="output SVG (single input) or directory")
    p.add_argument("--log", action="store_true", help="log-scale y axis")
    return parser


def resolve(args) -> RunConfig:
    """Merge defaults, config file, preset and flags into a :class:`RunConfig`."""
    params = load_params(args.config) if args.config else CavityQubitParams()
    preset = PRESETS.get(args.preset, {}) if args.preset else {}
    if preset and preset["command"] != args.command and args.command != "validate":
        raise ConfigError(f"preset {args.preset} belongs to the {preset['command']} command")
    betas = args.beta if args.beta is not None else preset.get("beta", [params.beta])
    ratios = args.lambda_ratio if args.lambda_ratio is not None else preset.get(
        "lambda_ratio", [params.lambda_width / params.gamma])
    if not betas:
        raise ConfigError("beta list is empty")
    if not ratios:
        raise ConfigError("lambda-ratio list is empty")
    # validate every requested point up front
    for beta in betas:
        for ratio in ratios:
            params.with_(beta=beta, lambda_width=ratio * params.gamma)
    cfg = RunConfig(
        command=args.command, params=params, betas=list(betas), lambda_ratios=list(ratios),
        t_max=args.t_max if args.t_max is not None else preset.get("t_max"),
        dt=args.dt if args.dt is not None else preset.get("dt"),
        fmt=args.format, out=args.out, plot=getattr(args, "plot", False),
        preset=args.preset, yscale=preset.get("yscale", "linear"),
    )
    if args.command == "nonmarkov":
        if not 0 <= args.theta <= math.pi / 2:
            raise ConfigError("--theta must lie in [0, pi/2]")
        cfg.pair = StatePair(args.theta)
        cfg.maximize = not args.no_maximize
    return cfg


def _params_text(p: CavityQubitParams, skip=()):
    return " ".join(f"{k}={v!r}" for k, v in p.to_dict().items() if k not in skip)


def _header(cfg: RunConfig, grid: str, **extra):
    meta = {
        "command": cfg.command,
        "preset": cfg.preset or "none",
        "params": _params_text(cfg.params, skip=("beta", "lambda_width")),
        "lambda_ratio": ",".join(repr(float(r)) for r in cfg.lambda_ratios),
        "beta": ",".join(repr(float(b)) for b in cfg.betas),
        "grid": grid,
        "units": "time in 1/gamma, rates in gamma",
        "title": f"{cfg.command}" + (f" ({cfg.preset})" if cfg.preset else ""),
        "ylabel": _YLABELS.get(cfg.command, "value"),
        "yscale": cfg.yscale,
    }
    meta.update(extra)
    return meta


def _points(cfg: RunConfig):
    """(label, params) for every requested (lambda, beta) combination."""
    single = len(cfg.lambda_ratios) == 1
    for ratio in cfg.lambda_ratios:
        for beta in cfg.betas:
            label = f"beta={beta:.6g}" if single else f"lambda_ratio={ratio:.6g};beta={beta:.6g}"
            yield label, cfg.params.with_(lambda_width=ratio * cfg.params.gamma, beta=beta)


def _samples(p: CavityQubitParams, gt):
    """Rotating-frame ``(A, dA)`` on ``gt``; Volterra when the roots coincide."""
    dp = to_dimensionless(p)
    try:
        sol = amplitude_solution(dp)
    except DegenerateRootsError as exc:
        try:
            traj = volterra_on_grid(dp, gt)
        except ConfigError as too_long:
            # a numerical dead end, not a bad configuration
            raise DegenerateRootsError(f"{exc}; {too_long}", exc.roots) from None
        return traj.amplitude, traj.derivative, True
    return amplitude_at(sol, gt), amplitude_derivative_at(sol, gt), False


def cmd_trajectory(cfg: RunConfig) -> Table:
    """Coherence, decay rate, Lamb shift or amplitude on a uniform time grid."""
    gt = cfg.time_grid()
    columns, data = ["gt"], [gt]
    singular_total = 0
    extra = {}
    for label, p in _points(cfg):
        A, dA, fallback = _samples(p, gt)
        if fallback:
            extra[f"volterra@{label}"] = "coincident characteristic roots"
        if cfg.command == "coherence":
            columns.append(f"C@{label}")
            data.append(np.abs(A))
        elif cfg.command == "amplitude":
            columns += [f"ReA@{label}", f"ImA@{label}", f"absA@{label}"]
            data += [A.real, A.imag, np.abs(A)]
        else:
            rates = rates_from_samples(gt, A, dA, 0.0)
            singular_total += int(rates.singular.sum())
            if cfg.command == "decay-rate":
                columns.append(f"Gamma@{label}")
                data.append(rates.gamma_over_gamma)
            else:
                columns.append(f"Omega@{label}")
                data.append(rates.omega_over_gamma)
    if cfg.command in ("decay-rate", "lamb-shift"):
        extra["singular_samples"] = str(singular_total)
    if cfg.command == "amplitude":
        extra["frame"] = "rotating at omega0"
    if cfg.command == "coherence":
        extra["initial_state"] = "(|a> + |b>)/sqrt(2)"
    grid = f"t_max={float(gt[-1])!r} dt={float(gt[1] - gt[0])!r} samples={gt.size}"
    return Table(columns, np.column_stack(data), _header(cfg, grid, **extra))


def cmd_nonmarkov(cfg: RunConfig) -> tuple[Table, bool]:
    """Beta sweep (one lambda) or lambda sweep (several); returns (table, all_failed)."""
    dt_scan = DEFAULT_SCAN_STEP if cfg.dt is None else cfg.dt
    horizon = "auto" if cfg.t_max is None else repr(cfg.t_max)
    grid = f"horizon={horizon} dt_scan={dt_scan!r} theta={cfg.pair.theta!r}"
    if len(cfg.lambda_ratios) == 1:
        p = cfg.params.with_(lambda_width=cfg.lambda_ratios[0] * cfg.params.gamma)
        rows = sweep_beta(p, sorted(cfg.betas), cfg.t_max, cfg.pair, cfg.maximize, dt_scan)
        columns = ["beta", "N", "N_max", "theta_opt", "horizon"]
        data = [[r.beta, r.n_measure, r.n_max, r.theta_opt, r.horizon] for r in rows]
        extra = {"xlabel": "beta"}
    else:
        sweep = sweep_lambda(cfg.params, cfg.lambda_ratios, cfg.betas, cfg.t_max, cfg.pair,
                             maximize=cfg.maximize, dt_scan=dt_scan)
        rows = sweep.rows
        columns = ["lambda_ratio", "beta", "N", "N_max"]
        data = [[r.lambda_ratio, r.beta, r.n_measure, r.n_max] for r in rows]
        extra = {"group": "beta", "value": "N",
                 "threshold_1e-3": " ".join(
                     f"beta={b!r}:{'none' if t is None else repr(float(t))}"
                     for b, t in sweep.thresholds.items())}
    errors = 0
    for i, r in enumerate(r for r in rows if r.error):
        failed = math.isnan(r.n_measure)
        errors += failed
        extra[f"{'failed' if failed else 'note'}_{i}"] = (
            f"beta={r.beta!r} lambda_ratio={r.lambda_ratio!r}: {r.error}")
    table = Table(columns, np.array(data, dtype=float), _header(cfg, grid, **extra))
    return table, errors == len(rows)


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8", newline="\n")


def _write_table(table: Table, cfg: RunConfig):
    _emit(to_json(table) if cfg.fmt == "json" else to_csv(table), cfg.out)
    if cfg.plot:
        if cfg.out is None:
            raise ConfigError("--plot needs --out")
        cfg.out.with_suffix(".svg").write_text(render_svg(table), encoding="utf-8", newline="\n")


def cmd_validate(args) -> int:
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    dt = 1e-3 if args.dt is None else args.dt
    report = run_validation(checks, dt=dt)
    report["version"] = __version__
    _emit(json.dumps(report, indent=1, sort_keys=True) + "\n", args.out)
    return EXIT_OK if report["passed"] else EXIT_NUMERIC


def cmd_plot(args) -> int:
    if args.out is not None and len(args.inputs) > 1 and not args.out.is_dir():
        raise ConfigError("--out must be an existing directory when plotting several files")
    for path in args.inputs:
        text = path.read_text(encoding="utf-8")
        try:
            table = parse_csv(text)
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        svg = render_svg(table, log=True if args.log else None)
        if args.out is None:
            target = path.with_suffix(".svg")
        elif args.out.is_dir():
            target = args.out / (path.stem + ".svg")
        else:
            target = args.out
        target.write_text(svg, encoding="utf-8", newline="\n")
    return EXIT_OK


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args)
    if args.command == "plot":
        return cmd_plot(args)
    cfg = resolve(args)
    if cfg.command == "nonmarkov":
        table, all_failed = cmd_nonmarkov(cfg)
        _write_table(table, cfg)
        return EXIT_NUMERIC if all_failed else EXIT_OK
    _write_table(cmd_trajectory(cfg), cfg)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        code = run(argv)
    except SystemExit as exc:  # --help / --version
        code = exc.code if isinstance(exc.code, int) else EXIT_OK
    except OSError as exc:
        print(f"qmotion: I/O error: {exc}", file=sys.stderr)
        code = EXIT_IO
    except ConfigError as exc:
        print(f"qmotion: configuration error: {exc}", file=sys.stderr)
        code = EXIT_CONFIG
    except QMotionError as exc:
        code = EXIT_CONFIG if isinstance(exc, ValueError) else EXIT_NUMERIC
        print(f"qmotion: {type(exc).__name__}: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"qmotion: configuration error: {exc}", file=sys.stderr)
        code = EXIT_CONFIG
    return code


if __name__ == "__main__":
    sys.exit(main())
