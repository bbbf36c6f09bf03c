"""Command-line interface: ``humsim isotherm|sweep|temp-sweep|fit``.

Exit codes: 0 success, 1 usage error, 2 data error (including failed
``--verify`` checks), 3 fit did not converge.
"""
import argparse
import os
import sys

import numpy as np

from . import io
from .adsorption import bet_finite, bet_infinite
from .calibrate import fit
from .capillary import ADSORPTION, DESORPTION
from .charts import sweep_chart
from .constants import X_CLAMP
from .exceptions import ConvergenceError, DataError, DomainError
from .sensor import (
    ZERO_CELSIUS,
    SensorConfig,
    loop_area,
    parse_path,
    rh_sweep,
    temperature_sweep,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NOT_CONVERGED = 0, 1, 2, 3

_DEFAULT_RH_PATH = "0:95:1,95:0:1"
_DEFAULT_T_PATH = "5:95:1,95:5:1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load(args):
    path = args.config or os.environ.get("HUMSIM_CONFIG")
    if not path:
        return SensorConfig(), {}
    return io.load_config(path)


def _path(spec):
    try:
        return parse_path(spec)
    except ValueError as exc:
        raise UsageError(f"bad path {spec!r}: {exc}")


def cmd_isotherm(args):
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    x = np.linspace(0.0, 1.0, args.points)
    x[-1] = 1.0 - X_CLAMP
    try:
        finite = bet_finite(x, args.c, args.layers)
        infinite = bet_infinite(x, args.c)
    except DomainError as exc:
        raise UsageError(str(exc))
    lines = ["x,coverage_finite,coverage_infinite"]
    lines += [f"{io.fmt(a)},{io.fmt(b)},{io.fmt(c)}" for a, b, c in zip(x, finite, infinite)]
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def verify_rh_loop(result, closure_pf=1e-3, slack_pf=1e-9):
    """Hysteresis ordering and loop-closure checks; returns a list of failures."""
    problems = []
    asc = {}
    for r in result.rows:
        if r.branch == ADSORPTION:
            asc.setdefault(r.rh_percent, r.capacitance_f * 1e12)
    for r in result.rows:
        if r.branch == DESORPTION and r.rh_percent in asc:
            c_desc = r.capacitance_f * 1e12
            if c_desc < asc[r.rh_percent] - slack_pf:
                problems.append(
                    f"descending C {c_desc:.6g} pF below ascending "
                    f"{asc[r.rh_percent]:.6g} pF at RH {r.rh_percent:g}%")
    first, last = result.rows[0], result.rows[-1]
    if last.rh_percent == first.rh_percent and len(result.rows) > 1:
        gap = abs(last.capacitance_f - first.capacitance_f) * 1e12
        if gap >= closure_pf:
            problems.append(f"loop does not close at RH {first.rh_percent:g}%: {gap:.3g} pF")
    return problems


def cmd_sweep(args):
    cfg, run = _load(args)
    section = run.get("sweep", {})
    path = _path(args.path or section.get("path", _DEFAULT_RH_PATH))
    temp_c = args.temp if args.temp is not None else float(section.get("temperature_c", 25.0))
    try:
        result = rh_sweep(cfg, path, temp_c + ZERO_CELSIUS)
    except DomainError as exc:
        raise UsageError(str(exc))
    footer = [f"loop_area_pf_percent={io.fmt(loop_area(result))}"]
    _write(args.out, io.format_sweep_csv(result, footer))
    if args.chart:
        _write(args.chart, sweep_chart(result, "rh_percent", "Capacitance vs relative humidity"))
    if args.verify:
        problems = verify_rh_loop(result)
        for p in problems:
            print(f"verify: {p}", file=sys.stderr)
        if problems:
            return EXIT_DATA
    return EXIT_OK


def cmd_temp_sweep(args):
    cfg, run = _load(args)
    section = run.get("temp_sweep", {})
    rh = args.rh if args.rh is not None else float(section.get("rh", 35.0))
    dt = args.dt if args.dt is not None else float(section.get("dt", 60.0))
    t_path = [t + ZERO_CELSIUS for t in _path(args.t_path or section.get("t_path", _DEFAULT_T_PATH))]
    try:
        result = temperature_sweep(cfg, rh, t_path, dt)
    except DomainError as exc:
        raise UsageError(str(exc))
    footer = [f"loop_area_pf_k={io.fmt(loop_area(result, 'temp_c'))}"]
    _write(args.out, io.format_sweep_csv(result, footer))
    if args.chart:
        _write(args.chart, sweep_chart(result, "temp_c", f"Capacitance vs temperature at {rh:g}% RH"))
    return EXIT_OK


def cmd_fit(args):
    cfg, run = _load(args)
    data = io.parse_measurements(io.read_text(args.data))
    if args.spec:
        _, spec_run = io.load_config(args.spec)
        section = spec_run.get("fit")
    else:
        section = run.get("fit")
    if section is None:
        raise DataError("no 'fit' section found in the fit spec or config")
    spec = io.fit_spec_from_dict(section, cfg)
    result = fit(data, spec, cfg, jobs=args.jobs)
    out_run = dict(run)
    out_run["fit"] = io.fit_spec_to_dict(spec)
    if args.out:
        _write(args.out, io.dump_config(result.config, out_run))
    lines = [
        f"converged: {str(result.converged).lower()}",
        f"message: {result.message}",
        f"rms_pf: {io.fmt(result.rms_pf)}",
        f"iterations: {result.iterations}",
        f"evaluations: {result.evaluations}",
        "parameters:",
    ]
    for name, value in result.values.items():
        lines.append(f"  {name}: before={io.fmt(result.initial_values[name])} "
                     f"after={io.fmt(value)}")
    _write(args.report, "\n".join(lines) + "\n")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def build_parser():
    parser = _Parser(prog="humsim", description=(
        "Forward model and calibration of capacitive porous-alumina humidity sensors."))
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("isotherm", help="tabulate finite and infinite BET isotherms")
    p.add_argument("--c", type=float, required=True, help="BET energy constant")
    p.add_argument("--layers", type=float, required=True, help="maximum layer count")
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_isotherm)

    def common(p):
        p.add_argument("--config", help="YAML run config (default $HUMSIM_CONFIG)")
        p.add_argument("--out", help="output CSV (default stdout)")
        p.add_argument("--chart", help="write an SVG chart to this path")

    p = sub.add_parser("sweep", help="capacitance along an RH path")
    common(p)
    p.add_argument("--path", help=f"RH path, e.g. {_DEFAULT_RH_PATH!r}")
    p.add_argument("--temp", type=float, help="temperature, degC (default 25)")
    p.add_argument("--verify", action="store_true",
                   help="check hysteresis ordering and loop closure; exit 2 on violation")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("temp-sweep", help="capacitance along a temperature path at fixed RH")
    common(p)
    p.add_argument("--rh", type=float, help="relative humidity, percent (default 35)")
    p.add_argument("--t-path", dest="t_path", help=f"temperature path, degC, e.g. {_DEFAULT_T_PATH!r}")
    p.add_argument("--dt", type=float, help="seconds per step (default 60)")
    p.set_defaults(func=cmd_temp_sweep)

    p = sub.add_parser("fit", help="calibrate config parameters against measurements")
    p.add_argument("--data", required=True, help="measurement CSV")
    p.add_argument("--config", help="base YAML config (default $HUMSIM_CONFIG)")
    p.add_argument("--spec", help="YAML file with a 'fit' section (default: the config's)")
    p.add_argument("--out", help="write the fitted config here")
    p.add_argument("--report", help="fit report path (default stdout)")
    p.add_argument("--jobs", type=int, default=None, help="threads for multi-start fits")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"humsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ConvergenceError) as exc:
        print(f"humsim: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DomainError as exc:
        print(f"humsim: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
