"""CSV and YAML readers/writers.

CSV dialect: comma separated, ``.`` decimal point, a single header row and
``#``-prefixed comment lines (anywhere, typically as a footer). Floats are
written with 9 significant digits in lowercase exponent notation.
"""
import csv
from dataclasses import asdict, fields
import io as _io
import math

import numpy as np
import yaml

from .adsorption import BetParameters
from .calibrate import FitSpec, FreeParameter, MeasurementSet
from .capillary import KelvinParameters, PoreSizeDistribution
from .dielectric import LayerStack, Permittivities
from .exceptions import DataError, DomainError
from .sensor import SensorConfig, SurfaceTerm, SweepResult, SweepRow, WallDiffusion

SWEEP_COLUMNS = ("rh_percent", "temp_c", "branch", "water_fill", "eps_eff", "capacitance_pf")

_SECTIONS = {
    "bet": BetParameters,
    "kelvin": KelvinParameters,
    "psd": PoreSizeDistribution,
    "stack": LayerStack,
    "eps": Permittivities,
    "surface_term": SurfaceTerm,
    "diffusion": WallDiffusion,
}
_RUN_SECTIONS = ("sweep", "temp_sweep", "fit")
_FIT_KEYS = {"max_iterations", "tolerance", "seed", "n_starts", "gtol", "rms_floor",
             "free_parameters"}


def fmt(value):
    """Format a float with 9 significant digits."""
    return f"{float(value):.8e}"


def _read_rows(text):
    """Yield (line_number, fields) for non-comment, non-blank lines."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, next(csv.reader([line]))


def _parse_float(value, lineno, column):
    try:
        out = float(value)
    except ValueError:
        raise DataError(f"column {column!r}: cannot parse {value!r} as a number", lineno)
    if not math.isfinite(out):
        raise DataError(f"column {column!r}: non-finite value {value!r}", lineno)
    return out


def format_sweep_csv(result, footer=()):
    buf = _io.StringIO()
    buf.write(",".join(SWEEP_COLUMNS) + "\n")
    for r in result.rows:
        buf.write(",".join([
            fmt(r.rh_percent), fmt(r.temp_c), r.branch, fmt(r.water_fill),
            fmt(r.eps_eff), fmt(r.capacitance_f * 1e12),
        ]) + "\n")
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def parse_sweep_csv(text):
    rows = _read_rows(text)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise DataError("file has no header row")
    if tuple(h.strip() for h in header) != SWEEP_COLUMNS:
        raise DataError(f"expected header {','.join(SWEEP_COLUMNS)}", lineno)
    result = SweepResult()
    for lineno, values in rows:
        if len(values) != len(SWEEP_COLUMNS):
            raise DataError(f"expected {len(SWEEP_COLUMNS)} fields, got {len(values)}", lineno)
        rec = dict(zip(SWEEP_COLUMNS, values))
        nums = {k: _parse_float(v, lineno, k) for k, v in rec.items() if k != "branch"}
        result.rows.append(SweepRow(
            nums["rh_percent"], nums["temp_c"], rec["branch"].strip(), nums["water_fill"],
            nums["eps_eff"], nums["capacitance_pf"] * 1e-12,
        ))
    return result


def parse_measurements(text, default_temp_c=25.0):
    """Parse measurement CSV text.

    Required columns: ``rh_percent`` and either ``capacitance_pf`` or
    ``capacitance_f``. Optional: ``temp_c``, ``branch``, ``weight``. Extra
    columns (such as those of a sweep file) are ignored.
    """
    rows = _read_rows(text)
    try:
        header_line, header = next(rows)
    except StopIteration:
        raise DataError("measurement file is empty")
    header = [h.strip() for h in header]
    if "rh_percent" not in header:
        raise DataError("missing column 'rh_percent'", header_line)
    if "capacitance_pf" in header:
        cap_col, cap_scale = "capacitance_pf", 1e-12
    elif "capacitance_f" in header:
        cap_col, cap_scale = "capacitance_f", 1.0
    else:
        raise DataError("missing column 'capacitance_pf' or 'capacitance_f'", header_line)
    rh, cap, temp, branch, weight = [], [], [], [], []
    for lineno, values in rows:
        if len(values) != len(header):
            raise DataError(f"expected {len(header)} fields, got {len(values)}", lineno)
        rec = dict(zip(header, values))
        r = _parse_float(rec["rh_percent"], lineno, "rh_percent")
        if not 0 <= r <= 100:
            raise DataError(f"RH {r} outside [0, 100]", lineno)
        c = _parse_float(rec[cap_col], lineno, cap_col) * cap_scale
        if not c > 0:
            raise DataError("capacitance must be positive", lineno)
        rh.append(r)
        cap.append(c)
        temp.append(_parse_float(rec["temp_c"], lineno, "temp_c") if "temp_c" in rec
                    else default_temp_c)
        b = rec.get("branch", "").strip()
        branch.append(b or None)
        if "weight" in rec:
            w = _parse_float(rec["weight"], lineno, "weight")
            if w < 0:
                raise DataError("weight must be non-negative", lineno)
            weight.append(w)
    if not rh:
        raise DataError("measurement file has no data rows")
    return MeasurementSet(np.array(rh), np.array(cap), np.array(temp), branch,
                          np.array(weight) if weight else None)


def format_measurements(data):
    buf = _io.StringIO()
    cols = ["rh_percent", "capacitance_pf", "temp_c", "branch"]
    if data.weight is not None:
        cols.append("weight")
    buf.write(",".join(cols) + "\n")
    for i in range(len(data)):
        vals = [fmt(data.rh_percent[i]), fmt(data.capacitance_f[i] * 1e12),
                fmt(data.temp_c[i]), data.branch[i] or ""]
        if data.weight is not None:
            vals.append(fmt(data.weight[i]))
        buf.write(",".join(vals) + "\n")
    return buf.getvalue()


def read_text(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}")


# -- configuration ----------------------------------------------------------

def _build_section(name, cls, values):
    if values is None:
        return cls()
    if not isinstance(values, dict):
        raise DataError(f"section {name!r} must be a mapping")
    known = {f.name for f in fields(cls)}
    unknown = set(values) - known
    if unknown:
        raise DataError(f"unknown key(s) in {name!r}: {', '.join(sorted(unknown))}")
    values = {k: _coerce_number(v) for k, v in values.items()}
    try:
        return cls(**values)
    except (TypeError, DomainError) as exc:
        raise DataError(f"invalid {name!r} section: {exc}")


def _coerce_number(value):
    # YAML 1.1 reads exponent literals without a dot ("1e-6") as strings
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return value
    return value


def config_from_dict(doc):
    """Build ``(SensorConfig, run_sections)`` from a parsed document."""
    doc = dict(doc or {})
    unknown = set(doc) - set(_SECTIONS) - set(_RUN_SECTIONS) - {"mixing"}
    if unknown:
        raise DataError(f"unknown top-level key(s): {', '.join(sorted(unknown))}")
    parts = {name: _build_section(name, cls, doc.get(name)) for name, cls in _SECTIONS.items()}
    try:
        cfg = SensorConfig(mixing=doc.get("mixing", "lichtenecker"), **parts)
    except DomainError as exc:
        raise DataError(str(exc))
    run = {k: doc[k] for k in _RUN_SECTIONS if doc.get(k) is not None}
    return cfg, run


def load_config(path):
    try:
        doc = yaml.safe_load(read_text(path))
    except yaml.YAMLError as exc:
        raise DataError(f"{path}: not valid YAML ({exc})")
    if doc is not None and not isinstance(doc, dict):
        raise DataError(f"{path}: top level must be a mapping")
    return config_from_dict(doc)


def config_to_dict(cfg, run=None):
    doc = {"mixing": cfg.mixing}
    for name in _SECTIONS:
        doc[name] = asdict(getattr(cfg, name))
    for k, v in (run or {}).items():
        doc[k] = v
    return doc


def dump_config(cfg, run=None):
    return yaml.safe_dump(config_to_dict(cfg, run), sort_keys=False)


def fit_spec_from_dict(section, base):
    """Build a :class:`FitSpec` from a ``fit`` section.

    ``free_parameters`` maps dotted names to ``{lower, upper[, initial]}``;
    a missing initial is taken from ``base`` and clamped into the bounds.
    """
    from .sensor import get_parameter

    if not isinstance(section, dict):
        raise DataError("fit section must be a mapping")
    unknown = set(section) - _FIT_KEYS
    if unknown:
        raise DataError(f"unknown key(s) in 'fit': {', '.join(sorted(unknown))}")
    free = {}
    for name, b in (section.get("free_parameters") or {}).items():
        if not isinstance(b, dict) or not {"lower", "upper"} <= set(b) or \
                set(b) - {"lower", "upper", "initial"}:
            raise DataError(f"free parameter {name!r} needs lower/upper[/initial]")
        try:
            current = get_parameter(base, name)
        except AttributeError:
            raise DataError(f"unknown parameter {name!r}")
        if not isinstance(current, (int, float)) or isinstance(current, bool):
            raise DataError(f"parameter {name!r} is not a scalar")
        try:
            lo, hi = float(b["lower"]), float(b["upper"])
            init = float(b["initial"]) if "initial" in b else min(max(float(current), lo), hi)
        except (TypeError, ValueError):
            raise DataError(f"free parameter {name!r}: bounds must be numbers")
        try:
            free[name] = FreeParameter(lo, hi, init)
        except DomainError as exc:
            raise DataError(f"free parameter {name!r}: {exc}")
    opts = {k: _coerce_number(section[k])
            for k in sorted(_FIT_KEYS - {"free_parameters"}) if k in section}
    try:
        return FitSpec(free, **opts)
    except (TypeError, DomainError) as exc:
        raise DataError(f"invalid fit section: {exc}")


def fit_spec_to_dict(spec):
    out = {
        "max_iterations": spec.max_iterations,
        "tolerance": spec.tolerance,
        "seed": spec.seed,
        "n_starts": spec.n_starts,
        "free_parameters": {
            n: {"lower": p.lower, "upper": p.upper, "initial": p.initial}
            for n, p in spec.free_parameters.items()
        },
    }
    return out
