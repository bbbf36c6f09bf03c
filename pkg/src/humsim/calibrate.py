"""Calibration of the sensor model against measured capacitance data.

Two routes are provided: a bounded Levenberg-Marquardt fit of arbitrary
scalar configuration parameters to (RH, C) data, and the classic linear
BET-plot regression of (x, v) adsorption data.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .adsorption import bet_transform
from .capillary import DESORPTION, PoreFillState, update_fill_state
from .exceptions import ConvergenceError, DataError, DomainError, NonPhysicalFitError
from .sensor import (
    ZERO_CELSIUS,
    SweepResult,
    get_parameter,
    rh_sweep,
    rh_to_x,
    with_parameters,
)

_FD_REL_STEP = 1e-6
_FD_MIN_STEP = 1e-12


@dataclass
class MeasurementSet:
    """Measured capacitances in acquisition order.

    ``branch`` entries may be ``None``; ``weight`` defaults to one per row.
    """

    rh_percent: np.ndarray
    capacitance_f: np.ndarray
    temp_c: np.ndarray
    branch: List[Optional[str]] = field(default_factory=list)
    weight: Optional[np.ndarray] = None

    def __post_init__(self):
        self.rh_percent = np.asarray(self.rh_percent, dtype=float)
        self.capacitance_f = np.asarray(self.capacitance_f, dtype=float)
        n = len(self.rh_percent)
        self.temp_c = np.broadcast_to(np.asarray(self.temp_c, dtype=float), (n,)).copy()
        if not self.branch:
            self.branch = [None] * n
        if self.weight is not None:
            self.weight = np.asarray(self.weight, dtype=float)
        if len(self.capacitance_f) != n or len(self.branch) != n:
            raise DataError("measurement columns have different lengths")
        if self.weight is not None and (len(self.weight) != n or np.any(self.weight < 0)):
            raise DataError("weights must be non-negative, one per row")
        if np.any((self.rh_percent < 0) | (self.rh_percent > 100)):
            raise DataError("RH values must lie in [0, 100]")
        if np.any(~(self.capacitance_f > 0)):
            raise DataError("capacitances must be positive")

    def __len__(self):
        return len(self.rh_percent)

    @classmethod
    def from_sweep(cls, result: SweepResult, with_branch=True):
        return cls(
            result.rh_percent,
            result.column("capacitance_f"),
            result.temp_c,
            [r.branch for r in result.rows] if with_branch else [],
        )


@dataclass(frozen=True)
class FreeParameter:
    lower: float
    upper: float
    initial: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise DomainError("parameter bounds must be finite")
        if not self.lower < self.upper:
            raise DomainError("lower bound must be below upper bound")
        if not self.lower <= self.initial <= self.upper:
            raise DomainError("initial value outside bounds")


@dataclass(frozen=True)
class FitSpec:
    """What to fit and how.

    ``free_parameters`` maps dotted config names such as
    ``"kelvin.theta_adv"`` to :class:`FreeParameter`.
    """

    free_parameters: Dict[str, FreeParameter] = field(default_factory=dict)
    max_iterations: int = 100
    tolerance: float = 1e-10
    seed: int = 0
    n_starts: int = 1
    gtol: float = 1e-10
    rms_floor: float = 1e-9  # pF

    def __post_init__(self):
        if self.max_iterations < 0 or self.n_starts < 1:
            raise DomainError("max_iterations must be >= 0 and n_starts >= 1")
        if not self.tolerance > 0:
            raise DomainError("tolerance must be positive")


@dataclass
class FitResult:
    values: Dict[str, float]
    initial_values: Dict[str, float]
    config: object
    rms_pf: float
    iterations: int
    evaluations: int
    converged: bool
    trace: List[float]
    message: str = ""


def _replay_temperatures(data):
    return data.temp_c + ZERO_CELSIUS


def _initial_state(cfg, data):
    """Starting fill state for a replay.

    Dry pores, unless the first tagged row is on the desorption branch: then
    the record is taken to start from saturation.
    """
    T0 = float(data.temp_c[0]) + ZERO_CELSIUS
    state = PoreFillState.empty(T0)
    first = next((b for b in data.branch if b is not None), None)
    if first == DESORPTION:
        state = update_fill_state(state, rh_to_x(100.0), T0, cfg.kelvin)
    return state


def model_capacitance(cfg, data):
    """Model capacitance (F) along the measured RH path."""
    if len(data) == 0:
        raise DataError("measurement set is empty")
    sweep = rh_sweep(cfg, data.rh_percent, _replay_temperatures(data),
                     state=_initial_state(cfg, data))
    return sweep.column("capacitance_f")


def residuals(cfg, data):
    """Measured minus model capacitance, pF."""
    return (data.capacitance_f - model_capacitance(cfg, data)) * 1e12


def bet_linear_fit(points):
    """Monolayer capacity and c from a linear BET plot.

    Parameters
    ----------
    points : sequence of (x, v)
        Relative pressures in (0, 1) and adsorbed quantities.

    Returns
    -------
    dict with keys ``v_m``, ``c``, ``intercept``, ``slope``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise DomainError("need at least two (x, v) points")
    x, v = pts[:, 0], pts[:, 1]
    if np.ptp(x) == 0:
        raise DomainError("need at least two distinct relative pressures")
    y = bet_transform(x, v)
    A = np.column_stack([np.ones_like(x), x])
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    if a <= 0 or a + b <= 0:
        raise NonPhysicalFitError(
            f"BET line has intercept {a:.3g} and slope {b:.3g}; no physical (v_m, c)"
        )
    return {"v_m": 1.0 / (a + b), "c": 1.0 + b / a, "intercept": float(a), "slope": float(b)}


class _Problem:
    """Residuals in normalized coordinates z = (p - lower) / (upper - lower)."""

    def __init__(self, data, spec, base):
        self.data = data
        self.base = base
        self.names = list(spec.free_parameters)
        self.lower = np.array([spec.free_parameters[n].lower for n in self.names])
        self.upper = np.array([spec.free_parameters[n].upper for n in self.names])
        self.span = self.upper - self.lower
        w = data.weight
        self.sqrt_w = None if w is None else np.sqrt(w)
        self.evaluations = 0

    def to_params(self, z):
        return self.lower + self.span * np.asarray(z)

    def to_z(self, p):
        return (np.asarray(p) - self.lower) / self.span

    def config(self, p):
        return with_parameters(self.base, {n: float(v) for n, v in zip(self.names, p)})

    def residual_p(self, p):
        self.evaluations += 1
        try:
            r = residuals(self.config(p), self.data)
        except DomainError:
            return np.full(len(self.data), np.nan)
        if self.sqrt_w is not None:
            r = r * self.sqrt_w
        return r

    def jacobian_z(self, p, r0):
        """Finite-difference Jacobian, columns scaled to normalized units.

        Central differences with a relative step; one-sided next to a bound.
        """
        cols = []
        for j in range(len(p)):
            h = max(_FD_REL_STEP * abs(p[j]), _FD_MIN_STEP)
            up_ok = p[j] + h <= self.upper[j]
            down_ok = p[j] - h >= self.lower[j]
            if up_ok and down_ok:
                pp, pm = p.copy(), p.copy()
                pp[j] += h
                pm[j] -= h
                col = (self.residual_p(pp) - self.residual_p(pm)) / (2 * h)
            elif up_ok:
                pp = p.copy()
                pp[j] += h
                col = (self.residual_p(pp) - r0) / h
            else:
                pm = p.copy()
                pm[j] -= h
                col = (r0 - self.residual_p(pm)) / h
            cols.append(col * self.span[j])
        return np.column_stack(cols)


def _levenberg_marquardt(problem, z0, spec):
    z = np.clip(np.asarray(z0, dtype=float), 0.0, 1.0)
    p = problem.to_params(z)
    r = problem.residual_p(p)
    S = float(r @ r)
    if not math.isfinite(S):
        raise ConvergenceError("objective is not finite at the initial point")
    n_rows = len(r)
    trace = [S]
    lam = 1e-2
    small_steps = 0
    converged = False
    message = "iteration limit reached"
    iterations = 0
    J = None
    while iterations < spec.max_iterations:
        if math.sqrt(S / n_rows) <= spec.rms_floor:
            converged, message = True, "residual at floor"
            break
        if J is None:
            J = problem.jacobian_z(p, r)
            g = J.T @ r
            A = J.T @ J
            g_proj = g.copy()
            g_proj[(z <= 0.0) & (g > 0)] = 0.0
            g_proj[(z >= 1.0) & (g < 0)] = 0.0
            if np.max(np.abs(g_proj)) <= spec.gtol * max(1.0, S):
                converged, message = True, "projected gradient below tolerance"
                break
            diag = np.diag(A).copy()
            diag = np.maximum(diag, 1e-12 * max(diag.max(), 1e-300))
        iterations += 1
        try:
            step = np.linalg.solve(A + lam * np.diag(diag), -g)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        candidates = _bounded_candidates(z, step)
        if not candidates:
            converged = np.max(np.abs(g_proj)) <= math.sqrt(spec.gtol) * max(1.0, S)
            message = "step vanished at bounds"
            break
        S_new = math.inf
        for z_c in candidates:
            p_c = problem.to_params(z_c)
            r_c = problem.residual_p(p_c)
            S_c = float(r_c @ r_c)
            if S_c < S_new:
                z_new, p_new, r_new, S_new = z_c, p_c, r_c, S_c
            if S_c < S:
                break
        if math.isfinite(S_new) and S_new < S:
            rel = (S - S_new) / S
            z, p, r, S = z_new, p_new, r_new, S_new
            trace.append(S)
            J = None
            lam = max(lam * 0.3, 1e-12)
            small_steps = small_steps + 1 if rel < spec.tolerance else 0
            if small_steps >= 3:
                converged, message = True, "relative objective decrease below tolerance"
                break
        else:
            lam *= 10.0
            if lam > 1e12:
                converged = np.max(np.abs(g_proj)) <= math.sqrt(spec.gtol) * max(1.0, S)
                message = "damping limit reached"
                break
    return z, S, iterations, converged, trace, message


def _bounded_candidates(z, step):
    """Trial points for a step in the unit box.

    When the full step leaves the box, the step shortened to stay strictly
    inside is tried first and the clipped step second. Landing exactly on a
    bound is thereby a fallback only, so a parameter whose derivative
    vanishes on its bound (a contact angle at 0 degrees) is not trapped.
    """
    out = []
    crossing = (((z + step) < 0.0) | ((z + step) > 1.0)) & (step != 0)
    if np.any(crossing):
        with np.errstate(divide="ignore", invalid="ignore"):
            room = np.where(step < 0, z / -step, (1.0 - z) / step)
        alpha = 0.9 * float(np.min(room[crossing]))
        if alpha > 0:
            out.append(z + alpha * step)
    clipped = np.clip(z + step, 0.0, 1.0)
    if not np.array_equal(clipped, z):
        out.append(clipped)
    return out


def _latin_hypercube_starts(n_params, n_extra, seed):
    if n_extra <= 0:
        return np.empty((0, n_params))
    return qmc.LatinHypercube(d=n_params, seed=seed).random(n_extra)


def fit(data, spec, base, jobs=None):
    """Fit the free parameters of ``base`` to ``data`` by bounded least squares.

    Parameters
    ----------
    data : MeasurementSet
    spec : FitSpec
    base : SensorConfig
        Supplies every non-free parameter.
    jobs : int, optional
        Worker threads used for multi-start runs.

    Returns
    -------
    FitResult
    """
    if len(data) == 0:
        raise DataError("measurement set is empty")
    names = list(spec.free_parameters)
    initial = {n: spec.free_parameters[n].initial for n in names}
    if not names:
        r = residuals(base, data)
        rms = float(np.sqrt(np.mean(r**2)))
        if not math.isfinite(rms):
            raise ConvergenceError("objective is not finite at the initial point")
        return FitResult({}, {}, base, rms, 0, 1, True, [float(r @ r)], "no free parameters")
    for n in names:
        get_parameter(base, n)

    def run(z0):
        problem = _Problem(data, spec, base)
        out = _levenberg_marquardt(problem, z0, spec)
        return out + (problem.evaluations,)

    probe = _Problem(data, spec, base)
    z_first = probe.to_z([initial[n] for n in names])
    starts = [z_first] + list(_latin_hypercube_starts(len(names), spec.n_starts - 1, spec.seed))
    if jobs and jobs > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(run, starts))
    else:
        runs = [run(z0) for z0 in starts]

    best = min(range(len(runs)), key=lambda i: (runs[i][1], i))
    z, S, iterations, converged, trace, message, _ = runs[best]
    values = dict(zip(names, (float(v) for v in probe.to_params(z))))
    cfg = probe.config([values[n] for n in names])
    r = residuals(cfg, data)
    rms = float(np.sqrt(np.mean(r**2)))
    return FitResult(
        values=values,
        initial_values=initial,
        config=cfg,
        rms_pf=rms,
        iterations=iterations,
        evaluations=sum(run_[-1] for run_ in runs),
        converged=bool(converged),
        trace=trace,
        message=message,
    )


def free_parameters_from_bounds(base, bounds: Dict[str, Sequence[float]]):
    """Build :class:`FreeParameter` entries, taking missing initials from ``base``.

    ``bounds`` values are ``(lower, upper)`` or ``(lower, upper, initial)``.
    """
    out = {}
    for name, b in bounds.items():
        if len(b) == 3:
            lo, hi, init = b
        else:
            lo, hi = b
            init = min(max(float(get_parameter(base, name)), lo), hi)
        out[name] = FreeParameter(float(lo), float(hi), float(init))
    return out
